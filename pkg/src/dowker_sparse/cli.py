"""Command-line pipeline driver, file formats and reporting.

Commands: nerve, sparsify, persist, compare.  Exit codes: 0 success, 1
verification failure, 2 usage or parse error.  All file writes are atomic
(temp file then rename) and every numeric field is rendered as the shortest
decimal that reparses exactly, with 'inf' for infinity.
"""

import argparse
import csv
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .extreal import INF, format_scale, parse_scale
from .dissimilarity import (DowkerDissimilarity, from_distance_matrix, from_point_cloud,
                            farthest_point_sample, cover_dissimilarity,
                            alpha_insertion_radius, truncate)
from .translations import TranslationFunction, identity, multiplicative, additive
from .nerve import (FilteredComplex, ParentFunction, RestrictionFunction, SparsificationPlan,
                    BudgetExceededError, DEFAULT_SIMPLEX_BUDGET, identity_plan,
                    nerve_value, sparse_nerve_value, build_filtered_complex,
                    canonical_restriction, build_parent_function, parent_restriction,
                    sheehy_restriction)
from .persistence import PersistenceDiagram, compute_diagram
from .interleave import find_matching


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    fmt: str = "points"
    dim_cap: int = 2
    strategy: str = "none"
    alpha_spec: str = "id"
    truncate: bool = False
    seed_landmark: int = 0
    budget: int | None = None
    out: str = "."
    svg: bool = False
    complex_path: str | None = None
    diagram_a: str | None = None
    diagram_b: str | None = None


# -- atomic writes and value rendering ---------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def make_translation(spec: str) -> TranslationFunction:
    """Parse an --alpha flag: 'id', 'mult:C' or 'add:E'."""
    spec = spec.strip()
    if spec == "id":
        return identity()
    if spec.startswith("mult:"):
        return multiplicative(float(spec[5:]))
    if spec.startswith("add:"):
        return additive(float(spec[4:]))
    raise UsageError(f"unknown translation spec {spec!r}; expected id, mult:C or add:E")


# -- input formats ------------------------------------------------------------

def _read_rows(path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle)]
    if not rows or all(not any(cell.strip() for cell in row) for row in rows):
        raise UsageError(f"{path}: parse error at line 1: empty input")
    return rows


def read_points_csv(path) -> DowkerDissimilarity:
    rows = _read_rows(path)
    points = []
    width = None
    for ln, row in enumerate(rows, start=1):
        if not any(cell.strip() for cell in row):
            continue
        try:
            coords = [float(cell) for cell in row]
        except ValueError as exc:
            raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
        if width is None:
            width = len(coords)
        elif len(coords) != width:
            raise UsageError(f"{path}: parse error at line {ln}: expected {width} columns")
        points.append(coords)
    return from_point_cloud(points)


def read_distances_csv(path) -> DowkerDissimilarity:
    rows = _read_rows(path)
    grid = []
    for ln, row in enumerate(rows, start=1):
        if not any(cell.strip() for cell in row):
            continue
        try:
            grid.append([parse_scale(cell) for cell in row])
        except ValueError as exc:
            raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
    lengths = {len(r) for r in grid}
    if len(lengths) != 1:
        raise UsageError(f"{path}: parse error: ragged rows {sorted(lengths)}")
    return from_distance_matrix(grid)


def read_dowker_csv(path) -> DowkerDissimilarity:
    rows = _read_rows(path)
    header = rows[0]
    if len(header) < 2:
        raise UsageError(f"{path}: parse error at line 1: expected corner cell plus witness ids")
    witness_ids = [cell.strip() for cell in header[1:]]
    landmark_ids = []
    grid = []
    for ln, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise UsageError(f"{path}: parse error at line {ln}: expected {len(header)} columns")
        landmark_ids.append(row[0].strip())
        try:
            grid.append([parse_scale(cell) for cell in row[1:]])
        except ValueError as exc:
            raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
    if not grid:
        raise UsageError(f"{path}: parse error: no landmark rows")
    return DowkerDissimilarity(tuple(landmark_ids), tuple(witness_ids), np.array(grid))


def write_dowker_csv(path, lam: DowkerDissimilarity) -> None:
    lines = ["," + ",".join(lam.witness_ids)]
    for i, lid in enumerate(lam.landmark_ids):
        lines.append(lid + "," + ",".join(format_scale(v) for v in lam.values[i]))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_input(cfg: RunConfig) -> DowkerDissimilarity:
    if cfg.input is None:
        raise UsageError("an --input file is required")
    readers = {"points": read_points_csv, "distances": read_distances_csv,
               "dowker": read_dowker_csv}
    if cfg.fmt not in readers:
        raise UsageError(f"unknown input format {cfg.fmt!r}")
    return readers[cfg.fmt](cfg.input)


# -- complex, plan, diagram, matching files -----------------------------------

def write_complex_csv(path, cx: FilteredComplex) -> None:
    lines = ["|".join(str(v) for v in verts) + ";" + format_scale(value)
             for verts, value in cx.simplices]
    _atomic_write(Path(path), "\n".join(lines) + ("\n" if lines else ""))


def read_complex_csv(path, dim_cap: int | None = None) -> FilteredComplex:
    simplices = []
    max_dim = 0
    with open(path, encoding="utf-8") as handle:
        for ln, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                verts_part, value_part = line.split(";")
                verts = tuple(int(v) for v in verts_part.split("|"))
                value = parse_scale(value_part)
            except ValueError as exc:
                raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
            simplices.append((verts, value))
            max_dim = max(max_dim, len(verts) - 1)
    if not simplices:
        raise UsageError(f"{path}: parse error at line 1: empty complex")
    if dim_cap is None:
        # treat the file as the whole complex: nothing above its top dimension
        dim_cap = max_dim + 1
    simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return FilteredComplex(tuple(simplices), dim_cap)


def write_plan_csv(path, lam: DowkerDissimilarity, plan: SparsificationPlan) -> None:
    lines = ["landmark,parent,restriction,slope"]
    for l in range(plan.n_landmarks):
        lines.append(",".join([
            lam.landmark_ids[l],
            lam.landmark_ids[plan.phi.parent[l]],
            format_scale(plan.r.bound[l]),
            "1" if plan.slope[l] else "0",
        ]))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_plan_csv(path, lam: DowkerDissimilarity) -> SparsificationPlan:
    rows = _read_rows(path)
    if rows[0] != ["landmark", "parent", "restriction", "slope"]:
        raise UsageError(f"{path}: parse error at line 1: bad plan header")
    pos = {lid: i for i, lid in enumerate(lam.landmark_ids)}
    parent = [0] * lam.n_landmarks
    bound = [INF] * lam.n_landmarks
    for ln, row in enumerate(rows[1:], start=2):
        try:
            l = pos[row[0]]
            parent[l] = pos[row[1]]
            bound[l] = parse_scale(row[2])
        except (KeyError, IndexError, ValueError) as exc:
            raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
    return SparsificationPlan.build(ParentFunction(tuple(parent)),
                                    RestrictionFunction(tuple(bound)))


def write_diagram_csv(path, diagram: PersistenceDiagram) -> None:
    lines = ["dimension,birth,death"]
    for dim, b, d in sorted(diagram.classes):
        lines.append(f"{dim},{format_scale(b)},{format_scale(d)}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_diagram_csv(path) -> PersistenceDiagram:
    rows = _read_rows(path)
    if rows[0] != ["dimension", "birth", "death"]:
        raise UsageError(f"{path}: parse error at line 1: bad diagram header")
    classes = []
    for ln, row in enumerate(rows[1:], start=2):
        try:
            classes.append((int(row[0]), parse_scale(row[1]), parse_scale(row[2])))
        except (IndexError, ValueError) as exc:
            raise UsageError(f"{path}: parse error at line {ln}: {exc}") from exc
    classes.sort()
    return PersistenceDiagram(tuple(classes))


def write_matching_csv(path, d1: PersistenceDiagram, pairs) -> None:
    lines = ["dimension,index_a,index_b"]
    for i, j in pairs:
        lines.append(f"{d1.classes[i][0]},{i},{j}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def write_stats_json(path, stats: dict) -> None:
    _atomic_write(Path(path), json.dumps(stats, indent=2) + "\n")


# -- commands ------------------------------------------------------------------

def _budget(cfg: RunConfig) -> int:
    if cfg.budget is not None:
        return cfg.budget
    env = os.environ.get("DOWKER_SPARSE_BUDGET")
    if env is not None:
        return int(env)
    return DEFAULT_SIMPLEX_BUDGET


def cmd_nerve(cfg: RunConfig) -> int:
    lam = read_input(cfg)
    cx = build_filtered_complex(lambda s: nerve_value(lam, s),
                                lam.n_landmarks, cfg.dim_cap, _budget(cfg))
    write_complex_csv(Path(cfg.out) / "complex.csv", cx)
    return 0


def _truncated(lam: DowkerDissimilarity, alpha: TranslationFunction,
               seed: int) -> DowkerDissimilarity:
    cover = cover_dissimilarity(lam, alpha, seed)
    order = farthest_point_sample(cover, seed)
    bounds = alpha_insertion_radius(cover, order)
    return truncate(lam, bounds)


def cmd_sparsify(cfg: RunConfig) -> int:
    lam = read_input(cfg)
    alpha = make_translation(cfg.alpha_spec)
    budget = _budget(cfg)
    n = lam.n_landmarks

    if cfg.strategy == "sheehy":
        # has its own built-in truncation; --truncate is redundant here
        if not lam.is_square:
            raise UsageError("the sheehy strategy needs a square (L = W) input")
        if alpha.kind != "multiplicative" or alpha.factor <= 1.0:
            raise UsageError("the sheehy strategy needs --alpha mult:C with C > 1")
        order = farthest_point_sample(lam, cfg.seed_landmark)
        phi, r, target = sheehy_restriction(lam, order, alpha.factor)
        plan = SparsificationPlan.build(phi, r)
    else:
        target = _truncated(lam, alpha, cfg.seed_landmark) if cfg.truncate else lam
        if cfg.strategy == "none":
            plan = identity_plan(n)
        elif cfg.strategy == "canonical":
            phi, _ = build_parent_function(target)
            plan = SparsificationPlan.build(phi, canonical_restriction(target, phi))
        elif cfg.strategy == "parent":
            phi, r = parent_restriction(target, cfg.seed_landmark)
            plan = SparsificationPlan.build(phi, r)
        else:
            raise UsageError(f"unknown strategy {cfg.strategy!r}")

    full = build_filtered_complex(lambda s: nerve_value(lam, s), n, cfg.dim_cap, budget)
    sparse = build_filtered_complex(lambda s: sparse_nerve_value(target, plan, s),
                                    n, cfg.dim_cap, budget)
    out = Path(cfg.out)
    write_plan_csv(out / "plan.csv", lam, plan)
    write_complex_csv(out / "sparse_complex.csv", sparse)
    ratio = sparse.simplex_count / full.simplex_count if full.simplex_count else 1.0
    write_stats_json(out / "stats.json", {
        "n": lam.n_landmarks,
        "m": lam.n_witnesses,
        "dim_cap": cfg.dim_cap,
        "full_simplices": full.simplex_count,
        "sparse_simplices": sparse.simplex_count,
        "ratio": ratio,
        "strategy": cfg.strategy,
        "translation": cfg.alpha_spec,
    })
    return 0


def cmd_persist(cfg: RunConfig) -> int:
    if cfg.complex_path is not None:
        cap = cfg.dim_cap if cfg.dim_cap >= 0 else None
        cx = read_complex_csv(cfg.complex_path, cap)
    else:
        lam = read_input(cfg)
        dim_cap = cfg.dim_cap if cfg.dim_cap >= 0 else 2
        cx = build_filtered_complex(lambda s: nerve_value(lam, s),
                                    lam.n_landmarks, dim_cap, _budget(cfg))
    diagram = compute_diagram(cx)
    out = Path(cfg.out)
    write_diagram_csv(out / "diagram.csv", diagram)
    if cfg.svg:
        _render_svg(out / "diagram.svg", diagram)
    return 0


def _render_svg(path, diagram: PersistenceDiagram) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    finite = [d for (_, _, d) in diagram.classes if d < INF]
    top = max(finite + [b for (_, b, _) in diagram.classes] + [1.0]) * 1.1
    markers = "o^sDv"
    for k, dim in enumerate(diagram.dims()):
        pts = diagram.in_dim(dim)
        xs = [b for b, _ in pts]
        ys = [d if d < INF else top for _, d in pts]
        ax.scatter(xs, ys, marker=markers[k % len(markers)], label=f"dim {dim}", alpha=0.7)
    ax.plot([0, top], [0, top], "k--", linewidth=0.8)
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    if diagram.classes:
        ax.legend()
    fig.savefig(path, format="svg")
    plt.close(fig)


def cmd_compare(cfg: RunConfig) -> int:
    d1 = read_diagram_csv(cfg.diagram_a)
    d2 = read_diagram_csv(cfg.diagram_b)
    alpha = make_translation(cfg.alpha_spec)
    result = find_matching(d1, d2, alpha)
    out = Path(cfg.out)
    if result.ok:
        write_matching_csv(out / "matching.csv", d1, result.pairs)
        print("PASS")
        return 0
    write_matching_csv(out / "matching.csv", d1, [])
    dim, b, d = result.cls
    print(f"FAIL: unmatched nontrivial class on the {result.side} side: "
          f"dimension {dim}, interval [{format_scale(b)},{format_scale(d)})")
    return 1


# -- argument parsing ----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dowker-sparse",
        description="Build, sparsify and compare filtered Dowker nerves.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_flags(p):
        p.add_argument("--input", required=False, help="input CSV file")
        p.add_argument("--format", dest="fmt", default="points",
                       choices=["points", "distances", "dowker"])
        p.add_argument("--dim-cap", dest="dim_cap", type=int, default=2)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--out", default=".")

    p_nerve = sub.add_parser("nerve", help="write the full nerve as complex.csv")
    add_input_flags(p_nerve)

    p_sparsify = sub.add_parser("sparsify", help="write plan, sparse complex and stats")
    add_input_flags(p_sparsify)
    p_sparsify.add_argument("--strategy", default="none",
                            choices=["none", "canonical", "parent", "sheehy"])
    p_sparsify.add_argument("--alpha", dest="alpha_spec", default="id")
    p_sparsify.add_argument("--truncate", action="store_true")
    p_sparsify.add_argument("--seed-landmark", dest="seed_landmark", type=int, default=0)

    p_persist = sub.add_parser("persist", help="write the persistence diagram")
    add_input_flags(p_persist)
    p_persist.add_argument("--complex", dest="complex_path", default=None,
                           help="read an existing complex.csv instead of building one")
    p_persist.add_argument("--svg", action="store_true")
    p_persist.set_defaults(dim_cap=-1)  # default: infer from the file

    p_compare = sub.add_parser("compare", help="match two diagrams under a translation")
    p_compare.add_argument("diagram_a")
    p_compare.add_argument("diagram_b")
    p_compare.add_argument("--alpha", dest="alpha_spec", default="id")
    p_compare.add_argument("--out", default=".")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = RunConfig()
    for key in vars(cfg):
        if hasattr(ns, key):
            setattr(cfg, key, getattr(ns, key))
    commands = {"nerve": cmd_nerve, "sparsify": cmd_sparsify,
                "persist": cmd_persist, "compare": cmd_compare}
    try:
        return commands[ns.command](cfg)
    except (UsageError, BudgetExceededError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
