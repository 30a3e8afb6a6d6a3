"""Brute-force references and end-to-end checks on small random instances.

Everything here recomputes results along an independent path: the nerve by
full subset enumeration without pruning or shared state, and the theorem
checks by comparing complete persistence diagrams.  On failure a check
dumps a replayable bundle in the CLI's CSV formats.
"""

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .extreal import INF
from .dissimilarity import (DowkerDissimilarity, from_distance_matrix,
                            farthest_point_sample, cover_dissimilarity,
                            alpha_insertion_radius, truncate)
from .translations import multiplicative
from .nerve import (FilteredComplex, SparsificationPlan, BudgetExceededError,
                    DEFAULT_SIMPLEX_BUDGET, _worst_case_count,
                    nerve_value, sparse_nerve_value, build_filtered_complex,
                    canonical_restriction, build_parent_function, parent_restriction,
                    sheehy_restriction, validate_restriction)
from .persistence import compute_diagram
from .interleave import find_matching
from . import cli

STRATEGIES = ("canonical", "parent", "sheehy")

MAX_N = 12
MAX_M = 12
MAX_DIM_CAP = 3


@dataclass(frozen=True)
class InstanceSpec:
    """A reproducible random test instance within the desk-scale budget."""

    n: int
    m: int
    value_distribution: str  # "uniform" | "grid" | "metric"
    seed: int
    dim_cap: int = 2

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must lie in [1, {MAX_N}]")
        if not 1 <= self.m <= MAX_M:
            raise ValueError(f"m must lie in [1, {MAX_M}]")
        if not 0 <= self.dim_cap <= MAX_DIM_CAP:
            raise ValueError(f"dim_cap must lie in [0, {MAX_DIM_CAP}]")
        if self.value_distribution not in ("uniform", "grid", "metric"):
            raise ValueError(f"unknown value distribution {self.value_distribution!r}")
        if self.value_distribution == "metric" and self.n != self.m:
            raise ValueError("metric instances need n == m")

    def generate(self) -> DowkerDissimilarity:
        rng = np.random.default_rng(self.seed)
        if self.value_distribution == "uniform":
            values = rng.uniform(0.0, 1.0, size=(self.n, self.m))
            return DowkerDissimilarity(tuple(f"l{i}" for i in range(self.n)),
                                       tuple(f"w{j}" for j in range(self.m)), values)
        if self.value_distribution == "grid":
            values = rng.integers(0, 5, size=(self.n, self.m)).astype(float)
            return DowkerDissimilarity(tuple(f"l{i}" for i in range(self.n)),
                                       tuple(f"w{j}" for j in range(self.m)), values)
        points = rng.uniform(0.0, 1.0, size=(self.n, 2))
        diff = points[:, None, :] - points[None, :, :]
        return from_distance_matrix(np.sqrt((diff * diff).sum(axis=2)))


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    detail: str
    dump_dir: str | None = None


def brute_force_nerve(lam: DowkerDissimilarity, dim_cap: int,
                      budget: int | None = None) -> FilteredComplex:
    """Reference nerve: enumerate every subset, no pruning, plain loops."""
    if budget is None:
        budget = DEFAULT_SIMPLEX_BUDGET
    n, m = lam.values.shape
    estimate = _worst_case_count(n, dim_cap)
    if estimate > budget:
        raise BudgetExceededError(
            f"brute force enumeration of {estimate} subsets exceeds budget {budget}", estimate)
    grid = [[lam.values[i, j] for j in range(m)] for i in range(n)]
    out = []
    for size in range(1, min(dim_cap + 1, n) + 1):
        for sigma in itertools.combinations(range(n), size):
            best = INF
            for w in range(m):
                worst = 0.0
                for l in sigma:
                    if grid[l][w] > worst:
                        worst = grid[l][w]
                if worst < best:
                    best = worst
            if best < INF:
                out.append((sigma, best))
    out.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return FilteredComplex(tuple(out), dim_cap)


def _dump_sparsification(dump_dir, lam, target, plan, full, sparse, d_full, d_sparse):
    path = Path(dump_dir)
    cli.write_dowker_csv(path / "lambda.csv", lam)
    if target is not lam:
        cli.write_dowker_csv(path / "target.csv", target)
    cli.write_plan_csv(path / "plan.csv", target, plan)
    cli.write_complex_csv(path / "complex.csv", full)
    cli.write_complex_csv(path / "sparse_complex.csv", sparse)
    cli.write_diagram_csv(path / "diagram_full.csv", d_full)
    cli.write_diagram_csv(path / "diagram_sparse.csv", d_sparse)
    return str(path)


def check_sparsification(spec: InstanceSpec, strategy: str,
                         dump_dir=None) -> CheckReport:
    """Verify that a sparsification plan preserves the diagram exactly.

    Builds the plan for the given strategy, validates the restriction
    conditions, then compares the persistence diagrams of the full and
    sparse nerves of the plan's target dissimilarity as per-dimension
    multisets.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    lam = spec.generate()
    if strategy == "canonical":
        phi, _ = build_parent_function(lam)
        r = canonical_restriction(lam, phi)
        target = lam
    elif strategy == "parent":
        phi, r = parent_restriction(lam, base=0)
        target = lam
    else:
        if spec.value_distribution != "metric":
            raise ValueError("the sheehy strategy needs metric instances")
        order = farthest_point_sample(lam, seed=0)
        phi, r, target = sheehy_restriction(lam, order, c=2.0)
    plan = SparsificationPlan.build(phi, r)

    violation = validate_restriction(target, phi, r)
    if violation is not None:
        return CheckReport(False, f"restriction conditions fail at {violation} ({spec})")

    n = target.n_landmarks
    full = build_filtered_complex(lambda s: nerve_value(target, s), n, spec.dim_cap)
    sparse = build_filtered_complex(lambda s: sparse_nerve_value(target, plan, s),
                                    n, spec.dim_cap)
    d_full = compute_diagram(full)
    d_sparse = compute_diagram(sparse)
    if d_full == d_sparse:
        return CheckReport(True, f"diagrams equal ({sparse.simplex_count}/{full.simplex_count} simplices)")
    dumped = None
    if dump_dir is not None:
        dumped = _dump_sparsification(dump_dir, lam, target, plan, full, sparse,
                                      d_full, d_sparse)
    return CheckReport(False, f"diagram mismatch for {strategy} on {spec}", dumped)


def check_truncation(spec: InstanceSpec, c: float, dump_dir=None) -> CheckReport:
    """Verify the truncation interleaving via an induced-matching certificate.

    Truncates with the insertion-radius bounds of the cover dissimilarity
    for alpha(t) = c t and demands a matching certificate between the
    truncated and original nerve diagrams under that slack.
    """
    if not c >= 1.0:
        raise ValueError(f"require c >= 1, got {c!r}")
    lam = spec.generate()
    alpha = multiplicative(c)
    cover = cover_dissimilarity(lam, alpha, base=0)
    order = farthest_point_sample(cover, seed=0)
    bounds = alpha_insertion_radius(cover, order)
    gamma = truncate(lam, bounds)

    n = lam.n_landmarks
    full = build_filtered_complex(lambda s: nerve_value(lam, s), n, spec.dim_cap)
    trunc = build_filtered_complex(lambda s: nerve_value(gamma, s), n, spec.dim_cap)
    d_full = compute_diagram(full)
    d_trunc = compute_diagram(trunc)
    result = find_matching(d_trunc, d_full, alpha)
    if result.ok:
        kept = trunc.simplex_count
        return CheckReport(True, f"matched ({kept}/{full.simplex_count} simplices kept)")
    dumped = None
    if dump_dir is not None:
        path = Path(dump_dir)
        cli.write_dowker_csv(path / "lambda.csv", lam)
        cli.write_dowker_csv(path / "truncated.csv", gamma)
        cli.write_complex_csv(path / "complex.csv", full)
        cli.write_complex_csv(path / "truncated_complex.csv", trunc)
        cli.write_diagram_csv(path / "diagram_full.csv", d_full)
        cli.write_diagram_csv(path / "diagram_truncated.csv", d_trunc)
        dumped = str(path)
    return CheckReport(False, f"unmatched class {result.cls} on {result.side} ({spec})", dumped)


def search_naive_truncation_failure(c: float = 1.1, seeds=range(200),
                                    n: int = 8, m: int = 8, dim_cap: int = 2):
    """Look for an instance where truncating at the raw insertion radius breaks.

    Demonstration helper: truncation bounds must come from the cover
    dissimilarity; the plain farthest-point radius carries no slack and can
    lose nontrivial classes.  Returns the first offending spec or None.
    """
    alpha = multiplicative(c)
    for seed in seeds:
        spec = InstanceSpec(n, m, "metric", seed, dim_cap)
        lam = spec.generate()
        order = farthest_point_sample(lam, seed=0)
        from .dissimilarity import TruncationFunction
        naive = TruncationFunction(order.insertion_radius)
        gamma = truncate(lam, naive)
        full = build_filtered_complex(lambda s: nerve_value(lam, s), n, dim_cap)
        trunc = build_filtered_complex(lambda s: nerve_value(gamma, s), n, dim_cap)
        result = find_matching(compute_diagram(trunc), compute_diagram(full), alpha)
        if not result.ok:
            return spec
    return None
