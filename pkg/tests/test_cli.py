import json
import math

import numpy as np
import pytest

from dowker_sparse import (INF, DowkerDissimilarity, FilteredComplex, PersistenceDiagram,
                           InstanceSpec, build_filtered_complex, nerve_value,
                           compute_diagram, truncate, cover_dissimilarity,
                           farthest_point_sample, alpha_insertion_radius, multiplicative)
from dowker_sparse.cli import (main, make_translation, UsageError,
                               read_dowker_csv, write_dowker_csv,
                               read_complex_csv, write_complex_csv,
                               read_diagram_csv, write_diagram_csv,
                               read_plan_csv, write_plan_csv)
from dowker_sparse.nerve import SparsificationPlan, ParentFunction, RestrictionFunction


def write(path, text):
    path.write_text(text, encoding="utf-8")


# -- round trips -----------------------------------------------------------------

def test_dowker_roundtrip(tmp_path):
    vals = np.array([[0.1, INF, 2.0], [1.0 / 3.0, 0.0, 5.5]])
    lam = DowkerDissimilarity(("a", "b"), ("x", "y", "z"), vals)
    path = tmp_path / "lam.csv"
    write_dowker_csv(path, lam)
    assert read_dowker_csv(path) == lam
    first = path.read_bytes()
    write_dowker_csv(path, lam)
    assert path.read_bytes() == first


def test_complex_roundtrip(tmp_path):
    cx = FilteredComplex((((0,), 0.1), ((1,), 0.2), ((0, 1), 1.0 / 3.0)), dim_cap=2)
    path = tmp_path / "complex.csv"
    write_complex_csv(path, cx)
    back = read_complex_csv(path, dim_cap=2)
    assert back == cx


def test_diagram_roundtrip(tmp_path):
    d = PersistenceDiagram(((0, 0.0, INF), (0, 0.1, 0.30000000000000004), (1, 0.5, 2.0)))
    path = tmp_path / "diagram.csv"
    write_diagram_csv(path, d)
    assert read_diagram_csv(path) == d


def test_plan_roundtrip(tmp_path):
    lam = DowkerDissimilarity(("p", "q", "r"), ("u",), [[1.0], [2.0], [3.0]])
    plan = SparsificationPlan.build(ParentFunction((0, 0, 1)),
                                    RestrictionFunction((INF, 2.5, 1.0)))
    path = tmp_path / "plan.csv"
    write_plan_csv(path, lam, plan)
    back = read_plan_csv(path, lam)
    assert back == plan


def test_make_translation():
    assert make_translation("id").kind == "identity"
    assert make_translation("mult:2.5").factor == 2.5
    assert make_translation("add:0.25").offset == 0.25
    with pytest.raises(UsageError):
        make_translation("pow:2")


# -- nerve command ------------------------------------------------------------------

def test_cmd_nerve_two_points(tmp_path):
    src = tmp_path / "points.csv"
    write(src, "0\n3\n")
    code = main(["nerve", "--input", str(src), "--format", "points",
                 "--dim-cap", "1", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "complex.csv").read_text().splitlines()
    assert rows == ["0;0.0", "1;0.0", "0|1;3.0"]


def test_cmd_nerve_empty_file(tmp_path, capsys):
    src = tmp_path / "points.csv"
    write(src, "")
    code = main(["nerve", "--input", str(src), "--out", str(tmp_path)])
    assert code == 2
    assert "line 1" in capsys.readouterr().err


def test_cmd_nerve_dim_cap_zero(tmp_path):
    src = tmp_path / "points.csv"
    write(src, "0\n1\n3\n")
    code = main(["nerve", "--input", str(src), "--dim-cap", "0", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "complex.csv").read_text().splitlines()
    assert rows == ["0;0.0", "1;0.0", "2;0.0"]


def test_cmd_nerve_budget_env(tmp_path, monkeypatch, capsys):
    src = tmp_path / "points.csv"
    write(src, "\n".join(str(i) for i in range(12)))
    monkeypatch.setenv("DOWKER_SPARSE_BUDGET", "5")
    code = main(["nerve", "--input", str(src), "--out", str(tmp_path)])
    assert code == 2
    assert "budget" in capsys.readouterr().err


# -- sparsify command -----------------------------------------------------------------

def circle_points(tmp_path, n=40, seed=0):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    pts = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    pts += rng.normal(0, 0.02, size=pts.shape)
    src = tmp_path / "circle.csv"
    write(src, "\n".join(f"{float(x)!r},{float(y)!r}" for x, y in pts) + "\n")
    return src


def test_cmd_sparsify_none_strategy(tmp_path):
    src = tmp_path / "points.csv"
    write(src, "0\n1\n3\n")
    code = main(["sparsify", "--input", str(src), "--strategy", "none",
                 "--dim-cap", "1", "--out", str(tmp_path)])
    assert code == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["ratio"] == 1.0
    assert stats["full_simplices"] == stats["sparse_simplices"]
    assert set(stats) == {"n", "m", "dim_cap", "full_simplices", "sparse_simplices",
                          "ratio", "strategy", "translation"}


def test_cmd_sparsify_invalid_strategy(tmp_path):
    src = tmp_path / "points.csv"
    write(src, "0\n1\n")
    code = main(["sparsify", "--input", str(src), "--strategy", "bogus",
                 "--out", str(tmp_path)])
    assert code == 2


def test_cmd_sparsify_sheehy_circle(tmp_path):
    src = circle_points(tmp_path)
    code = main(["sparsify", "--input", str(src), "--strategy", "sheehy",
                 "--alpha", "mult:2", "--dim-cap", "2", "--out", str(tmp_path)])
    assert code == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["strategy"] == "sheehy"
    assert stats["ratio"] < 0.5
    plan_rows = (tmp_path / "plan.csv").read_text().splitlines()
    assert plan_rows[0] == "landmark,parent,restriction,slope"
    assert len(plan_rows) == 41
    assert (tmp_path / "sparse_complex.csv").exists()


def test_cmd_sparsify_canonical_with_truncation(tmp_path):
    src = circle_points(tmp_path, n=20, seed=3)
    code = main(["sparsify", "--input", str(src), "--strategy", "canonical",
                 "--alpha", "mult:1.5", "--truncate", "--dim-cap", "2",
                 "--out", str(tmp_path)])
    assert code == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["translation"] == "mult:1.5"
    assert stats["sparse_simplices"] <= stats["full_simplices"]


def test_cmd_sparsify_seed_landmark(tmp_path):
    src = circle_points(tmp_path, n=12, seed=5)
    out1 = tmp_path / "seed0"
    out2 = tmp_path / "seed3"
    for out, seed in ((out1, "0"), (out2, "3")):
        assert main(["sparsify", "--input", str(src), "--strategy", "parent",
                     "--seed-landmark", seed, "--dim-cap", "1", "--out", str(out)]) == 0
    plan1 = (out1 / "plan.csv").read_text().splitlines()
    plan2 = (out2 / "plan.csv").read_text().splitlines()
    # the base landmark is its own parent with infinite bound
    assert plan1[1].startswith("0,0,inf")
    assert plan2[4].startswith("3,3,inf")


def test_cmd_nerve_budget_flag(tmp_path, capsys):
    src = tmp_path / "points.csv"
    write(src, "\n".join(str(i) for i in range(12)))
    code = main(["nerve", "--input", str(src), "--budget", "5", "--out", str(tmp_path)])
    assert code == 2
    assert "budget" in capsys.readouterr().err


def test_cmd_sparsify_deterministic(tmp_path):
    src = circle_points(tmp_path, n=15, seed=4)
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    for out in (out1, out2):
        assert main(["sparsify", "--input", str(src), "--strategy", "parent",
                     "--dim-cap", "2", "--out", str(out)]) == 0
    for name in ("plan.csv", "sparse_complex.csv", "stats.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


# -- persist command ---------------------------------------------------------------------

def test_cmd_persist_single_vertex(tmp_path):
    src = tmp_path / "complex.csv"
    write(src, "0;0.25\n")
    code = main(["persist", "--complex", str(src), "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "diagram.csv").read_text().splitlines()
    assert rows == ["dimension,birth,death", "0,0.25,inf"]


def test_cmd_persist_triangle_golden(tmp_path):
    src = tmp_path / "complex.csv"
    write(src, "0;0.0\n1;0.0\n2;0.0\n0|1;1.0\n0|2;1.0\n1|2;1.0\n0|1|2;2.0\n")
    code = main(["persist", "--complex", str(src), "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "diagram.csv").read_text().splitlines()
    assert rows == ["dimension,birth,death",
                    "0,0.0,1.0", "0,0.0,1.0", "0,0.0,inf", "1,1.0,2.0"]


def test_cmd_persist_missing_face(tmp_path, capsys):
    src = tmp_path / "complex.csv"
    write(src, "0;0.0\n0|1;1.0\n")
    code = main(["persist", "--complex", str(src), "--out", str(tmp_path)])
    assert code == 2
    assert "missing face (1,)" in capsys.readouterr().err


def test_cmd_persist_from_pipeline_input(tmp_path):
    src = tmp_path / "points.csv"
    write(src, "0\n3\n")
    code = main(["persist", "--input", str(src), "--format", "points",
                 "--dim-cap", "1", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "diagram.csv").read_text().splitlines()
    assert rows == ["dimension,birth,death", "0,0.0,3.0", "0,0.0,inf"]


def test_cmd_persist_svg(tmp_path):
    pytest.importorskip("matplotlib")
    src = tmp_path / "complex.csv"
    write(src, "0;0.0\n1;0.0\n0|1;1.0\n")
    code = main(["persist", "--complex", str(src), "--svg", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "diagram.svg").read_text().lstrip().startswith("<?xml")


# -- compare command ------------------------------------------------------------------------

def test_cmd_compare_identical(tmp_path, capsys):
    d = PersistenceDiagram(((0, 0.0, INF), (1, 0.5, 2.0)))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_diagram_csv(a, d)
    write_diagram_csv(b, d)
    code = main(["compare", str(a), str(b), "--alpha", "id", "--out", str(tmp_path)])
    assert code == 0
    assert "PASS" in capsys.readouterr().out
    rows = (tmp_path / "matching.csv").read_text().splitlines()
    assert rows[0] == "dimension,index_a,index_b"
    assert len(rows) == 3


def test_cmd_compare_disjoint_essentials(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_diagram_csv(a, PersistenceDiagram(((0, 0.0, INF),)))
    write_diagram_csv(b, PersistenceDiagram(((0, 5.0, INF),)))
    code = main(["compare", str(a), str(b), "--alpha", "mult:1.01", "--out", str(tmp_path)])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cmd_compare_truncation_fixture(tmp_path, capsys):
    # derived interleaved pair: truncated nerve vs full nerve
    spec = InstanceSpec(8, 8, "uniform", 17)
    lam = spec.generate()
    alpha = multiplicative(1.5)
    cov = cover_dissimilarity(lam, alpha, 0)
    order = farthest_point_sample(cov, 0)
    gamma = truncate(lam, alpha_insertion_radius(cov, order))
    d_full = compute_diagram(build_filtered_complex(lambda s: nerve_value(lam, s), 8, 2))
    d_trunc = compute_diagram(build_filtered_complex(lambda s: nerve_value(gamma, s), 8, 2))
    a, b = tmp_path / "trunc.csv", tmp_path / "full.csv"
    write_diagram_csv(a, d_trunc)
    write_diagram_csv(b, d_full)
    code = main(["compare", str(a), str(b), "--alpha", "mult:1.5", "--out", str(tmp_path)])
    assert code == 0
    assert "PASS" in capsys.readouterr().out


def test_cmd_compare_usage_error(tmp_path):
    code = main(["compare", str(tmp_path / "missing_a.csv"), str(tmp_path / "missing_b.csv"),
                 "--out", str(tmp_path)])
    assert code == 2


def test_unknown_command_exits_2():
    assert main(["frobnicate"]) == 2
