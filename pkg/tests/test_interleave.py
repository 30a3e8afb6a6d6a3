import numpy as np
import pytest

from dowker_sparse import (INF, PersistenceDiagram, MatchingCertificate, alpha_trivial,
                           find_matching, check_certificate, identity, multiplicative,
                           additive)


def random_diagram(rng, n_classes=12, dims=(0, 1)):
    classes = []
    for _ in range(n_classes):
        dim = int(rng.choice(dims))
        b = float(rng.uniform(0, 2))
        if rng.uniform() < 0.2:
            d = INF
        else:
            d = b + float(rng.uniform(0.01, 2))
        classes.append((dim, b, d))
    return PersistenceDiagram(tuple(sorted(classes)))


def shrink_within(rng, diagram, c):
    # derived diagram whose intervals nest inside the originals within slack c
    classes = []
    for dim, b, d in diagram.classes:
        bp = b * float(rng.uniform(1 / c, 1.0))
        if d == INF:
            dp = INF
        else:
            dp = max(d * float(rng.uniform(1 / c, 1.0)), np.nextafter(bp, INF))
        if bp < dp:
            classes.append((dim, bp, dp))
    return PersistenceDiagram(tuple(sorted(classes)))


def test_alpha_trivial_examples():
    assert alpha_trivial(1.0, 2.0, multiplicative(3)) is True
    assert alpha_trivial(1.0, 4.0, multiplicative(3)) is False
    assert alpha_trivial(1.0, INF, multiplicative(3)) is False
    assert alpha_trivial(1.0, INF, identity()) is False


def test_alpha_trivial_requires_interval():
    with pytest.raises(ValueError):
        alpha_trivial(2.0, 2.0, identity())


def test_identity_matching_on_equal_diagrams():
    rng = np.random.default_rng(40)
    d = random_diagram(rng)
    res = find_matching(d, d, identity())
    assert res.ok
    assert len(res.pairs) == len(d.classes)
    for i, j in res.pairs:
        assert d.classes[i] == d.classes[j]
    assert check_certificate(d, d, identity(), res) is None


def test_derived_single_pair():
    d1 = PersistenceDiagram(((0, 0.5, 4.0),))
    d2 = PersistenceDiagram(((0, 0.25, 3.0),))
    res = find_matching(d1, d2, multiplicative(2))
    assert res.ok
    assert res.pairs == ((0, 0),)
    assert check_certificate(d1, d2, multiplicative(2), res) is None


def test_failure_witness():
    d1 = PersistenceDiagram(((0, 0.0, 10.0),))
    d2 = PersistenceDiagram(())
    res = find_matching(d1, d2, multiplicative(2))
    assert not res.ok
    assert res.side == "left"
    assert res.cls == (0, 0.0, 10.0)


def test_dimension_mismatch_fails():
    d1 = PersistenceDiagram(((1, 0.0, 10.0),))
    d2 = PersistenceDiagram(((0, 0.0, 10.0),))
    res = find_matching(d1, d2, multiplicative(2))
    assert not res.ok


def test_trivial_classes_may_stay_unmatched():
    d1 = PersistenceDiagram(((0, 1.0, 1.5),))
    d2 = PersistenceDiagram(())
    res = find_matching(d1, d2, multiplicative(2))
    assert res.ok
    assert res.pairs == ()
    assert res.unmatched_trivial_left == (0,)
    assert check_certificate(d1, d2, multiplicative(2), res) is None


def test_symmetric_sanity_random_diagrams():
    rng = np.random.default_rng(41)
    for alpha in (identity(), multiplicative(1.3), additive(0.2)):
        for _ in range(15):
            d = random_diagram(rng, n_classes=int(rng.integers(0, 20)))
            res = find_matching(d, d, alpha)
            assert res.ok
            assert check_certificate(d, d, alpha, res) is None


def test_certificate_soundness_on_derived_pairs():
    rng = np.random.default_rng(42)
    for _ in range(15):
        d1 = random_diagram(rng)
        c = float(rng.uniform(1.5, 3.0))
        d2 = shrink_within(rng, d1, c)
        res = find_matching(d1, d2, multiplicative(c))
        if res.ok:
            assert check_certificate(d1, d2, multiplicative(c), res) is None


def test_monotone_in_slack():
    # success at c implies success at any c' >= c
    rng = np.random.default_rng(43)
    outcomes = []
    for _ in range(30):
        d1 = random_diagram(rng, n_classes=8)
        d2 = shrink_within(rng, d1, 1.6)
        cs = [1.2, 1.6, 2.0, 3.0]
        oks = [find_matching(d1, d2, multiplicative(c)).ok for c in cs]
        for a, b in zip(oks, oks[1:]):
            assert (not a) or b
        outcomes.append(oks)
    # the family of instances must exercise both outcomes somewhere
    assert any(o[0] for o in outcomes) or any(o[-1] for o in outcomes)
    assert any(not o[0] for o in outcomes)


def test_required_coverage_with_decoys():
    # a nontrivial left class must not lose its only partner to a trivial one
    d1 = PersistenceDiagram(((0, 0.1, 0.12), (0, 0.1, 10.0)))
    d2 = PersistenceDiagram(((0, 0.1, 9.0),))
    alpha = multiplicative(2)
    res = find_matching(d1, d2, alpha)
    assert res.ok
    assert (1, 0) in res.pairs
    assert check_certificate(d1, d2, alpha, res) is None


def test_merge_covers_required_on_both_sides():
    # left-required and right-required classes compete for partners
    d1 = PersistenceDiagram(((0, 0.0, 4.0), (0, 0.0, 5.0)))
    d2 = PersistenceDiagram(((0, 0.0, 4.0), (0, 0.0, 3.9)))
    alpha = multiplicative(100.0)
    res = find_matching(d1, d2, alpha)
    assert res.ok
    assert check_certificate(d1, d2, alpha, res) is None


def test_check_certificate_rejects_bad_pairs():
    d1 = PersistenceDiagram(((0, 0.5, 4.0),))
    d2 = PersistenceDiagram(((0, 0.25, 3.0),))
    bad = MatchingCertificate(((0, 0), (0, 0)), (), ())
    assert check_certificate(d1, d2, multiplicative(2), bad) is not None
    not_covering = MatchingCertificate((), (), ())
    assert check_certificate(d1, d2, multiplicative(2), not_covering) is not None
    wrong_constraint = MatchingCertificate(((0, 0),), (), ())
    assert check_certificate(d1, d2, multiplicative(1.01), wrong_constraint) is not None
