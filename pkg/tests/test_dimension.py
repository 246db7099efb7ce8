import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdim import (
    CaseTag,
    classify,
    dimension,
    solve_critical_pair,
    solve_moran,
    solve_weighted_moran,
    validate,
)
from fracdim.dimension import condition_sums
from fracdim.errors import WrongCase
from fracdim.special import homogeneous_dimension, two_map_s_hat
from fracdim.variational import h, phi

import oracles

LOG2_LOG3 = math.log(2) / math.log(3)


def fig(p):
    return validate([0.2, 0.7], [p, 1 - p], 2)


@pytest.mark.parametrize(
    "ratios, expected",
    [([1 / 3, 1 / 3], LOG2_LOG3), ([0.2, 0.7], 0.8398), ([0.5, 0.5], 1.0)],
)
def test_moran_examples(ratios, expected):
    assert solve_moran(ratios) == pytest.approx(expected, abs=5e-5)


@settings(max_examples=50)
@given(st.lists(st.floats(0.01, 0.95), min_size=2, max_size=6))
def test_moran_matches_bisection(ratios):
    s0 = solve_moran(ratios)
    assert s0 == pytest.approx(oracles.moran_by_bisection(ratios), abs=1e-10)
    assert math.fsum(r**s0 for r in ratios) == pytest.approx(1.0, abs=1e-11)


@pytest.mark.parametrize("probs", [[0.5, 0.5], [0.1, 0.9], [0.8, 0.2]])
def test_weighted_moran_homogeneous(probs):
    assert solve_weighted_moran(validate([1 / 3, 1 / 3], probs, 2)) == pytest.approx(LOG2_LOG3, abs=1e-12)


def test_weighted_moran_examples():
    assert solve_weighted_moran(fig(0.6)) == pytest.approx(0.7145, abs=5e-5)
    assert solve_weighted_moran(fig(0.5)) == pytest.approx(solve_moran([0.2, 0.7]), abs=1e-12)


def test_weighted_moran_matches_bisection():
    p = validate([0.2, 0.45, 0.7], [0.2, 0.3, 0.5], 3)
    expected = oracles.moran_by_bisection(p.ratios, p.probs, 1 / 3)
    assert solve_weighted_moran(p) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize(
    "p, case",
    [(0.3, CaseTag.MAX_ENTROPY), (0.6, CaseTag.WEIGHTED_MORAN), (0.05, CaseTag.CRITICAL_PAIR)],
)
def test_classify_figure(p, case):
    assert classify(fig(p)) is case


@pytest.mark.parametrize("ratios", [[0.2, 0.7], [1 / 3, 1 / 3], [0.05, 0.9]])
def test_classify_uniform(ratios):
    assert classify(validate(ratios, [0.5, 0.5], 2)) is CaseTag.DEGENERATE_UNIFORM


def test_case_labels():
    assert str(CaseTag.CRITICAL_PAIR) == "CriticalPair"
    assert {str(c) for c in CaseTag} == {"MaxEntropy", "WeightedMoran", "CriticalPair", "DegenerateUniform"}


def test_classification_agrees_with_condition_signs():
    for p in np.linspace(0.01, 0.99, 41):
        prob = fig(float(p))
        s0 = solve_moran(prob.ratios)
        large, small = condition_sums(prob, s0, solve_weighted_moran(prob))
        case = classify(prob)
        if case is CaseTag.MAX_ENTROPY:
            assert large >= -1e-10 and small > 1e-10
        elif case is CaseTag.WEIGHTED_MORAN:
            assert small <= 1e-10 and large < -1e-10
        elif case is CaseTag.CRITICAL_PAIR:
            assert large < -1e-10 and small > 1e-10


def _pair_residuals(prob, s, t):
    r, mp = np.asarray(prob.ratios), prob.branching * np.asarray(prob.probs)
    w = r**s * mp**t
    return w.sum() - 1.0, (w * np.log(mp)).sum()


def test_critical_pair_examples():
    s, t = solve_critical_pair(fig(0.05))
    assert s == pytest.approx(0.8326, abs=5e-5)
    assert 0 < t < 1
    assert s == pytest.approx(two_map_s_hat(0.05, 0.2, 0.7), abs=1e-10)
    assert max(abs(v) for v in _pair_residuals(fig(0.05), s, t)) < 1e-10

    s, t = solve_critical_pair(fig(0.95))
    assert s == pytest.approx(0.3924, abs=5e-5)


def test_critical_pair_homogeneous():
    prob = validate([1 / 3, 1 / 3], [0.25, 0.75], 2)
    s, t = solve_critical_pair(prob)
    hom = homogeneous_dimension(2, [0.25, 0.75], 2, 1 / 3)
    assert s == pytest.approx(hom.value, abs=1e-10)
    assert t == pytest.approx(hom.lam, abs=1e-9)
    assert s == pytest.approx(0.59936, abs=5e-6)


def test_critical_pair_wrong_case():
    with pytest.raises(WrongCase):
        solve_critical_pair(fig(0.3))


def test_dimension_cantor():
    res = dimension(validate([1 / 3, 1 / 3], [0.5, 0.5], 2))
    assert res.case is CaseTag.DEGENERATE_UNIFORM
    assert res.value == pytest.approx(LOG2_LOG3, abs=1e-12)
    assert res.beta == pytest.approx([1 / (2 * math.log(3))] * 2, abs=1e-12)
    assert res.t_hat is None


def test_dimension_critical_pair():
    res = dimension(fig(0.9))
    assert res.case is CaseTag.CRITICAL_PAIR
    assert res.value == pytest.approx(0.4558, abs=5e-5)
    assert 0 < res.t_hat < 1
    assert abs(phi(fig(0.9), res.beta)) <= 1e-8


def test_dimension_weighted_moran():
    res = dimension(fig(0.7))
    assert res.case is CaseTag.WEIGHTED_MORAN
    assert res.value == pytest.approx(0.6171, abs=5e-5)
    assert res.value == res.s_tilde


@pytest.mark.parametrize(
    "p, expected",
    [(0.05, 0.8326), (0.3, 0.8398), (0.6, 0.7145), (0.64, 0.6726), (0.7, 0.6171),
     (0.84, 0.5104), (0.9, 0.4558), (0.95, 0.3924), (0.99, 0.2954)],
)
def test_dimension_figure_curve(p, expected):
    assert dimension(fig(p)).value == pytest.approx(expected, abs=1e-4)


probs3 = st.lists(st.floats(0.02, 1.0), min_size=3, max_size=3).map(lambda v: [x / sum(v) for x in v])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.02, 0.9), min_size=3, max_size=3), probs3, st.integers(2, 5))
def test_dimension_postconditions(ratios, probs, m):
    prob = validate(ratios, probs, m)
    res = dimension(prob)
    assert 0 < res.value <= res.s0 + 1e-12
    assert h(prob, res.beta) == pytest.approx(1.0, abs=1e-8)
    if res.case in (CaseTag.MAX_ENTROPY, CaseTag.DEGENERATE_UNIFORM):
        assert res.value == pytest.approx(res.s0, abs=1e-10)
    elif res.case is CaseTag.WEIGHTED_MORAN:
        assert res.value == pytest.approx(res.s_tilde, abs=1e-10)
    else:
        assert abs(phi(prob, res.beta)) <= 1e-8
        assert 0 < res.t_hat < 1
        assert max(abs(v) for v in _pair_residuals(prob, res.value, res.t_hat)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 0.9), st.floats(0.02, 0.98), st.integers(2, 4))
def test_dimension_is_permutation_invariant(r, p1, m):
    a = dimension(validate([0.3, r], [p1, 1 - p1], m))
    b = dimension(validate([r, 0.3], [1 - p1, p1], m))
    assert a.value == pytest.approx(b.value, abs=1e-10)
    assert a.case is b.case
