import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdim.dimension import dimension, solve_moran
from fracdim.errors import GridTooCoarse
from fracdim.model import validate
from fracdim.variational import h, maximize_on_surface, objective, phi, psi

import oracles

FIG_RATIOS = [0.2, 0.7]


def test_psi_examples():
    assert psi([1, 0]) == 0.0
    assert psi([1, 1]) == pytest.approx(2 * math.log(2), abs=1e-14)
    assert psi([2, 6]) == pytest.approx(8 * math.log(8) - 2 * math.log(2) - 6 * math.log(6), abs=1e-12)
    assert psi([2, 6]) == pytest.approx(4.4987, abs=1e-4)


def test_phi_examples():
    uniform = validate([0.2, 0.7], [0.5, 0.5], 2)
    assert phi(uniform, [0.3, 1.7]) == 0.0
    assert phi(validate([0.2, 0.7], [0.3, 0.7], 2), [1, 0]) == pytest.approx(math.log(0.6), abs=1e-14)
    assert phi(validate([0.2, 0.7], [0.2, 0.8], 3), [1, 1]) == pytest.approx(0.3646, abs=1e-4)


def test_h_examples():
    e = validate([1 / math.e, 1 / math.e], [0.5, 0.5], 2)
    assert h(e, [1, 0]) == pytest.approx(1.0, abs=1e-15)
    cantor = validate([1 / 3, 1 / 3], [0.5, 0.5], 2)
    assert h(cantor, [1, 1]) == pytest.approx(2 * math.log(3), abs=1e-14)
    assert h(validate([0.2, 0.7], [0.5, 0.5], 2), [0.5, 0.5]) == pytest.approx(0.9831, abs=1e-4)


def test_objective_examples():
    for n in (2, 3, 4):
        p = validate([0.3] * n, [1 / n] * n, n)
        assert objective(p, np.ones(n)) == pytest.approx(n * math.log(n), abs=1e-12)
    assert objective(validate([0.2, 0.7], [0.3, 0.7], 2), [1, 0]) == pytest.approx(math.log(0.6), abs=1e-14)


def test_objective_at_moran_optimizer():
    p = validate([0.2, 0.7], [0.5, 0.5], 2)
    s0 = solve_moran(p.ratios)
    x = np.array([0.2**s0, 0.7**s0])
    x /= h(p, x)
    assert objective(p, x) == pytest.approx(s0, abs=1e-12)
    assert s0 == pytest.approx(0.8398, abs=5e-5)


def test_psi_is_homogeneous():
    x = np.array([0.3, 1.1, 2.0])
    assert psi(3.5 * x) == pytest.approx(3.5 * psi(x), rel=1e-13)


def test_oracle_cantor():
    res = maximize_on_surface(validate([1 / 3, 1 / 3], [0.5, 0.5], 2), 1000)
    assert res.value == pytest.approx(math.log(2) / math.log(3), abs=1e-4)


@pytest.mark.parametrize("probs, expected", [([0.6, 0.4], 0.7145), ([0.05, 0.95], 0.8326)])
def test_oracle_figure_points(probs, expected):
    p = validate(FIG_RATIOS, probs, 2)
    res = maximize_on_surface(p, 1000)
    assert res.value == pytest.approx(expected, abs=1e-3)
    assert res.value == pytest.approx(dimension(p).value, abs=1e-3)


def test_oracle_postconditions():
    p = validate([0.2, 0.5, 0.7], [0.2, 0.5, 0.3], 2)
    res = maximize_on_surface(p, 200)
    x = np.asarray(res.argmax)
    assert h(p, x) == pytest.approx(1.0, abs=1e-8)
    assert res.value == pytest.approx(psi(x) + min(0.0, phi(p, x)), abs=1e-12)
    assert res.grid_resolution == 200


def test_oracle_matches_plain_grid():
    # refinement can only improve on the plain grid maximum
    ratios, probs = [0.25, 0.6], [0.7, 0.3]
    p = validate(ratios, probs, 2)
    plain = oracles.simplex_grid_max(ratios, probs, 2, 400)
    assert maximize_on_surface(p, 400).value >= plain - 1e-12


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        maximize_on_surface(validate([0.2, 0.7], [0.5, 0.5], 2), 1)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.05, 0.9),
    st.floats(0.05, 0.9),
    st.floats(0.05, 0.95),
    st.integers(2, 4),
)
def test_oracle_never_exceeds_closed_form(r1, r2, p1, m):
    p = validate([r1, r2], [p1, 1 - p1], m)
    res = maximize_on_surface(p, 300)
    closed = dimension(p).value
    assert res.value <= closed + 1e-9
    assert res.value == pytest.approx(closed, abs=2e-3)
