"""Closed forms for homogeneous systems and for two maps on the binary tree.

For two maps, ``p`` always denotes the probability of the label attached
to the smaller ratio ``r1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import roots
from .dimension import CaseTag, _weighted_moran, solve_moran
from .errors import (
    InvalidRatio,
    LengthMismatch,
    NoConvergence,
    POutOfRange,
    RatiosNotOrdered,
    SingularAtHalf,
)

XI_SERIES_RADIUS = 1e-8
REGIME_MARGIN = 1e-10
THRESHOLD_TOL = 1e-12
SWEEP_RANGE = (0.002, 0.998)


class Regime(enum.Enum):
    SATURATED_M = "Saturated_M"
    INTERIOR = "Interior"
    SATURATED_N = "Saturated_N"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class HomogeneousResult:
    rho: float
    lam: Optional[float]
    regime: Regime
    L: float
    U: float
    value: float


@dataclass(frozen=True)
class TwoMapThresholds:
    p_star: float
    p_star_upper: float
    s0: float
    s_tilde_upper: float

    def lower_residual(self, r1: float, r2: float) -> float:
        """``log(2p) + (r2/r1)^s0 log(2(1-p))`` at ``p_star``."""
        p = self.p_star
        return math.log(2 * p) + (r2 / r1) ** self.s0 * math.log(2 * (1 - p))

    def upper_residuals(self, r1: float, r2: float) -> tuple[float, float]:
        """Residuals of the two-equation system characterizing ``p_star_upper``."""
        p, s = self.p_star_upper, self.s_tilde_upper
        a, b = p * r1**s, (1 - p) * r2**s
        return a + b - 0.5, a * math.log(p) + b * math.log(1 - p) + 0.5 * math.log(2)


@dataclass(frozen=True)
class SweepRow:
    p: float
    value: float
    case: CaseTag


def _check_ratio(r: float):
    if not 0.0 < r < 1.0:
        raise InvalidRatio(f"ratio {r} is not in (0, 1)")


def _check_p(p: float):
    if not 0.0 < p < 1.0:
        raise POutOfRange(f"p = {p} is not in (0, 1)")


def _check_ordered(r1: float, r2: float):
    _check_ratio(r1)
    _check_ratio(r2)
    if not r1 < r2:
        raise RatiosNotOrdered(f"need r1 < r2, got r1={r1}, r2={r2}")


def homogeneous_dimension(n_maps: int, probs: Sequence[float], branching: int, r: float) -> HomogeneousResult:
    """Dimension ``-log(rho)/log(r)`` when every map has ratio ``r``."""
    _check_ratio(r)
    p = np.asarray(probs, dtype=float)
    if len(p) != n_maps:
        raise LengthMismatch(f"{len(p)} probabilities for {n_maps} maps")
    if np.any(p <= 0) or np.any(p >= 1):
        raise POutOfRange("probabilities must lie in (0, 1)")
    logp = np.log(p)
    L = math.exp(-float((p * logp).sum()))
    U = math.exp(-float(logp.sum()) / n_maps)
    M = branching
    lam = None
    if M >= U - REGIME_MARGIN:
        regime, rho = Regime.SATURATED_N, float(n_maps)
    elif M <= L + REGIME_MARGIN:
        regime, rho = Regime.SATURATED_M, float(M)
    else:
        regime = Regime.INTERIOR
        lmp = np.log(M * p)

        def f(t):
            return float((np.exp(t * logp) * lmp).sum())

        def fp(t):
            return float((np.exp(t * logp) * logp * lmp).sum())

        lam = roots.solve_monotone(f, 0.0, 1.0, fp, tol=1e-13)
        rho = float(np.exp(lam * lmp).sum())
    return HomogeneousResult(rho, lam, regime, L, U, -math.log(rho) / math.log(r))


def xi(p: float) -> float:
    """``log(2p) / (log p - log(1-p))``, continued by ``xi(1/2) = 1/2``."""
    _check_p(p)
    d = p - 0.5
    if d == 0.0:
        return 0.5
    if abs(d) < XI_SERIES_RADIUS:
        # the quadratic term vanishes; error is O(d^3)
        return 0.5 - 0.5 * d
    num = math.log1p(2 * d) if abs(d) < 0.25 else math.log(2 * p)
    return num / math.log(p / (1 - p))


def _plogp(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def two_map_homogeneous_dimension(p: float, r: float) -> float:
    _check_ratio(r)
    x = xi(p)
    return (_plogp(x) + _plogp(1 - x)) / math.log(r)


def _g(p: float, a1: float, a2: float) -> float:
    return a1 * math.log(2 * p) + a2 * math.log(2 * (1 - p))


def s_tilde_two_map(p: float, r1: float, r2: float, s0: Optional[float] = None) -> float:
    """Root of ``p r1^s + (1-p) r2^s = 1/2``; ``p`` may be 1."""
    if s0 is None:
        s0 = solve_moran((r1, r2))
    return _weighted_moran((r1, r2), (p, 1 - p), 2, s0, 1e-13)


def g_tilde(p: float, r1: float, r2: float, s0: Optional[float] = None) -> float:
    """Signed condition sum of the weighted-Moran case, as a function of ``p``."""
    s = s_tilde_two_map(p, r1, r2, s0)
    q = 1 - p
    first = p * r1**s * math.log(2 * p)
    second = q * r2**s * math.log(2 * q) if q > 0 else 0.0
    return first + second


def _golden_min(f, lo: float, hi: float, xtol: float = 1e-10) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def two_map_thresholds(r1: float, r2: float) -> TwoMapThresholds:
    """Phase transition points ``p_* < 1/2 < p^*`` for ratios ``r1 < r2``.

    ``p_*`` is the zero in (0, 1/2) of the concave function ``g``, whose
    maximum sits at ``p = r1^s0``. ``p^*`` is the zero in (1/2, 1) of the
    convex function ``g_tilde``, bracketed from the left by its minimizer.
    """
    _check_ordered(r1, r2)
    s0 = solve_moran((r1, r2))
    a1, a2 = r1**s0, r2**s0

    lo = a1 / 2
    while _g(lo, a1, a2) >= 0:
        lo /= 2
        if lo < 1e-300:
            raise NoConvergence("no sign change of g near 0")
    p_star = roots.solve_monotone(lambda p: _g(p, a1, a2), lo, a1, tol=THRESHOLD_TOL)

    gt = lambda p: g_tilde(p, r1, r2, s0)  # noqa: E731
    p_min = _golden_min(gt, 0.5, 1.0)
    if not gt(p_min) < 0:
        raise NoConvergence("g_tilde has no negative values on (1/2, 1)")
    p_upper = roots.solve_monotone(gt, p_min, 1.0, tol=THRESHOLD_TOL)
    return TwoMapThresholds(p_star, p_upper, s0, s_tilde_two_map(p_upper, r1, r2, s0))


def two_map_s_hat(p: float, r1: float, r2: float) -> float:
    """Closed-form critical-pair dimension for two maps on the binary tree."""
    _check_p(p)
    _check_ordered(r1, r2)
    if p == 0.5:
        raise SingularAtHalf("s_hat is undefined at p = 1/2")
    lp, lq = math.log(2 * p), math.log(2 * (1 - p))
    c1 = lq / (math.log(1 - p) - math.log(p))
    c2 = 1 - c1
    num = math.log(c1) * lq - math.log(c2) * lp
    den = math.log(r1) * lq - math.log(r2) * lp
    return num / den


def two_map_dimension(
    p: float, r1: float, r2: float, thresholds: Optional[TwoMapThresholds] = None
) -> tuple[float, CaseTag]:
    _check_p(p)
    if thresholds is None:
        thresholds = two_map_thresholds(r1, r2)
    else:
        _check_ordered(r1, r2)
    th = thresholds
    if p == 0.5:
        return th.s0, CaseTag.DEGENERATE_UNIFORM
    if th.p_star <= p < 0.5:
        return th.s0, CaseTag.MAX_ENTROPY
    if 0.5 < p <= th.p_star_upper:
        return s_tilde_two_map(p, r1, r2, th.s0), CaseTag.WEIGHTED_MORAN
    return two_map_s_hat(p, r1, r2), CaseTag.CRITICAL_PAIR


def sweep_grid(points: int, lo: float = SWEEP_RANGE[0], hi: float = SWEEP_RANGE[1]) -> np.ndarray:
    return np.linspace(lo, hi, points)


def two_map_sweep(r1: float, r2: float, ps: Sequence[float]) -> list[SweepRow]:
    """Dimension curve over increasing ``ps``."""
    th = two_map_thresholds(r1, r2)
    rows = []
    for p in ps:
        value, case = two_map_dimension(float(p), r1, r2, th)
        rows.append(SweepRow(float(p), value, case))
    return rows
