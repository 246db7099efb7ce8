"""Closed-form almost-sure dimension via the three-case analysis.

Notation used throughout:

* ``s0``      root of ``sum r_i^s = 1`` (dimension of the full attractor)
* ``s_tilde`` root of ``sum p_i r_i^s = 1/M``
* ``(s_hat, t_hat)`` the critical pair solving
  ``sum r_i^s (M p_i)^t = 1`` and ``sum r_i^s (M p_i)^t log(M p_i) = 0``

The sign of ``sum r_i^s0 log(M p_i)`` and of ``sum p_i r_i^s_tilde log(M p_i)``
decides which of the three applies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import roots
from .errors import InconsistentResult, NoConvergence, WrongCase
from .model import Problem

EQUALITY_MARGIN = 1e-10
INNER_TOL = 1e-13
OUTER_XTOL = 1e-12
PAIR_TOL = 1e-10


class CaseTag(enum.Enum):
    MAX_ENTROPY = "MaxEntropy"
    WEIGHTED_MORAN = "WeightedMoran"
    CRITICAL_PAIR = "CriticalPair"
    DEGENERATE_UNIFORM = "DegenerateUniform"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DimensionResult:
    case: CaseTag
    value: float
    beta: np.ndarray
    s0: float
    s_tilde: float
    t_hat: Optional[float] = None


def solve_moran(ratios: Sequence[float], tol: float = 1e-12) -> float:
    """Similarity dimension ``s0`` with ``sum r_i^s0 = 1``."""
    r = np.asarray(ratios, dtype=float)
    lr = np.log(r)
    # the bound is exact for homogeneous ratios; nudge it so the bracket changes sign
    hi = math.log(len(r)) / -lr.max() * (1 + 1e-9) + 1e-12

    def f(s):
        return float(np.exp(s * lr).sum()) - 1.0

    def fp(s):
        return float((np.exp(s * lr) * lr).sum())

    return float(roots.solve_monotone(f, 0.0, hi, fp, tol=tol))


def _weighted_moran(ratios, probs, branching, s0: float, tol: float) -> float:
    lr = np.log(np.asarray(ratios, dtype=float))
    p = np.asarray(probs, dtype=float)
    target = 1.0 / branching

    def f(s):
        return float((p * np.exp(s * lr)).sum()) - target

    def fp(s):
        return float((p * np.exp(s * lr) * lr).sum())

    lo, hi = roots.expand_bracket(f, -1.0, s0 + 1.0)
    return float(roots.solve_monotone(f, lo, hi, fp, tol=tol))


def solve_weighted_moran(problem: Problem, tol: float = 1e-12) -> float:
    """``s_tilde`` with ``sum p_i r_i^s_tilde = 1/M``."""
    s0 = solve_moran(problem.ratios, tol=tol)
    return _weighted_moran(problem.ratios, problem.probs, problem.branching, s0, tol)


def condition_sums(problem: Problem, s0: float, s_tilde: float) -> tuple[float, float]:
    """The two signed sums deciding the case: ``(sum r^s0 log Mp, sum p r^s_tilde log Mp)``."""
    lr, lmp = problem.log_ratios, problem.log_mp
    p = np.asarray(problem.probs)
    large = float((np.exp(s0 * lr) * lmp).sum())
    small = float((p * np.exp(s_tilde * lr) * lmp).sum())
    return large, small


def _classify(large: float, small: float) -> CaseTag:
    large_holds = large >= -EQUALITY_MARGIN
    small_holds = small <= EQUALITY_MARGIN
    if large_holds and small_holds:
        return CaseTag.DEGENERATE_UNIFORM
    if large_holds:
        return CaseTag.MAX_ENTROPY
    if small_holds:
        return CaseTag.WEIGHTED_MORAN
    return CaseTag.CRITICAL_PAIR


def classify(problem: Problem, tol: float = 1e-12) -> CaseTag:
    s0 = solve_moran(problem.ratios, tol=tol)
    s_tilde = _weighted_moran(problem.ratios, problem.probs, problem.branching, s0, tol)
    return _classify(*condition_sums(problem, s0, s_tilde))


class _Curve:
    """The curve ``g(t)``: the ``s`` solving ``sum r_i^s (M p_i)^t = 1``."""

    def __init__(self, problem: Problem, s0: float):
        self.lr = problem.log_ratios
        self.lmp = problem.log_mp
        self.s0 = s0

    def weights(self, s, t):
        return np.exp(s * self.lr + t * self.lmp)

    def g(self, t: float) -> float:
        lr, lmp = self.lr, self.lmp

        def f(s):
            return float(np.exp(s * lr + t * lmp).sum()) - 1.0

        def fp(s):
            return float((np.exp(s * lr + t * lmp) * lr).sum())

        lo, hi = roots.expand_bracket(f, -1.0, self.s0 + 1.0)
        return roots.solve_monotone(f, lo, hi, fp, tol=INNER_TOL)

    def slope_sign(self, t: float) -> float:
        # g'(t) = -G2 / sum w log r and the denominator is negative, so the
        # sign of g' is the sign of G2 at (g(t), t)
        s = self.g(t)
        return float((self.weights(s, t) * self.lmp).sum())

    def slope(self, t: float) -> float:
        s = self.g(t)
        w = self.weights(s, t)
        return -float((w * self.lmp).sum()) / float((w * self.lr).sum())


def _pair_residuals(curve: _Curve, s: float, t: float) -> tuple[float, float]:
    w = curve.weights(s, t)
    return float(w.sum()) - 1.0, float((w * curve.lmp).sum())


def _newton_pair(curve: _Curve, s: float, t: float, steps: int = 5) -> tuple[float, float]:
    lr, lmp = curve.lr, curve.lmp
    res = np.array(_pair_residuals(curve, s, t))
    for _ in range(steps):
        norm = np.abs(res).max()
        if norm == 0.0:
            break
        w = curve.weights(s, t)
        jac = np.array(
            [
                [(w * lr).sum(), (w * lmp).sum()],
                [(w * lr * lmp).sum(), (w * lmp * lmp).sum()],
            ]
        )
        try:
            ds, dt = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            break
        cand = np.array(_pair_residuals(curve, s + ds, t + dt))
        if not np.abs(cand).max() < norm:
            break
        s, t, res = s + ds, t + dt, cand
    return s, t


def _critical_pair(problem: Problem, s0: float) -> tuple[float, float]:
    curve = _Curve(problem, s0)
    if not (curve.slope_sign(0.0) < 0 < curve.slope_sign(1.0)):
        raise NoConvergence("g' does not change sign on [0, 1]")
    t_hat = roots.bisect(curve.slope_sign, 0.0, 1.0, xtol=OUTER_XTOL)
    s_hat = curve.g(t_hat)
    s_hat, t_hat = _newton_pair(curve, s_hat, t_hat)
    r1, r2 = _pair_residuals(curve, s_hat, t_hat)
    if max(abs(r1), abs(r2)) > PAIR_TOL:
        raise NoConvergence(f"critical pair residuals ({r1:.2e}, {r2:.2e}) too large")
    return float(s_hat), float(t_hat)


def solve_critical_pair(problem: Problem, tol: float = 1e-12) -> tuple[float, float]:
    """Return ``(s_hat, t_hat)``; only defined in the critical-pair case.

    ``t_hat`` is located where the convex curve ``g`` has zero slope,
    by bisection on the sign of ``g'`` over ``[0, 1]``.
    """
    s0 = solve_moran(problem.ratios, tol=tol)
    s_tilde = _weighted_moran(problem.ratios, problem.probs, problem.branching, s0, tol)
    case = _classify(*condition_sums(problem, s0, s_tilde))
    if case is not CaseTag.CRITICAL_PAIR:
        raise WrongCase(f"problem is in case {case}, not {CaseTag.CRITICAL_PAIR}")
    return _critical_pair(problem, s0)


def _normalized(w: np.ndarray, lr: np.ndarray) -> np.ndarray:
    # scale so that h(beta) = -sum beta_i log r_i = 1
    return -w / float((w * lr).sum())


def dimension(problem: Problem, tol: float = 1e-12) -> DimensionResult:
    """Almost-sure Hausdorff (= box) dimension with its optimizer vector."""
    lr = problem.log_ratios
    p = np.asarray(problem.probs)
    s0 = solve_moran(problem.ratios, tol=tol)
    s_tilde = _weighted_moran(problem.ratios, problem.probs, problem.branching, s0, tol)
    case = _classify(*condition_sums(problem, s0, s_tilde))
    t_hat = None
    if case in (CaseTag.MAX_ENTROPY, CaseTag.DEGENERATE_UNIFORM):
        value = s0
        beta = _normalized(np.exp(s0 * lr), lr)
    elif case is CaseTag.WEIGHTED_MORAN:
        value = s_tilde
        beta = _normalized(p * np.exp(s_tilde * lr), lr)
    else:
        value, t_hat = _critical_pair(problem, s0)
        beta = _normalized(np.exp(value * lr + t_hat * problem.log_mp), lr)
    if not value > 0:
        raise InconsistentResult(f"computed dimension {value} is not positive ({case})")
    return DimensionResult(
        case, float(value), beta, float(s0), float(s_tilde), None if t_hat is None else float(t_hat)
    )
