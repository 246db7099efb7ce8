"""Bracketed bisection with an optional Newton polish.

Every scalar equation solved in this package is monotone on a known
interval, so plain bisection always converges; Newton only adds the last
few digits and is discarded whenever it fails to shrink the residual.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import NoConvergence

MAX_ITER = 200


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 0.0,
    max_iter: int = MAX_ITER,
) -> float:
    """Root of ``f`` on ``[lo, hi]`` where ``f(lo)`` and ``f(hi)`` differ in sign.

    Runs until the bracket is narrower than ``xtol`` or can no longer be
    split in floating point. Returns whichever endpoint has the smaller
    residual.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoConvergence(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= min(lo, hi) or mid >= max(lo, hi) or abs(hi - lo) <= xtol:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    else:
        raise NoConvergence(f"bisection did not converge in {max_iter} iterations")
    return lo if abs(flo) <= abs(fhi) else hi


def polish(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    x: float,
    steps: int = 5,
) -> float:
    """Up to ``steps`` Newton iterations, each kept only if ``|f|`` drops."""
    fx = f(x)
    for _ in range(steps):
        if fx == 0.0:
            break
        d = fprime(x)
        if d == 0.0 or not math.isfinite(d):
            break
        cand = x - fx / d
        fc = f(cand)
        if not abs(fc) < abs(fx):
            break
        x, fx = cand, fc
    return x


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    decreasing: bool = True,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Widen ``[lo, hi]`` geometrically until a monotone ``f`` changes sign."""
    sign = 1.0 if decreasing else -1.0
    width = hi - lo
    for _ in range(max_iter):
        if sign * f(lo) >= 0:
            break
        lo -= width
        width *= 2
    else:
        raise NoConvergence("could not find lower bracket endpoint")
    width = hi - lo
    for _ in range(max_iter):
        if sign * f(hi) <= 0:
            break
        hi += width
        width *= 2
    else:
        raise NoConvergence("could not find upper bracket endpoint")
    return lo, hi


def solve_monotone(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    fprime: Optional[Callable[[float], float]] = None,
    tol: float = 1e-12,
    xtol: float = 0.0,
) -> float:
    """Bisect then polish; raise :class:`NoConvergence` if ``|f(root)| > tol``."""
    x = bisect(f, lo, hi, xtol=xtol)
    if fprime is not None:
        x = polish(f, fprime, x)
    if not abs(f(x)) <= tol:
        raise NoConvergence(f"residual {f(x):.3e} exceeds tolerance {tol:.1e}")
    return x
