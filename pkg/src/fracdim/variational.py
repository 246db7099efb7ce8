"""Entropy objective and a brute-force maximizer over the constraint surface.

The dimension equals the maximum of ``psi(x) + min(0, phi(x))`` over
nonnegative ``x`` with ``h(x) = 1``. The maximizer here makes no use of
the case analysis in :mod:`fracdim.dimension`, which is what makes it a
useful cross-check.

All objective functions act on the last axis, so a 2-D array of points is
evaluated row by row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, LengthMismatch
from .model import Problem

REFINE_DIAMETER = 1e-6
REFINE_HALF_WIDTH = 4


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmax: np.ndarray
    grid_resolution: int


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log(safe), 0.0)


def psi(x) -> float:
    """``sum_i x_i (log sum_j x_j - log x_i)`` with ``0 log 0 = 0``."""
    x = np.asarray(x, dtype=float)
    total = x.sum(axis=-1)
    return _xlogx(total) - _xlogx(x).sum(axis=-1)


def _check_len(problem: Problem, x: np.ndarray):
    if x.shape[-1] != problem.n_maps:
        raise LengthMismatch(f"vector of length {x.shape[-1]} for {problem.n_maps} maps")


def phi(problem: Problem, x) -> float:
    """``sum_i x_i log(M p_i)``."""
    x = np.asarray(x, dtype=float)
    _check_len(problem, x)
    return x @ problem.log_mp


def h(problem: Problem, x) -> float:
    """``-sum_i x_i log r_i``; positive whenever ``x`` is nonzero."""
    x = np.asarray(x, dtype=float)
    _check_len(problem, x)
    return -(x @ problem.log_ratios)


def objective(problem: Problem, x) -> float:
    return psi(x) + np.minimum(0.0, phi(problem, x))


def _direction_value(problem: Problem, alpha: np.ndarray) -> np.ndarray:
    # objective is positively homogeneous, so its value at alpha / h(alpha)
    # is objective(alpha) / h(alpha)
    return objective(problem, alpha) / h(problem, alpha)


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``, in lex order."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    if parts == 2:
        k = np.arange(total + 1, dtype=np.int64)
        return np.column_stack([k, total - k])
    blocks = []
    for k in range(total + 1):
        rest = _compositions(total - k, parts - 1)
        blocks.append(np.column_stack([np.full(len(rest), k, dtype=np.int64), rest]))
    return np.concatenate(blocks)


def default_resolution(n_maps: int) -> int:
    if n_maps <= 3:
        return 1000
    if n_maps == 4:
        return 200
    return 50


def maximize_on_surface(problem: Problem, grid_resolution: int | None = None) -> OracleResult:
    """Grid search for the constrained maximum, followed by local refinement.

    Directions ``alpha`` run over a regular grid on the probability simplex
    with ``grid_resolution`` subdivisions per axis; each is mapped onto the
    surface ``h = 1`` by scaling. The best grid point is then refined by
    repeatedly halving the grid spacing in a small window around it until
    the spacing drops below ``1e-6``. Ties go to the lexicographically
    smallest direction.
    """
    if grid_resolution is None:
        grid_resolution = default_resolution(problem.n_maps)
    if grid_resolution < 2:
        raise GridTooCoarse(f"grid_resolution must be >= 2, got {grid_resolution}")
    n = problem.n_maps
    res = int(grid_resolution)

    best_val = -np.inf
    best_alpha = None
    for k in range(res + 1):
        rest = _compositions(res - k, n - 1)
        alpha = np.column_stack([np.full(len(rest), k), rest]) / res
        vals = _direction_value(problem, alpha)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_alpha = float(vals[j]), alpha[j]

    offsets = np.array(
        list(itertools.product(range(-REFINE_HALF_WIDTH, REFINE_HALF_WIDTH + 1), repeat=n - 1)),
        dtype=float,
    )
    step = 1.0 / res
    while step >= REFINE_DIAMETER:
        step /= 2
        head = best_alpha[:-1] + step * offsets
        tail = 1.0 - head.sum(axis=1)
        cand = np.column_stack([head, tail])
        cand = cand[(cand >= 0).all(axis=1)]
        vals = _direction_value(problem, cand)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_alpha = float(vals[j]), cand[j]

    x = best_alpha / h(problem, best_alpha)
    return OracleResult(float(objective(problem, x)), x, res)
