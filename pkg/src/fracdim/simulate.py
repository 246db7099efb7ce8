"""Stopping sets, exact occupancy expectations and branching-walk Monte Carlo.

A word ``w`` belongs to the stopping set at scale ``e^-n`` when its ratio
product has just dropped to ``e^-n`` or below while its parent's has not.
The occupied subset consists of the words carried by at least one tree
path of matching length; its expected size is the sum of the occupancy
probabilities ``a_w``, and its exponential growth rate in ``n`` is the
dimension.

Words are tuples of 1-based letters.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dimension import solve_moran
from .errors import (
    CountOverflow,
    DegenerateFit,
    FrontierTooLarge,
    SetTooLarge,
    ValidationError,
)
from .model import Problem, Word, check_word

STOPPING_SET_CAP = 5_000_000
FRONTIER_CAP = 10_000_000
# ties of the stopping inequality are decided in favour of stopping
STOP_EPS = 1e-12
STREAM_BLOCK = 4096
U64_MAX = 2**64 - 1
I64_MAX = 2**63 - 1
OCCUPANCY_CHUNK = 65536


def _check_scale(n: float) -> float:
    n = float(n)
    if not n > 0 or not math.isfinite(n):
        raise ValidationError(f"scale exponent n must be positive, got {n}")
    return n


def _stop_level(n: float) -> float:
    return -n + STOP_EPS * max(1.0, n)


def estimated_size(problem: Problem, n: float) -> float:
    return math.exp(solve_moran(problem.ratios) * n)


def stopping_set(problem: Problem, n: float, cap: int = STOPPING_SET_CAP) -> list[Word]:
    """All words of the stopping set at scale ``e^-n``, in lexicographic order."""
    n = _check_scale(n)
    estimate = estimated_size(problem, n)
    if estimate > cap:
        raise SetTooLarge(f"stopping set estimated at {estimate:.3g} words (cap {cap})", estimate)
    lr = [math.log(r) for r in problem.ratios]
    level = _stop_level(n)
    letters = range(problem.n_maps, 0, -1)
    out = []
    stack: list[tuple[Word, float]] = [((), 0.0)]
    while stack:
        word, lp = stack.pop()
        for i in letters:
            child, clp = word + (i,), lp + lr[i - 1]
            if clp <= level:
                out.append(child)
            else:
                stack.append((child, clp))
        if len(out) > cap:
            raise SetTooLarge(f"stopping set exceeds cap {cap}", estimate)
    # children were pushed in reverse, so stopped siblings came out reversed
    out.sort()
    return out


def occupancy_probability(problem: Problem, word: Sequence[int]) -> float:
    """Probability that some root path of length ``len(word)`` is labelled ``word``."""
    word = check_word(problem, word)
    M = problem.branching
    a = 1.0
    for i in reversed(word):
        a = 1.0 - (1.0 - problem.probs[i - 1] * a) ** M
    return a


def occupancy_many(problem: Problem, words: Sequence[Word]) -> np.ndarray:
    """Vectorized :func:`occupancy_probability` over a list of words."""
    M = problem.branching
    # a padding letter with probability 1 maps a = 1 to a = 1
    probs = np.concatenate([[1.0], np.asarray(problem.probs)])
    out = np.empty(len(words))
    for start in range(0, len(words), OCCUPANCY_CHUNK):
        chunk = words[start : start + OCCUPANCY_CHUNK]
        width = max((len(w) for w in chunk), default=0)
        idx = np.zeros((len(chunk), width), dtype=np.int64)
        for row, w in enumerate(chunk):
            idx[row, : len(w)] = w
        pmat = probs[idx]
        a = np.ones(len(chunk))
        for col in range(width - 1, -1, -1):
            a = 1.0 - (1.0 - pmat[:, col] * a) ** M
        out[start : start + len(chunk)] = a
    return out


def expected_cover_count(problem: Problem, n: float, cap: int = STOPPING_SET_CAP) -> float:
    """``E #(occupied stopping set)``, the sum of occupancy probabilities over the stopping set."""
    words = stopping_set(problem, n, cap)
    return float(math.fsum(occupancy_many(problem, words)))


def _check_increasing(n_values: Sequence[float], minimum: int) -> np.ndarray:
    ns = np.asarray([float(v) for v in n_values])
    if len(ns) < minimum:
        raise DegenerateFit(f"need at least {minimum} scale values, got {len(ns)}")
    if np.any(np.diff(ns) <= 0):
        raise DegenerateFit("scale values must be strictly increasing")
    return ns


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), y - (slope * x + intercept)


def growth_rate_fit(
    problem: Problem, n_values: Sequence[float], cap: int = STOPPING_SET_CAP
) -> tuple[float, list[float]]:
    """Least-squares slope of ``log E #(occupied stopping set)`` against ``n``."""
    ns = _check_increasing(n_values, 3)
    y = np.array([math.log(expected_cover_count(problem, n, cap)) for n in ns])
    slope, resid = _line_fit(ns, y)
    return slope, [float(v) for v in resid]


@dataclass(frozen=True)
class WalkSample:
    stopped_words: frozenset
    seed: int
    n: float
    depth: int = 0
    births: tuple = field(default=(), repr=False)

    @property
    def stopped_count(self) -> int:
        return len(self.stopped_words)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= U64_MAX:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _stream(seed: int, step: int, block: int) -> np.random.Generator:
    # counter-based: the (step, block) pair selects a disjoint counter range
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, step, block]))


def _binomial(rng: np.random.Generator, trials: np.ndarray, prob: float) -> np.ndarray:
    if prob <= 0.0:
        return np.zeros_like(trials)
    if prob >= 1.0:
        return trials.copy()
    if trials.max(initial=0) <= I64_MAX:
        return rng.binomial(trials.astype(np.int64), prob).astype(np.uint64)
    # counts beyond int64: a sum of independent binomials over a split of the trials
    half = trials // np.uint64(2)
    return _binomial(rng, half, prob) + _binomial(rng, trials - half, prob)


def _multinomial_rows(seed: int, step: int, trials: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Label counts for each frontier entry, as a chain of conditional binomials."""
    n_rows, n_labels = len(trials), len(probs)
    out = np.empty((n_rows, n_labels), dtype=np.uint64)
    tails = [math.fsum(probs[i:]) for i in range(n_labels)]
    for block, start in enumerate(range(0, n_rows, STREAM_BLOCK)):
        rng = _stream(seed, step, block)
        remaining = trials[start : start + STREAM_BLOCK].copy()
        for i in range(n_labels - 1):
            k = _binomial(rng, remaining, min(1.0, probs[i] / tails[i]))
            out[start : start + STREAM_BLOCK, i] = k
            remaining -= k
        out[start : start + STREAM_BLOCK, -1] = remaining
    return out


def _spell(parents: list, depth: int, index: np.ndarray, last: np.ndarray) -> list[Word]:
    """Rebuild words whose final letter is ``last`` and whose parent sits at ``index`` of ``depth``."""
    cols = [last]
    for d in range(depth, 0, -1):
        pidx, letters = parents[d - 1]
        cols.append(letters[index])
        index = pidx[index]
    mat = np.column_stack(cols[::-1]) + 1
    return [tuple(int(v) for v in row) for row in mat]


def run_walk(problem: Problem, n: float, seed: int, frontier_cap: int = FRONTIER_CAP) -> WalkSample:
    """Sample the occupied stopping set by running the branching walk to exhaustion.

    All tree nodes carrying the same word are aggregated into one count;
    their ``M * count`` children receive i.i.d. labels, so the per-label
    child counts are multinomial. Children that satisfy the stopping
    inequality are retired (only their word is kept); the rest form the
    next frontier. Random numbers come from a Philox stream keyed by
    ``seed`` with counter ``(step, block)``, where frontier entries are
    taken in lexicographic order and grouped in fixed blocks.
    """
    n = _check_scale(n)
    seed = _check_seed(seed)
    M = problem.branching
    lr = problem.log_ratios
    probs = np.asarray(problem.probs)
    level = _stop_level(n)

    counts = np.ones(1, dtype=np.uint64)
    logprod = np.zeros(1)
    parents: list[tuple[np.ndarray, np.ndarray]] = []
    stopped: list[Word] = []
    births = []
    step = 0
    while counts.size:
        if int(counts.max()) > U64_MAX // M:
            raise CountOverflow(f"child count would exceed 64 bits at depth {step + 1}")
        trials = counts * np.uint64(M)
        labels = _multinomial_rows(seed, step, trials, probs)
        total = sum(int(c) for c in counts) * M
        if sum(int(v) for v in labels.sum(axis=0)) != total:
            raise AssertionError("particle count not conserved")
        births.append(total)

        child_lp = logprod[:, None] + lr[None, :]
        occupied = labels > 0
        halt = child_lp <= level
        rows, cols = np.nonzero(occupied & halt)
        if rows.size:
            stopped.extend(_spell(parents, step, rows, cols))
        rows, cols = np.nonzero(occupied & ~halt)
        if rows.size > frontier_cap:
            raise FrontierTooLarge(f"frontier of {rows.size} words exceeds cap {frontier_cap}")
        step += 1
        parents.append((rows, cols))
        counts = labels[rows, cols]
        logprod = child_lp[rows, cols]
    return WalkSample(frozenset(stopped), seed, n, step, tuple(births))


def _walk_count(args) -> int:
    problem, n, seed, frontier_cap = args
    return run_walk(problem, n, seed, frontier_cap).stopped_count


def walk_counts(
    problem: Problem,
    n_values: Sequence[float],
    seeds: Sequence[int],
    workers: int = 1,
    frontier_cap: int = FRONTIER_CAP,
) -> np.ndarray:
    """Occupied stopping set sizes, shape ``(len(n_values), len(seeds))``."""
    jobs = [(problem, float(n), int(s), frontier_cap) for n in n_values for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_walk_count, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        flat = [_walk_count(j) for j in jobs]
    return np.array(flat, dtype=np.int64).reshape(len(n_values), len(seeds))


def empirical_dimension(
    problem: Problem,
    n_values: Sequence[float],
    seeds: Sequence[int],
    workers: int = 1,
    frontier_cap: int = FRONTIER_CAP,
) -> tuple[float, list[float]]:
    """Slope of the seed-averaged ``log #(occupied stopping set)`` against ``n``."""
    ns = _check_increasing(n_values, 2)
    if len(seeds) == 0:
        raise DegenerateFit("need at least one seed")
    counts = walk_counts(problem, ns, seeds, workers, frontier_cap)
    means = np.log(counts).mean(axis=1)
    slope, _ = _line_fit(ns, means)
    return slope, [float(v) for v in means]


def default_workers() -> int:
    cpus = os.cpu_count() or 1
    env = os.environ.get("FRACDIM_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValidationError(f"FRACDIM_THREADS must be a positive integer, got {env!r}")
        if cap < 1:
            raise ValidationError(f"FRACDIM_THREADS must be a positive integer, got {env!r}")
        return min(cpus, cap)
    return cpus
