"""Problem data: contraction ratios, branching factor and label probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BranchingTooSmall,
    LengthMismatch,
    LetterOutOfRange,
    ProbOutOfRange,
    ProbSumMismatch,
    RatioOutOfRange,
    TooFewMaps,
)

PROB_SUM_TOL = 1e-9

Word = tuple[int, ...]


@dataclass(frozen=True)
class Problem:
    """An IFS with ``N`` maps coded by an ``M``-ary tree with i.i.d. edge labels.

    Attributes:
        ratios: contraction ratios ``r_1..r_N``, each in (0, 1).
        probs: label probabilities ``p_1..p_N``, each in (0, 1), summing to 1.
        branching: the tree branching factor ``M >= 2``.

    Build instances through :func:`validate`; the constructor does not check.
    """

    ratios: tuple[float, ...]
    probs: tuple[float, ...]
    branching: int

    @property
    def n_maps(self) -> int:
        return len(self.ratios)

    @property
    def log_ratios(self) -> np.ndarray:
        return np.log(np.asarray(self.ratios))

    @property
    def log_mp(self) -> np.ndarray:
        """``log(M p_i)`` for every label."""
        return np.log(self.branching * np.asarray(self.probs))

    @property
    def is_homogeneous(self) -> bool:
        return all(r == self.ratios[0] for r in self.ratios)


def validate(raw_ratios: Sequence[float], raw_probs: Sequence[float], branching: int) -> Problem:
    """Check the model constraints and return an immutable :class:`Problem`.

    Zero probabilities are rejected; use :func:`prune_zeros` first if the
    input may contain them.
    """
    ratios = tuple(float(r) for r in raw_ratios)
    probs = tuple(float(p) for p in raw_probs)
    if len(ratios) < 2:
        raise TooFewMaps(f"need at least 2 maps, got {len(ratios)}")
    if len(probs) != len(ratios):
        raise LengthMismatch(f"{len(ratios)} ratios but {len(probs)} probabilities")
    if isinstance(branching, bool) or int(branching) != branching:
        raise BranchingTooSmall(f"branching must be an integer, got {branching!r}")
    branching = int(branching)
    if branching < 2:
        raise BranchingTooSmall(f"branching must be >= 2, got {branching}")
    for i, r in enumerate(ratios, start=1):
        if not (0.0 < r < 1.0):
            raise RatioOutOfRange(f"r_{i} = {r} is not in (0, 1)")
    for i, p in enumerate(probs, start=1):
        if not (0.0 < p < 1.0):
            raise ProbOutOfRange(f"p_{i} = {p} is not in (0, 1)")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ProbSumMismatch(f"probabilities sum to {total!r}, not 1")
    return Problem(ratios, probs, branching)


def prune_zeros(raw_ratios: Sequence[float], raw_probs: Sequence[float]):
    """Drop maps whose probability is exactly zero and renormalize the rest."""
    kept = [(r, p) for r, p in zip(raw_ratios, raw_probs) if p != 0]
    total = math.fsum(p for _, p in kept)
    if not kept or total <= 0:
        return [], []
    return [r for r, _ in kept], [p / total for _, p in kept]


def check_word(problem: Problem, word: Sequence[int]) -> Word:
    n = problem.n_maps
    out = tuple(int(i) for i in word)
    for i in out:
        if not 1 <= i <= n:
            raise LetterOutOfRange(f"letter {i} outside 1..{n}")
    return out


def ratio_product(problem: Problem, word: Sequence[int]) -> float:
    """Product of the contraction ratios along ``word`` (letters are 1-based)."""
    word = check_word(problem, word)
    out = 1.0
    for i in word:
        out *= problem.ratios[i - 1]
    return out
