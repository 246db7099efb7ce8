"""Almost-sure dimension of random subsets of self-similar sets.

The random subset is coded by the root paths of an ``M``-ary tree whose
edges carry i.i.d. labels from ``{1..N}``. The main entry points are
:func:`validate` and :func:`dimension`.
"""

__version__ = "0.1.0"

from .dimension import (  # noqa: E402
    CaseTag,
    DimensionResult,
    classify,
    dimension,
    solve_critical_pair,
    solve_moran,
    solve_weighted_moran,
)
from .model import Problem, prune_zeros, ratio_product, validate  # noqa: E402

__all__ = [
    "CaseTag",
    "DimensionResult",
    "Problem",
    "classify",
    "dimension",
    "prune_zeros",
    "ratio_product",
    "solve_critical_pair",
    "solve_moran",
    "solve_weighted_moran",
    "validate",
]
