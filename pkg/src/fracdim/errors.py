"""Exception hierarchy.

Validation problems derive from ``ValueError`` so callers that only care
about "bad input" can catch that; solver and capacity failures derive from
``RuntimeError``.
"""


class FracdimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FracdimError, ValueError):
    pass


class RatioOutOfRange(ValidationError):
    pass


class ProbOutOfRange(ValidationError):
    pass


class ProbSumMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class BranchingTooSmall(ValidationError):
    pass


class TooFewMaps(ValidationError):
    pass


class LetterOutOfRange(ValidationError):
    pass


class GridTooCoarse(ValidationError):
    pass


class InvalidRatio(ValidationError):
    pass


class POutOfRange(ValidationError):
    pass


class SingularAtHalf(ValidationError):
    pass


class RatiosNotOrdered(ValidationError):
    pass


class DegenerateFit(ValidationError):
    pass


class WrongCase(FracdimError, ValueError):
    pass


class NoConvergence(FracdimError, RuntimeError):
    pass


class InconsistentResult(FracdimError, RuntimeError):
    """A computed quantity violated a property the theory guarantees."""


class SetTooLarge(FracdimError, RuntimeError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class FrontierTooLarge(FracdimError, RuntimeError):
    pass


class CountOverflow(FracdimError, RuntimeError):
    pass
