"""Exception types shared across the package."""

from .linalg import WellDefinednessViolation


class ParseError(ValueError):
    """Input text (polynomial or scenario file) could not be parsed."""


class ValidationError(ValueError):
    """A structural invariant of the input is violated."""


class DegreeMismatch(ValueError):
    """A polynomial entry does not have the degree the map requires."""


class CompositionNonzero(ValidationError):
    """Two maps that must compose to zero do not."""


__all__ = [
    "ParseError",
    "ValidationError",
    "DegreeMismatch",
    "CompositionNonzero",
    "WellDefinednessViolation",
]
