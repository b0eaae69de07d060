"""Exception hierarchy.

Everything raised deliberately by this package derives from
``TwinMetaError`` so callers can catch one type at the boundary.
"""


class TwinMetaError(Exception):
    """Base class for all errors raised by twinmeta."""


class DomainError(TwinMetaError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ValidationError(TwinMetaError, ValueError):
    """Input data violate a structural rule; the message names the field."""


class NumericalError(TwinMetaError, ArithmeticError):
    """An iterative routine failed to converge or lost its bracket."""
