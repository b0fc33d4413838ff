"""Exception hierarchy shared by all zenodyn modules."""

from __future__ import annotations

__all__ = [
    "ZenodynError",
    "StructuralError",
    "NumericalError",
    "PreconditionError",
    "SingularityError",
    "SurvivalUnderflowError",
    "ExceptionalPointError",
    "UsageError",
    "IntegrityError",
]


class ZenodynError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(ZenodynError):
    """Shape, flag, or invariant violation in an input object."""


class NumericalError(ZenodynError):
    """A numerical routine failed to converge or produced non-finite values."""


class PreconditionError(ZenodynError):
    """An operation precondition on the input state or parameters is violated."""


class SingularityError(ZenodynError):
    """A mathematically singular evaluation point, e.g. log of zero."""


class SurvivalUnderflowError(ZenodynError):
    """Survival probability underflowed; every measurement branch was filtered out."""


class ExceptionalPointError(ZenodynError):
    """Eigenvalues coalesce and the eigendecomposition-based formula is singular."""


class UsageError(ZenodynError):
    """Invalid configuration or command-line usage. CLI exit status 2."""


class IntegrityError(ZenodynError):
    """Output integrity check failed mid-run. CLI exit status 3."""
