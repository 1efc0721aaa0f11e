"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: argument problems exit with 2,
budget and capability problems with 3.
"""

from __future__ import annotations


class ArtifactError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ArtifactError, ValueError):
    """A caller supplied arguments that violate an operation's precondition."""


class StructuralError(ArgumentError):
    """Element arity or modulus does not match the group realization."""


class CapabilityError(ArtifactError):
    """The requested operation is not supported for this input kind."""


class BudgetExceeded(ArtifactError):
    """A configured size or work cap was hit.

    ``best`` carries the best partial answer when one exists (for example a
    lower bound found by an interrupted exhaustive search).
    """

    def __init__(self, message: str, best: object = None):
        super().__init__(message)
        self.best = best
