"""Shared exception types."""


class DomainError(ValueError):
    """An argument is outside the domain of the operation."""


class CompositionError(DomainError):
    """Two morphisms do not compose (source/target mismatch)."""


class PreconditionError(DomainError):
    """A stated precondition does not hold (e.g. mismatched marginals)."""


class ResourceLimitError(RuntimeError):
    """An enumeration exceeded its configured cap.

    Raised instead of truncating silently; carries the cap and the size
    estimate that tripped it when known.
    """

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap
