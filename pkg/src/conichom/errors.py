"""Exception hierarchy shared by all modules."""


class ConicHomError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ConicHomError, ValueError):
    """Malformed or out-of-range input."""


class CapabilityError(ConicHomError):
    """The instance exceeds a configured size cap."""


class NumericalError(ConicHomError):
    """A numerical routine failed (non-convergence, lost definiteness, ...)."""


class PreconditionError(ConicHomError):
    """An input does not satisfy the documented precondition of an operation."""


class InconclusiveError(ConicHomError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
