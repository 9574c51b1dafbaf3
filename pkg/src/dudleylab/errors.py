"""Exception hierarchy shared by every module of the package."""


class DudleyLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DudleyLabError, ValueError):
    """Malformed or out-of-domain input (bad shapes, mismatched spaces, ...)."""


class SolverError(DudleyLabError, RuntimeError):
    """An optimization kernel stalled or could not certify its answer."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConsistencyError(DudleyLabError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class CapacityError(DudleyLabError, ValueError):
    """Problem too large for an exhaustive routine."""
