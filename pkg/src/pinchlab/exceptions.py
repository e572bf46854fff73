"""Exception types shared across the package."""


class PinchLabError(Exception):
    """Base class for all package errors."""


class DomainError(PinchLabError):
    """Inputs violate a mathematical domain requirement (e.g. non-positive warp)."""


class ResolutionError(PinchLabError):
    """Grid too coarse for the requested derivative order."""


class GridMismatchError(PinchLabError):
    """Two fields do not share the same radial grid."""


class HypothesisError(PinchLabError):
    """A lemma hypothesis is violated by the supplied data."""


class ContractViolation(PinchLabError):
    """A documented input contract is violated (e.g. asymmetric tensor)."""


class SupportError(PinchLabError):
    """A compactly supported field touches the grid boundary."""


class ConvergenceError(PinchLabError):
    """An iterative scheme failed to contract."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
