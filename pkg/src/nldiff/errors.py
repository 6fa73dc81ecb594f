"""Exception hierarchy shared by all nldiff modules."""


class NldiffError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NldiffError):
    """Evaluation requested outside the finiteness domain of H (or at the
    origin of a singular kernel).  Carries ``p_max`` when relevant."""

    def __init__(self, message, p_max=None):
        super().__init__(message)
        self.p_max = p_max


class QuadratureError(NldiffError):
    """Adaptive quadrature failed to converge.  Carries the error estimate."""

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConjugateError(NldiffError):
    """The stationarity equation H'(p) = q could not be bracketed/solved."""


class UnsupportedKernel(NldiffError):
    """The kernel is outside the supported class for this operation
    (e.g. a singular kernel handed to the time-domain solver)."""


class ResolutionError(NldiffError):
    """The grid is too coarse to resolve the kernel support."""


class InstabilityError(NldiffError):
    """Time integration produced unbounded norm growth."""
