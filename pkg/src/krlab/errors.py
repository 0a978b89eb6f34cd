"""Exception types raised by the density pipeline and its helpers."""


class KrlabError(Exception):
    """Base class for all package errors."""


class DomainError(KrlabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateCovariance(KrlabError):
    """The value-jet covariance is singular or too ill-conditioned.

    For the real-coefficient ensemble this happens on (or very near) the
    real locus, where the imaginary parts of the constraint functions vanish
    identically.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NonFinite(KrlabError):
    """A computed density overflowed or produced NaN."""


class RateUnresolvable(KrlabError):
    """Real/complex density differences are below floating-point noise."""


class RootFindFailure(KrlabError):
    """Simultaneous root iteration did not converge."""
