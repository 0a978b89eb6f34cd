"""
Explicit densities in one variable and the complex zero density in ``C^m``.

The real-coefficient error terms are of the form
``(1/pi) d^2/dz dzbar log(1 + sqrt(1 - |Q|^2))`` where ``Q`` is the
correlation ``E(f f) / E(f conj f)``.  They are evaluated by a fourth-order
finite-difference Laplacian of the scalar potential (``d^2/dz dzbar`` is a
quarter of the Laplacian), with ``|Q|`` handled in log space so that large
``N`` cannot overflow.
"""

from dataclasses import dataclass
import math

import numpy

from .ensemble import Field
from .errors import DomainError

__all__ = ['ScaledDensity', 'su2_crit_density', 'so2_crit_error',
           'so2_crit_density', 'su_zero_density', 'scaled_crit_cx',
           'scaled_crit_error', 'scaled_crit_density', 'near_real_slope',
           'dzdzbar']

FD_STEP = 1e-4


@dataclass
class ScaledDensity:
    value: float
    component_cx: float
    component_err: float


def su2_crit_density(N: int, z):
    """
    Density of critical points of the complex-coefficient polynomial in one
    variable::

        (N/pi) * (1/(1+|z|^2)^2 - 2/(N (1+|z|^2)^2) + 1/(1+N|z|^2)^2)
    """
    if N < 2:
        raise DomainError('need N >= 2')
    r2 = numpy.abs(numpy.asarray(z)) ** 2
    s = 1.0 + r2
    return (N / math.pi) * (1.0 / s ** 2 - 2.0 / (N * s ** 2)
                            + 1.0 / (1.0 + N * r2) ** 2)


def su_zero_density(m: int, N: int, z):
    """
    Density of common zeros of ``m`` iid complex Kostlan polynomials::

        m! N^m / pi^m / (1 + ||z||^2)^(m + 1)

    The total mass over ``C^m`` is ``N^m`` (Bezout). ``z`` has shape
    ``(..., m)``; for ``m = 1`` a plain scalar or array of points is fine.
    """
    if m < 1 or N < 1:
        raise DomainError('need m >= 1 and N >= 1')
    z = numpy.asarray(z)
    if m == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        r2 = numpy.abs(z) ** 2
    else:
        r2 = numpy.sum(numpy.abs(z) ** 2, axis=-1)
    return math.factorial(m) * N ** m / math.pi ** m / (1.0 + r2) ** (m + 1)


def dzdzbar(potential, z, step=None):
    """
    ``d^2/dz dzbar`` of a real potential by a five-point, fourth-order
    central stencil along ``x`` and ``y``.

    ``step`` defaults to ``1e-4 * max(1, |z|)``.
    """
    z = numpy.asarray(z, dtype=numpy.complex128)
    if step is None:
        step = FD_STEP * numpy.maximum(1.0, numpy.abs(z))
    h = step
    lap = 0.0
    for unit in (1.0, 1j):
        d = unit * h
        lap = lap + (-potential(z + 2 * d) + 16 * potential(z + d)
                     - 30 * potential(z) + 16 * potential(z - d)
                     - potential(z - 2 * d)) / (12 * h * h)
    return 0.25 * lap


def _log_potential(log_abs_q):
    # log(1 + sqrt(1 - |Q|^2)) - log 2. The constant does not change the
    # Laplacian, and without it tiny |Q| would drown in the roundoff of
    # log 2. Uses (1 + s)/2 = 1 - q / (2 (1 + s)) with q = |Q|^2,
    # s = sqrt(1 - q) and 1 - q = -expm1(2 log|Q|).
    with numpy.errstate(divide='ignore', over='ignore'):
        q = numpy.exp(2.0 * log_abs_q)
        gap = -numpy.expm1(2.0 * log_abs_q)
    root = numpy.sqrt(numpy.clip(gap, 0.0, None))
    return numpy.log1p(-numpy.minimum(q, 1.0) / (2.0 * (1.0 + root)))


def _check_off_axis(z, step):
    z = numpy.asarray(z, dtype=numpy.complex128)
    if step is None:
        step = FD_STEP * numpy.maximum(1.0, numpy.abs(z))
    if numpy.any(numpy.abs(z.imag) <= 2 * step):
        raise DomainError('error term is defined off the real axis only '
                          '(|Im z| must exceed the stencil width)')
    return z


def _so2_log_abs_q(N, z):
    z2 = z * z
    r2 = numpy.abs(z) ** 2
    with numpy.errstate(divide='ignore'):
        return (numpy.log(numpy.abs(N * N * z2 + N))
                - numpy.log(N * N * r2 + N)
                + (N - 2) * (numpy.log(numpy.abs(1.0 + z2))
                             - numpy.log1p(r2)))


def so2_crit_error(N: int, z, step=None):
    """
    Real-minus-complex critical-point density in one variable, with
    ``Q_N = (N^2 z^2 + N)(1 + z^2)^(N-2) / ((N^2|z|^2 + N)(1 + |z|^2)^(N-2))``.

    Raises :class:`DomainError` on (or within the stencil width of) the
    real axis, where ``|Q_N| = 1`` and the potential is not smooth.
    """
    if N < 2:
        raise DomainError('need N >= 2')
    z = _check_off_axis(z, step)
    potential = lambda w: _log_potential(_so2_log_abs_q(N, w))  # noqa: E731
    return dzdzbar(potential, z, step) / math.pi


def so2_crit_density(N: int, z, step=None):
    """Critical-point density of the real-coefficient polynomial."""
    return su2_crit_density(N, z) + so2_crit_error(N, z, step)


def scaled_crit_cx(z):
    """``(1/pi) (1 + 1/(1 + |z|^2)^2)``."""
    s = 1.0 + numpy.abs(numpy.asarray(z)) ** 2
    return (1.0 + 1.0 / s ** 2) / math.pi


def _scaled_log_abs_q(z):
    r2 = numpy.abs(z) ** 2
    with numpy.errstate(divide='ignore'):
        return (numpy.log(numpy.abs(1.0 + z * z)) - numpy.log1p(r2)
                - 2.0 * z.imag ** 2)


def scaled_crit_error(z, step=None):
    """Scaling limit of the real-field error term."""
    z = _check_off_axis(z, step)
    potential = lambda w: _log_potential(_scaled_log_abs_q(w))  # noqa: E731
    return dzdzbar(potential, z, step) / math.pi


def scaled_crit_density(field, z, step=None) -> ScaledDensity:
    """
    Scaling limit ``lim N^-1 E(C_h(z / sqrt N))`` of the critical-point
    density in one variable.
    """
    field = Field(field)
    cx = scaled_crit_cx(z)
    err = scaled_crit_error(z, step) if field is Field.REAL else 0.0 * cx
    return ScaledDensity(value=cx + err, component_cx=cx, component_err=err)


def near_real_slope(x):
    """
    Coefficient of ``y`` in the real-field scaled density near ``x + 0i``::

        (1/pi) (x^6 + 3x^4 + 6x^2 + 6) / (2 + 2x^2 + x^4)^(3/2)
    """
    x = numpy.asarray(x, dtype=numpy.float64)
    x2 = x * x
    return ((x2 ** 3 + 3 * x2 ** 2 + 6 * x2 + 6)
            / (2 + 2 * x2 + x2 * x2) ** 1.5 / math.pi)
