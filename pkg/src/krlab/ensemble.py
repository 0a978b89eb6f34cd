"""
Gaussian random polynomial ensembles with Kostlan weights.

A polynomial in ``m`` complex variables of degree ``N`` is written

    h(z) = sum_J c_J * sqrt(C(N, J)) * z^J,     |J| <= N,

with ``C(N, J)`` the multinomial coefficient ``N! / ((N-|J|)! j_1! ... j_m!)``.
The coefficients ``c_J`` are iid standard real normals (the real ensemble)
or iid standard complex normals with ``E|c|^2 = 1`` (the complex ensemble).
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import math

import numpy

__all__ = ['Field', 'Mode', 'EnsembleSpec', 'PolynomialJet',
           'enumerate_multi_indices', 'multinomial_coeff',
           'sample_coefficients', 'eval_jet']


class Field(str, Enum):
    REAL = 'real'
    COMPLEX = 'complex'


class Mode(str, Enum):
    ZEROS = 'zeros'
    CRITICAL = 'crit'


@dataclass(frozen=True)
class EnsembleSpec:
    """
    Ensemble specification.

    Parameters
    ----------
    m : int
        Number of complex variables.
    N : int
        Polynomial degree.
    field : Field
        Coefficient field of the Gaussian coefficients.
    mode : Mode
        ``ZEROS`` studies common zeros of ``m`` independent polynomials,
        ``CRITICAL`` studies critical points of a single polynomial.
    """

    m: int
    N: int
    field: Field = Field.COMPLEX
    mode: Mode = Mode.CRITICAL

    def __post_init__(self):
        object.__setattr__(self, 'field', Field(self.field))
        object.__setattr__(self, 'mode', Mode(self.mode))
        if self.m < 1:
            raise ValueError('m must be >= 1, got %r' % (self.m,))
        min_degree = 2 if self.mode is Mode.CRITICAL else 1
        if self.N < min_degree:
            raise ValueError('N must be >= %d in %s mode, got %r'
                             % (min_degree, self.mode.value, self.N))

    @property
    def dimension(self) -> int:
        """Number of monomials ``D_N = C(N + m, m)``."""
        return math.comb(self.N + self.m, self.m)


@dataclass
class PolynomialJet:
    """
    Value and derivatives of a sampled polynomial (or system) at a point.

    In critical mode ``value`` is ``h(z)``, ``gradient`` holds the ``m``
    partials ``f_q = dh/dz_q`` and ``hessian`` the symmetric matrix
    ``df_q/dz_p``. In zeros mode ``value`` is the vector ``(f_1, ..., f_m)``
    and ``jacobian[q, p] = df_q/dz_p``; ``gradient`` and ``hessian`` are
    ``None``.
    """

    value: object
    gradient: numpy.ndarray = None
    hessian: numpy.ndarray = None
    jacobian: numpy.ndarray = None


def _compositions(total, parts):
    # Descending lexicographic order of nonnegative compositions.
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _multi_indices(m, N):
    return tuple(J for degree in range(N + 1)
                 for J in _compositions(degree, m))


def enumerate_multi_indices(m: int, N: int) -> list:
    """
    All multi-indices ``J`` in ``m`` variables with ``|J| <= N``.

    Ordered by total degree, then descending lexicographically within a
    degree, so ``(m=2, N=1)`` gives ``[(0, 0), (1, 0), (0, 1)]``.
    """
    if m < 1 or N < 0:
        raise ValueError('need m >= 1 and N >= 0')
    return list(_multi_indices(m, N))


def multinomial_coeff(N: int, J) -> int:
    """Exact multinomial coefficient ``N! / ((N-|J|)! j_1! ... j_m!)``."""
    J = tuple(int(j) for j in J)
    if any(j < 0 for j in J):
        raise ValueError('multi-index entries must be nonnegative')
    if sum(J) > N:
        raise ValueError('|J| = %d exceeds N = %d' % (sum(J), N))
    value = 1
    remaining = N
    for j in J:
        value *= math.comb(remaining, j)
        remaining -= j
    return value


@lru_cache(maxsize=None)
def _monomial_table(m, N):
    exponents = numpy.array(_multi_indices(m, N), dtype=numpy.int64)
    weights = numpy.sqrt(numpy.array(
        [float(multinomial_coeff(N, J)) for J in _multi_indices(m, N)]))
    exponents.flags.writeable = False
    weights.flags.writeable = False
    return exponents, weights


def sample_coefficients(spec: EnsembleSpec, rng) -> numpy.ndarray:
    """
    Draw Gaussian coefficients for ``spec``.

    Parameters
    ----------
    spec : EnsembleSpec
    rng : numpy.random.Generator
        Seeded generator; the draw is a deterministic function of its state.

    Returns
    -------
    coeffs : numpy.ndarray
        Complex array of shape ``(D_N,)`` in critical mode and ``(m, D_N)``
        in zeros mode (one independent vector per component). For the real
        field the imaginary parts are exactly zero; for the complex field
        real and imaginary parts are iid ``N(0, 1/2)``.
    """
    shape = (spec.dimension,)
    if spec.mode is Mode.ZEROS:
        shape = (spec.m,) + shape
    if spec.field is Field.REAL:
        return rng.standard_normal(shape).astype(numpy.complex128)
    parts = rng.standard_normal(shape + (2,)) * math.sqrt(0.5)
    return parts[..., 0] + 1j * parts[..., 1]


def _power_table(z, N):
    # powers[q, k] = z_q**k, with a zero column appended so index -1 maps to 0
    # after derivative exponents go negative.
    powers = numpy.ones((z.size, N + 2), dtype=numpy.complex128)
    for k in range(1, N + 1):
        powers[:, k] = powers[:, k - 1] * z
    powers[:, N + 1] = 0.0
    return powers


def _monomials(powers, exponents):
    m = exponents.shape[1]
    out = numpy.ones(exponents.shape[0], dtype=numpy.complex128)
    for q in range(m):
        out = out * powers[q, exponents[:, q]]
    return out


def _derivative_terms(powers, exponents, weights, orders):
    # Weighted derivative d^orders z^J for every J, using falling factorial
    # prefactors; negative exponents index the appended zero column.
    factor = weights.astype(numpy.complex128)
    shifted = exponents.copy()
    for q, k in enumerate(orders):
        for step in range(k):
            factor = factor * (exponents[:, q] - step)
        shifted[:, q] = shifted[:, q] - k
    shifted[shifted < 0] = -1
    return factor * _monomials(powers, shifted)


def eval_jet(coeffs, spec: EnsembleSpec, z) -> PolynomialJet:
    """
    Evaluate a sampled polynomial and its derivatives at ``z`` by direct
    summation over monomials.

    Powers are built by repeated multiplication; they are accurate for
    ``|z_q| <= 10`` at the degrees used here and may overflow for very large
    ``|z| ** N``.
    """
    m, N = spec.m, spec.N
    z = numpy.atleast_1d(numpy.asarray(z, dtype=numpy.complex128))
    if z.shape != (m,):
        raise ValueError('z must have shape (%d,)' % m)
    exponents, weights = _monomial_table(m, N)
    powers = _power_table(z, N)
    coeffs = numpy.asarray(coeffs, dtype=numpy.complex128)

    def unit(*qs):
        orders = [0] * m
        for q in qs:
            orders[q] += 1
        return orders

    if spec.mode is Mode.CRITICAL:
        value = coeffs @ _derivative_terms(powers, exponents, weights,
                                           [0] * m)
        gradient = numpy.array([
            coeffs @ _derivative_terms(powers, exponents, weights, unit(q))
            for q in range(m)])
        hessian = numpy.empty((m, m), dtype=numpy.complex128)
        for q in range(m):
            for p in range(q, m):
                hessian[q, p] = coeffs @ _derivative_terms(
                    powers, exponents, weights, unit(q, p))
                hessian[p, q] = hessian[q, p]
        return PolynomialJet(value=value, gradient=gradient, hessian=hessian)

    if coeffs.shape != (m, exponents.shape[0]):
        raise ValueError('zeros mode expects coefficients of shape (m, D_N)')
    value = coeffs @ _derivative_terms(powers, exponents, weights, [0] * m)
    jacobian = numpy.stack([
        coeffs @ _derivative_terms(powers, exponents, weights, unit(p))
        for p in range(m)], axis=1)
    return PolynomialJet(value=value, jacobian=jacobian)
