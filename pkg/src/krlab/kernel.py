"""
Mixed partials of the Kostlan two-point kernel ``S(z, w)^N = (1 + z.w)^N``.

Every covariance of the jet of a Kostlan polynomial is a mixed partial of
this kernel, evaluated at ``w = conj(z)`` (hermitian covariances
``E(u conj(v))``) or at ``w = z`` (pure covariances ``E(u v)``, nonzero only
for real coefficients).  Derivatives are carried symbolically as sums of

    coeff * N(N-1)...(N-k+1) * z^gamma * w^delta * S^(N-k)

and only evaluated numerically at the end, after dividing by
``s_ref^N = (1 + |z|^2)^N`` so that nothing overflows for large ``N``.
"""

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy

from .ensemble import EnsembleSpec, Field, Mode
from .errors import DomainError

__all__ = ['KernelTerm', 'KernelTermSum', 'JetCovariance', 'kernel_partial',
           'evaluate_normalized', 'jet_orders', 'jet_covariances',
           'falling_factorial']

MAX_ORDER = 2
_RATIO_SLACK = 1e-12


@dataclass(frozen=True, order=True)
class KernelTerm:
    k: int
    zexp: tuple
    wexp: tuple
    coeff: Fraction


@dataclass(frozen=True)
class KernelTermSum:
    """Canonical sum of kernel terms; equal keys ``(k, zexp, wexp)`` merged."""

    m: int
    terms: tuple

    @classmethod
    def from_dict(cls, m, accum):
        terms = tuple(sorted(
            KernelTerm(k, zexp, wexp, Fraction(c))
            for (k, zexp, wexp), c in accum.items() if c != 0))
        return cls(m, terms)

    def __len__(self):
        return len(self.terms)

    @property
    def max_k(self):
        return max((t.k for t in self.terms), default=0)


def falling_factorial(N: int, k: int) -> int:
    """``N (N-1) ... (N-k+1)`` as an exact integer (zero once ``k > N``)."""
    out = 1
    for j in range(k):
        out *= N - j
    return out


def _bump(exp, a, delta):
    exp = list(exp)
    exp[a] += delta
    return tuple(exp)


def _differentiate(expr, a, side):
    # side 'z': d/dz_a hits z^gamma and S^(N-k) (the latter emits w_a).
    accum = {}
    for t in expr.terms:
        own, other = (t.zexp, t.wexp) if side == 'z' else (t.wexp, t.zexp)
        if own[a] > 0:
            new_own = _bump(own, a, -1)
            key = ((t.k, new_own, other) if side == 'z'
                   else (t.k, other, new_own))
            accum[key] = accum.get(key, 0) + t.coeff * own[a]
        new_other = _bump(other, a, +1)
        key = ((t.k + 1, own, new_other) if side == 'z'
               else (t.k + 1, new_other, own))
        accum[key] = accum.get(key, 0) + t.coeff
    return KernelTermSum.from_dict(expr.m, accum)


@lru_cache(maxsize=None)
def _kernel_partial(alpha, beta):
    m = len(alpha)
    zero = (0,) * m
    expr = KernelTermSum(m, (KernelTerm(0, zero, zero, Fraction(1)),))
    for a, count in enumerate(alpha):
        for _ in range(count):
            expr = _differentiate(expr, a, 'z')
    for b, count in enumerate(beta):
        for _ in range(count):
            expr = _differentiate(expr, b, 'w')
    return expr


def kernel_partial(alpha, beta, m: int) -> KernelTermSum:
    """
    Exact symbolic ``d^alpha/dz^alpha d^beta/dw^beta (1 + z.w)^N``.

    Parameters
    ----------
    alpha, beta : sequence of int
        Derivative multi-indices of length ``m`` on the ``z`` and ``w``
        sides, each of total order at most 2.
    m : int
        Number of variables.

    Returns
    -------
    KernelTermSum
        Valid for every ``N``; terms with ``k > N`` vanish on evaluation
        through the falling factorial.

    Examples
    --------
    >>> kernel_partial((1,), (1,), 1).terms  # N(N-1) z w S^(N-2) + N S^(N-1)
    (KernelTerm(k=1, zexp=(0,), wexp=(0,), coeff=Fraction(1, 1)), \
KernelTerm(k=2, zexp=(1,), wexp=(1,), coeff=Fraction(1, 1)))
    """
    alpha = tuple(int(a) for a in alpha)
    beta = tuple(int(b) for b in beta)
    if len(alpha) != m or len(beta) != m:
        raise DomainError('alpha and beta must have length m = %d' % m)
    if min(alpha + beta) < 0:
        raise DomainError('derivative orders must be nonnegative')
    if sum(alpha) > MAX_ORDER or sum(beta) > MAX_ORDER:
        raise DomainError('derivative order above %d per side is not '
                          'supported' % MAX_ORDER)
    return _kernel_partial(alpha, beta)


def _int_power(base, n):
    # Binary exponentiation; |base| <= 1 keeps every intermediate bounded.
    result = numpy.ones_like(base)
    square = base.copy()
    while n > 0:
        if n & 1:
            result = result * square
        n >>= 1
        if n:
            square = square * square
    return result


class _KernelPoint:
    """Evaluation context for one (batch of) ``(z, w)`` with cached powers."""

    def __init__(self, z, w, N, s_ref=None):
        self.z = numpy.asarray(z, dtype=numpy.complex128)
        self.w = numpy.asarray(w, dtype=numpy.complex128)
        self.N = int(N)
        if s_ref is None:
            s_ref = 1.0 + numpy.sum(numpy.abs(self.z) ** 2, axis=-1)
        self.s_ref = numpy.asarray(s_ref, dtype=numpy.float64)
        if numpy.any(self.s_ref <= 0):
            raise DomainError('s_ref must be positive')
        self.ratio = (1.0 + numpy.sum(self.z * self.w, axis=-1)) / self.s_ref
        if numpy.any(numpy.abs(self.ratio) > 1.0 + _RATIO_SLACK):
            raise DomainError('|1 + z.w| exceeds s_ref: invalid (z, w) pair')
        self._radial = {}

    def radial(self, k):
        # r^(N-k) / s_ref^k
        if k not in self._radial:
            self._radial[k] = (_int_power(self.ratio, self.N - k)
                               / self.s_ref ** k)
        return self._radial[k]

    def monomial(self, exps, x):
        out = numpy.ones(x.shape[:-1], dtype=numpy.complex128)
        for a, e in enumerate(exps):
            if e:
                out = out * x[..., a] ** e
        return out

    def __call__(self, expr):
        total = numpy.zeros(self.ratio.shape, dtype=numpy.complex128)
        for t in expr.terms:
            ff = falling_factorial(self.N, t.k)
            if ff == 0:
                continue
            scale = float(t.coeff) * float(ff)
            total = total + scale * (self.monomial(t.zexp, self.z)
                                     * self.monomial(t.wexp, self.w)
                                     * self.radial(t.k))
        return total


def evaluate_normalized(expr: KernelTermSum, z, w, N: int, s_ref=None):
    """
    Evaluate ``expr`` divided by ``s_ref^N``.

    ``s_ref`` defaults to ``1 + ||z||^2``. Each term becomes
    ``coeff * N^(k) * z^gamma * w^delta * r^(N-k) / s_ref^k`` with
    ``r = (1 + z.w) / s_ref``; since ``|r| <= 1`` for ``w = z`` and
    ``w = conj(z)`` the result is finite for any ``N``.

    Inputs may carry leading batch dimensions, ``z.shape == (..., m)``.
    Raises :class:`DomainError` if ``|r| > 1 + 1e-12``.
    """
    out = _KernelPoint(z, w, N, s_ref)(expr)
    return out[()] if out.ndim == 0 else out


@dataclass
class JetCovariance:
    """
    Covariances of the complex jet ``g`` normalized by ``(1 + |z|^2)^N``.

    ``g`` lists the constraint functions first (``f_1..f_m``) followed by
    derivative functions. ``P[..., i, j] = E(g_i g_j)`` and
    ``H[..., i, j] = E(g_i conj(g_j))``.
    """

    P: numpy.ndarray
    H: numpy.ndarray
    n_constraints: int
    labels: tuple
    s_ref: numpy.ndarray


@lru_cache(maxsize=None)
def jet_orders(m, mode):
    """
    Jet layout for ``(m, mode)``.

    Returns a tuple of ``(label, component, orders)`` entries; ``component``
    is the independent polynomial the observable belongs to (always 0 in
    critical mode) and ``orders`` the derivative multi-index applied to it.
    """
    mode = Mode(mode)

    def unit(*qs):
        orders = [0] * m
        for q in qs:
            orders[q] += 1
        return tuple(orders)

    entries = []
    if mode is Mode.CRITICAL:
        for q in range(m):
            entries.append((('f', q), 0, unit(q)))
        for q in range(m):
            for p in range(q, m):
                entries.append((('df', q, p), 0, unit(q, p)))
    else:
        for q in range(m):
            entries.append((('f', q), q, unit()))
        for q in range(m):
            for p in range(m):
                entries.append((('df', q, p), q, unit(p)))
    return tuple(entries)


def jet_covariances(spec: EnsembleSpec, z) -> JetCovariance:
    """
    Normalized pure and hermitian covariances of the jet at ``z``.

    ``z`` has shape ``(m,)`` or ``(..., m)``; the returned matrices carry
    the same leading batch shape. For the complex field ``P`` is exactly
    zero. The hermitian block does not depend on the field.
    """
    m, N = spec.m, spec.N
    z = numpy.asarray(z, dtype=numpy.complex128)
    if m == 1 and z.shape[-1:] != (1,):
        z = z[..., None]
    if z.shape[-1] != m:
        raise ValueError('last axis of z must have length m = %d' % m)
    entries = jet_orders(m, spec.mode)
    n = len(entries)
    batch = z.shape[:-1]
    s_ref = 1.0 + numpy.sum(numpy.abs(z) ** 2, axis=-1)

    herm = _KernelPoint(z, numpy.conj(z), N, s_ref)
    pure = _KernelPoint(z, z, N, s_ref) if spec.field is Field.REAL else None

    H = numpy.zeros(batch + (n, n), dtype=numpy.complex128)
    P = numpy.zeros(batch + (n, n), dtype=numpy.complex128)
    for i, (_, ci, ai) in enumerate(entries):
        for j in range(i, n):
            _, cj, aj = entries[j]
            if ci != cj:
                continue
            expr = kernel_partial(ai, aj, m)
            H[..., i, j] = herm(expr)
            if i == j:
                # A variance; drop the roundoff imaginary part.
                H[..., i, i] = H[..., i, i].real
            H[..., j, i] = numpy.conj(H[..., i, j])
            if pure is not None:
                P[..., i, j] = pure(expr)
                P[..., j, i] = P[..., i, j]
    labels = tuple(label for label, _, _ in entries)
    return JetCovariance(P=P, H=H, n_constraints=m, labels=labels,
                         s_ref=s_ref)
