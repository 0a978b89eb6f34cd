"""
Expected determinant of a Gaussian real Jacobian through Wick pairings.

The ``2m x 2m`` real Jacobian ``xi`` of a holomorphic map has entries that
are signed copies of a shorter Gaussian vector ``xi_hat ~ N(0, Lambda)``
(Cauchy-Riemann equations, plus symmetry of second derivatives in critical
mode).  Expanding ``det xi`` over permutations and applying Wick's formula
to each product of ``2m`` entries gives ``E[det xi]`` as a homogeneous
polynomial of degree ``m`` in the entries of ``Lambda``.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy

from .ensemble import Mode

__all__ = ['XiIndexMap', 'build_xi_map', 'perfect_matchings',
           'permutation_sign', 'wick_polynomial', 'wick_det_expectation',
           'wick_mc_oracle', 'assemble_xi']


@dataclass(frozen=True)
class XiIndexMap:
    """``xi[r, c] = sign[r, c] * xi_hat[index[r, c]]``."""

    size: int
    sign: numpy.ndarray
    index: numpy.ndarray
    n_hat: int
    mode: Mode

    def __hash__(self):
        return hash((self.size, self.n_hat, self.mode))

    def __eq__(self, other):
        return (isinstance(other, XiIndexMap)
                and self.mode == other.mode and self.size == other.size
                and numpy.array_equal(self.sign, other.sign)
                and numpy.array_equal(self.index, other.index))


@lru_cache(maxsize=None)
def build_xi_map(m: int, mode) -> XiIndexMap:
    """
    Index/sign map from the reduced vector ``xi_hat`` to the matrix ``xi``.

    ``xi_hat`` is ``(Re g_k ..., Im g_k ...)`` over the derivative slots
    ``g_k`` of the jet (``q <= p`` pairs of the Hessian in critical mode,
    all ``(q, p)`` of the Jacobian in zeros mode).  With ``g = a + i b``
    each complex entry occupies a ``[[a, -b], [b, a]]`` pattern across the
    four ``m x m`` quadrants of ``xi``.
    """
    mode = Mode(mode)
    if mode is Mode.CRITICAL:
        slots = {}
        for q in range(m):
            for p in range(q, m):
                slots[(q, p)] = len(slots)
        slot = lambda q, p: slots[(min(q, p), max(q, p))]  # noqa: E731
        d = len(slots)
    else:
        slot = lambda q, p: q * m + p  # noqa: E731
        d = m * m
    sign = numpy.empty((2 * m, 2 * m), dtype=numpy.int64)
    index = numpy.empty((2 * m, 2 * m), dtype=numpy.int64)
    for q in range(m):
        for p in range(m):
            k = slot(q, p)
            sign[q, p], index[q, p] = 1, k
            sign[q, m + p], index[q, m + p] = -1, d + k
            sign[m + q, p], index[m + q, p] = 1, d + k
            sign[m + q, m + p], index[m + q, m + p] = 1, k
    sign.flags.writeable = False
    index.flags.writeable = False
    return XiIndexMap(size=2 * m, sign=sign, index=index, n_hat=2 * d,
                      mode=mode)


def assemble_xi(xi_hat, xmap: XiIndexMap):
    """Build ``xi`` (batched over leading axes) from ``xi_hat``."""
    xi_hat = numpy.asarray(xi_hat)
    return xmap.sign * xi_hat[..., xmap.index]


def perfect_matchings(items):
    """Pairings of ``items`` into disjoint pairs, first element fixed."""
    items = tuple(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for j, partner in enumerate(rest):
        remaining = rest[:j] + rest[j + 1:]
        for tail in perfect_matchings(remaining):
            yield ((first, partner),) + tail


def permutation_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _compile(m, mode):
    xmap = build_xi_map(m, mode)
    sign, index = xmap.sign, xmap.index
    n = 2 * m
    matchings = list(perfect_matchings(range(n)))
    accum = {}
    for perm in permutations(range(n)):
        sgn = permutation_sign(perm)
        for pairs in matchings:
            coeff = sgn
            factors = []
            for i, j in pairs:
                coeff *= int(sign[i, perm[i]] * sign[j, perm[j]])
                a, b = int(index[i, perm[i]]), int(index[j, perm[j]])
                factors.append((a, b) if a <= b else (b, a))
            key = tuple(sorted(factors))
            accum[key] = accum.get(key, 0) + coeff
    monomials = [(key, c) for key, c in sorted(accum.items()) if c != 0]
    rows = numpy.array([[a for a, _ in key] for key, _ in monomials],
                       dtype=numpy.int64).reshape(len(monomials), m)
    cols = numpy.array([[b for _, b in key] for key, _ in monomials],
                       dtype=numpy.int64).reshape(len(monomials), m)
    coeffs = numpy.array([c for _, c in monomials], dtype=numpy.float64)
    return rows, cols, coeffs


def wick_polynomial(m: int, mode):
    """
    Monomials of ``E[det xi]`` in the entries of ``Lambda``.

    Returns ``(rows, cols, coeffs)``: monomial ``t`` is
    ``coeffs[t] * prod_s Lambda[rows[t, s], cols[t, s]]``. Obtained by full
    enumeration of ``(2m)!`` permutations times ``(2m-1)!!`` pairings, with
    identical monomials merged.
    """
    return _compile(m, Mode(mode))


def wick_det_expectation(Lambda, xmap: XiIndexMap):
    """
    ``E[det xi]`` for ``xi_hat ~ N(0, Lambda)``.

    Parameters
    ----------
    Lambda : array_like
        Symmetric covariance of shape ``(..., n_hat, n_hat)``.
    xmap : XiIndexMap

    Returns
    -------
    float or numpy.ndarray
        One value per leading batch index.
    """
    Lambda = numpy.asarray(Lambda, dtype=numpy.float64)
    if Lambda.shape[-2:] != (xmap.n_hat, xmap.n_hat):
        raise ValueError('Lambda has shape %r, map expects %d x %d'
                         % (Lambda.shape, xmap.n_hat, xmap.n_hat))
    rows, cols, coeffs = wick_polynomial(xmap.size // 2, xmap.mode)
    factors = Lambda[..., rows, cols]
    out = numpy.prod(factors, axis=-1) @ coeffs
    return out[()] if numpy.ndim(out) == 0 else out


def _factor_psd(Lambda):
    Lambda = numpy.asarray(Lambda, dtype=numpy.float64)
    if not numpy.allclose(Lambda, Lambda.T, rtol=0,
                          atol=1e-12 * max(1.0, numpy.abs(Lambda).max())):
        raise ValueError('Lambda is not symmetric')
    vals, vecs = numpy.linalg.eigh(Lambda)
    tol = 1e-10 * max(numpy.abs(vals).sum(), numpy.finfo(float).tiny)
    if vals.min() < -tol:
        raise ValueError('Lambda is not positive semidefinite '
                         '(min eigenvalue %.3g)' % vals.min())
    return vecs * numpy.sqrt(numpy.clip(vals, 0.0, None))


def wick_mc_oracle(Lambda, xmap: XiIndexMap, n_samples: int, rng,
                   chunk: int = 100_000):
    """
    Monte Carlo estimate of ``E[det xi]``.

    Returns ``(mean, standard_error)``.
    """
    root = _factor_psd(Lambda)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        size = min(chunk, n_samples - done)
        xi_hat = rng.standard_normal((size, root.shape[1])) @ root.T
        dets = numpy.linalg.det(assemble_xi(xi_hat, xmap))
        total += dets.sum()
        total_sq += numpy.square(dets).sum()
        done += size
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    stderr = numpy.sqrt(var / max(n_samples - 1, 1))
    return float(mean), float(stderr)
