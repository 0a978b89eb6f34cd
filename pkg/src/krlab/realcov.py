"""
Real covariance blocks of the value/derivative jet and their Schur complement.

The complex jet ``g`` is split into real and imaginary parts,
``X = (Re f_1, ..., Re f_m, Im f_1, ..., Im f_m)`` for the constraint
functions and ``xi_hat = (Re g_k ..., Im g_k ...)`` for the derivative
functions. ``A``, ``B``, ``C`` are the covariance blocks of ``(X, xi_hat)``
and ``Lambda = C - B^T A^{-1} B`` is the covariance of ``xi_hat`` given
``X = 0``.
"""

from dataclasses import dataclass

import numpy

from .errors import DegenerateCovariance

__all__ = ['CovarianceBlocks', 'complex_to_real_cov', 'real_covariance',
           'assemble_blocks', 'schur_lambda', 'COND_LIMIT']

COND_LIMIT = 1e12


@dataclass
class CovarianceBlocks:
    A: numpy.ndarray
    B: numpy.ndarray
    C: numpy.ndarray
    Lambda: numpy.ndarray = None
    d: int = 0


def complex_to_real_cov(P_entry, H_entry):
    """
    Real 2x2 covariance of ``(Re u, Im u)`` against ``(Re v, Im v)``.

    Parameters
    ----------
    P_entry : complex or array_like
        ``E(u v)``.
    H_entry : complex or array_like
        ``E(u conj(v))``.

    Returns
    -------
    numpy.ndarray
        Shape ``(..., 2, 2)`` with rows ``(Re u, Im u)`` and columns
        ``(Re v, Im v)``.
    """
    P = numpy.asarray(P_entry, dtype=numpy.complex128)
    H = numpy.asarray(H_entry, dtype=numpy.complex128)
    out = numpy.empty(numpy.broadcast_shapes(P.shape, H.shape) + (2, 2))
    out[..., 0, 0] = 0.5 * (P.real + H.real)
    out[..., 0, 1] = 0.5 * (P.imag - H.imag)
    out[..., 1, 0] = 0.5 * (P.imag + H.imag)
    out[..., 1, 1] = 0.5 * (H.real - P.real)
    return out


def real_covariance(P, H):
    """
    Covariance of ``(Re g, Im g)`` from the ``n x n`` complex ``P`` and ``H``.

    Returns a ``2n x 2n`` real matrix ordered ``(Re g_0..Re g_{n-1},
    Im g_0..Im g_{n-1})``.
    """
    blocks = complex_to_real_cov(P, H)
    n = P.shape[-1]
    out = numpy.empty(P.shape[:-2] + (2 * n, 2 * n))
    out[..., :n, :n] = blocks[..., 0, 0]
    out[..., :n, n:] = blocks[..., 0, 1]
    out[..., n:, :n] = blocks[..., 1, 0]
    out[..., n:, n:] = blocks[..., 1, 1]
    return out


def assemble_blocks(jetcov, spec=None) -> CovarianceBlocks:
    """Split the real jet covariance into the blocks ``A``, ``B``, ``C``."""
    n = jetcov.H.shape[-1]
    k = jetcov.n_constraints
    full = real_covariance(jetcov.P, jetcov.H)
    cons = numpy.r_[0:k, n:n + k]
    ders = numpy.r_[k:n, n + k:2 * n]
    A = full[..., cons[:, None], cons]
    B = full[..., cons[:, None], ders]
    C = full[..., ders[:, None], ders]
    # Symmetric by construction up to the order of float ops; make it exact.
    A = 0.5 * (A + numpy.swapaxes(A, -1, -2))
    C = 0.5 * (C + numpy.swapaxes(C, -1, -2))
    return CovarianceBlocks(A=A, B=B, C=C, d=n - k)


def _condition(A):
    scale = numpy.trace(A, axis1=-2, axis2=-1)[..., None, None]
    eig = numpy.linalg.eigvalsh(A / scale)
    with numpy.errstate(divide='ignore'):
        return numpy.where(eig[..., 0] > 0, eig[..., -1] / eig[..., 0],
                           numpy.inf)


def schur_lambda(blocks: CovarianceBlocks, point=None):
    """
    ``Lambda = C - B^T A^{-1} B`` through a Cholesky factorization of ``A``.

    The blocks may carry leading batch dimensions. Raises
    :class:`DegenerateCovariance` when ``A`` has condition number above
    ``1e12`` after trace normalization, which for the real ensemble signals
    a point on or near the real locus.
    """
    A, B, C = blocks.A, blocks.B, blocks.C
    cond = _condition(A)
    bad = ~(cond < COND_LIMIT)
    if numpy.any(bad):
        where = None
        if point is not None:
            point = numpy.asarray(point)
            where = point[bad] if numpy.ndim(bad) else point
        raise DegenerateCovariance(
            'degenerate covariance (real locus): cond(A) = %.3g'
            % numpy.max(cond), point=where)
    L = numpy.linalg.cholesky(A)
    half = numpy.linalg.solve(L, B)
    Lambda = C - numpy.swapaxes(half, -1, -2) @ half
    Lambda = 0.5 * (Lambda + numpy.swapaxes(Lambda, -1, -2))
    blocks.Lambda = Lambda
    return Lambda
