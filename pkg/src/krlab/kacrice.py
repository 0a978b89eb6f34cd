"""
Expected density of complex zeros / critical points by the Kac-Rice formula.

For the real system ``X(x, y) = (Re f, Im f)`` on ``R^{2m}`` the density of
zeros at ``z`` is

    p_X(0) * E[det xi | X = 0] = (2 pi)^{-m} det(A)^{-1/2} E_Lambda[det xi],

where ``A`` is the covariance of ``X`` and ``Lambda`` the conditional
covariance of the reduced derivative vector. ``det xi >= 0`` because ``xi``
is the real form of a complex matrix, so no absolute value is needed.

All covariances enter divided by ``(1 + |z|^2)^N``. ``det(A)^{-1/2}`` then
picks up ``(1 + |z|^2)^{mN}`` and ``E_Lambda[det xi]`` (homogeneous of degree
``m``) loses the same factor, so the density is never un-normalized.
"""

from dataclasses import dataclass
import math

import numpy
from scipy.ndimage import maximum_filter1d

from .ensemble import EnsembleSpec, Field, Mode
from .errors import NonFinite, RateUnresolvable
from .kernel import jet_covariances
from .realcov import assemble_blocks, schur_lambda
from .wick import build_xi_map, wick_det_expectation

__all__ = ['DensityResult', 'DecayFit', 'density', 'density_batch',
           'density_from_covariance',
           'density_ratio', 'lambda_z', 'decay_differences',
           'decay_rate_fit']

NOISE_FLOOR = 1e-14


@dataclass
class DensityResult:
    """
    Density of points per unit Lebesgue volume of ``C^m`` at ``z``.

    ``det_A`` is the determinant of the normalized constraint covariance,
    ``lambda_cond`` the eigenvalue ratio of ``Lambda`` and
    ``normalization_degree`` the net power of ``1 + |z|^2`` left in the
    density after the uniform normalization (always zero).
    """

    density: float
    det_A: float
    lambda_cond: float
    normalization_degree: int


@dataclass
class DecayFit:
    fitted_rate: float
    theoretical_rate: float
    n_points: int
    residual: float
    N: numpy.ndarray = None
    diff: numpy.ndarray = None

    @property
    def relative_gap(self):
        return abs(self.fitted_rate - self.theoretical_rate) / \
            self.theoretical_rate


def _as_points(spec, z):
    z = numpy.asarray(z, dtype=numpy.complex128)
    if spec.m == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != spec.m:
        raise ValueError('last axis of z must have length m = %d' % spec.m)
    return z


def _pipeline(spec, z):
    return density_from_covariance(spec, jet_covariances(spec, z), point=z)


def density_from_covariance(spec, jetcov, point=None):
    """
    Kac-Rice density from precomputed jet covariances.

    Returns ``(density, det_A, Lambda, normalization_degree)``; arrays keep
    the batch shape of ``jetcov``. The density is invariant under a common
    rescaling of ``jetcov.P`` and ``jetcov.H``.
    """
    m, N = spec.m, spec.N
    blocks = assemble_blocks(jetcov, spec)
    Lambda = schur_lambda(blocks, point=point)
    expected_det = wick_det_expectation(Lambda, build_xi_map(m, spec.mode))
    det_A = numpy.linalg.det(blocks.A)
    value = expected_det / ((2.0 * math.pi) ** m * numpy.sqrt(det_A))
    if not numpy.all(numpy.isfinite(value)):
        raise NonFinite('non-finite density at m=%d, N=%d' % (m, N))
    # det A ~ s^(-2mN) -> factor s^(+mN); E det xi ~ s^(-mN).
    degree = (2 * m * N) // 2 - m * N
    return value, det_A, Lambda, degree


def density(spec: EnsembleSpec, z) -> DensityResult:
    """
    Expected density at a single point ``z`` (shape ``(m,)``; a scalar is
    accepted for ``m = 1``).

    Raises
    ------
    DegenerateCovariance
        Real field at (or too close to) a point of ``R^m``.
    NonFinite
        Overflow or NaN in the result.
    """
    z = _as_points(spec, z)
    if z.ndim != 1:
        raise ValueError('density() evaluates one point; use density_batch')
    value, det_A, Lambda, degree = _pipeline(spec, z)
    eig = numpy.linalg.eigvalsh(Lambda)
    cond = eig[-1] / eig[0] if eig[0] > 0 else math.inf
    return DensityResult(density=float(value), det_A=float(det_A),
                         lambda_cond=float(cond),
                         normalization_degree=int(degree))


def density_batch(spec: EnsembleSpec, z) -> numpy.ndarray:
    """Vectorized density over points ``z`` of shape ``(..., m)``."""
    z = _as_points(spec, z)
    return _pipeline(spec, z)[0]


def density_ratio(m: int, N: int, mode, z) -> float:
    """Real-field density divided by complex-field density at ``z``."""
    real = density(EnsembleSpec(m, N, Field.REAL, mode), z).density
    cx = density(EnsembleSpec(m, N, Field.COMPLEX, mode), z).density
    return real / cx


def lambda_z(z) -> float:
    """
    Exponential rate ``-log |(1 + z.z) / (1 + ||z||^2)|``.

    ``z.z`` is the bilinear (unconjugated) product. Zero on ``R^m``,
    infinite where ``1 + z.z = 0``.
    """
    z = numpy.atleast_1d(numpy.asarray(z, dtype=numpy.complex128))
    num = abs(1.0 + numpy.sum(z * z))
    den = 1.0 + float(numpy.sum(numpy.abs(z) ** 2))
    if num == 0.0:
        return math.inf
    return max(0.0, -math.log(num / den))


def decay_differences(m, mode, z, N_list):
    """
    ``|density_real - density_complex|`` and the complex density for each N.
    """
    diffs, refs = [], []
    for N in N_list:
        real = density(EnsembleSpec(m, N, Field.REAL, mode), z).density
        cx = density(EnsembleSpec(m, N, Field.COMPLEX, mode), z).density
        diffs.append(abs(real - cx))
        refs.append(cx)
    return numpy.array(diffs), numpy.array(refs)


def decay_rate_fit(m: int, mode, z, N_list,
                   log_prefactor: bool = False) -> DecayFit:
    """
    Fit the exponential rate at which the real-field density approaches the
    complex-field density.

    The log of the upper envelope (running maximum over windows of three
    consecutive ``N``) of ``|density_real - density_complex|`` is regressed
    on ``N``; the leading error term oscillates in sign, and the envelope
    removes the near-cancellations. Points at or below floating-point noise
    (``1e-14`` times the density) are dropped.

    With ``log_prefactor=True`` a ``log N`` column is added to the
    regression so that a polynomial prefactor ``N^p`` does not bias the
    rate.

    Raises
    ------
    RateUnresolvable
        Fewer than five resolvable points remain.
    """
    N_arr = numpy.asarray(sorted(int(N) for N in N_list))
    if N_arr.size < 5:
        raise ValueError('need at least five N values')
    diffs, refs = decay_differences(m, mode, z, N_arr)
    envelope = maximum_filter1d(diffs, size=3, mode='nearest')
    keep = envelope > NOISE_FLOOR * refs
    if keep.sum() < 5:
        raise RateUnresolvable(
            'differences below noise floor for N in %s; z is too far from '
            'R^m for this N range' % (list(N_arr),))
    x = N_arr[keep].astype(float)
    columns = [x, numpy.ones_like(x)]
    if log_prefactor:
        columns.append(numpy.log(x))
    design = numpy.column_stack(columns)
    target = numpy.log(envelope[keep])
    coef, *_ = numpy.linalg.lstsq(design, target, rcond=None)
    slope = coef[0]
    resid = target - design @ coef
    return DecayFit(fitted_rate=float(-slope),
                    theoretical_rate=lambda_z(z),
                    n_points=int(keep.sum()),
                    residual=float(numpy.sqrt(numpy.mean(resid ** 2))),
                    N=N_arr, diff=diffs)
