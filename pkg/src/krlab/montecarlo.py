"""
Monte Carlo oracle for one-variable zero / critical point densities.

Random polynomials are drawn sample by sample, each from its own generator
``default_rng([seed, sample_index])`` so that the pooled point cloud does not
depend on chunking or on the number of workers. Roots are found with the
Aberth-Ehrlich simultaneous iteration and binned on a rectangular grid,
then compared cell by cell with the integral of an analytic density.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy

from .closedform import su2_crit_density, su_zero_density
from .ensemble import (EnsembleSpec, Field, Mode, multinomial_coeff,
                       sample_coefficients)
from .errors import RootFindFailure
from .kacrice import density_batch

__all__ = ['RootSet', 'EmpiricalHistogram', 'aberth_roots',
           'polynomial_for_sample', 'sample_critical_points',
           'sample_roots', 'integrate_cells', 'build_histogram',
           'compare_histogram', 'default_density']

MAX_SWEEPS = 500
STEP_TOL = 1e-12
RESIDUAL_TOL = 1e-8
MAX_FAILURE_RATE = 1e-3


@dataclass
class RootSet:
    roots: numpy.ndarray
    residuals: numpy.ndarray

    def __len__(self):
        return len(self.roots)


@dataclass
class EmpiricalHistogram:
    """
    Binned point cloud over a rectangular window of ``C``.

    ``expected[i, j]`` is the integral of the analytic density over cell
    ``(i, j)`` (points per sample); cells flagged in ``excluded`` are not
    compared and carry ``nan`` there. Index ``i`` runs over real-part bins
    and ``j`` over imaginary-part bins.
    """

    re_edges: numpy.ndarray
    im_edges: numpy.ndarray
    counts: numpy.ndarray
    n_samples: int
    expected: numpy.ndarray = None
    excluded: numpy.ndarray = None
    n_failed: int = 0
    degree: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def expected_counts(self):
        return self.n_samples * self.expected


def _eval_with_derivative(coeffs, z):
    # Horner for p and p' on a batch; coeffs ascending, shape (B, n + 1).
    p = numpy.broadcast_to(coeffs[:, -1:], z.shape).astype(numpy.complex128)
    dp = numpy.zeros_like(p)
    for k in range(coeffs.shape[1] - 2, -1, -1):
        dp = dp * z + p
        p = p * z + coeffs[:, k:k + 1]
    return p, dp


def _cauchy_radius(coeffs):
    # Positive root of |c_n| r^n - sum_{k<n} |c_k| r^k, by bisection.
    mags = numpy.abs(coeffs)
    lead = mags[:, -1:]
    rest = mags[:, :-1] / lead
    n = rest.shape[1]
    lo = numpy.zeros(len(coeffs))
    hi = 1.0 + rest.max(axis=1)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        powers = mid[:, None] ** numpy.arange(n)
        positive = mid ** n > (rest * powers).sum(axis=1)
        hi = numpy.where(positive, mid, hi)
        lo = numpy.where(positive, lo, mid)
    return hi


def _aberth_batch(coeffs):
    coeffs = numpy.asarray(coeffs, dtype=numpy.complex128)
    B, n = coeffs.shape[0], coeffs.shape[1] - 1
    radius = _cauchy_radius(coeffs)
    angles = 2 * math.pi * numpy.arange(n) / n + 0.4
    z = radius[:, None] * numpy.exp(1j * angles)[None, :]
    active = numpy.ones(B, dtype=bool)
    eye = numpy.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        idx = numpy.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        p, dp = _eval_with_derivative(coeffs[idx], za)
        diff = za[:, :, None] - za[:, None, :]
        diff[:, eye] = 1.0
        inv = 1.0 / diff
        inv[:, eye] = 0.0
        ratio = p / dp
        step = ratio / (1.0 - ratio * inv.sum(axis=2))
        step = numpy.where(numpy.isfinite(step), step, 0.0)
        z[idx] = za - step
        done = numpy.all(numpy.abs(step) < STEP_TOL * (1 + numpy.abs(za)),
                         axis=1)
        active[idx[done]] = False
    p, _ = _eval_with_derivative(coeffs, z)
    scale = numpy.abs(coeffs[:, None, :]) * \
        numpy.abs(z)[:, :, None] ** numpy.arange(n + 1)
    residuals = numpy.abs(p) / scale.sum(axis=2)
    failed = active | ~numpy.all(residuals < RESIDUAL_TOL, axis=1)
    return z, residuals, failed


def aberth_roots(coeffs) -> RootSet:
    """
    All complex roots of ``c_0 + c_1 z + ... + c_n z^n``.

    Aberth-Ehrlich iteration started on a circle whose radius is the
    Cauchy upper bound for the root moduli; stops when every correction
    is below ``1e-12 (1 + |root|)``.

    Parameters
    ----------
    coeffs : array_like
        Coefficients in ascending order of degree.

    Returns
    -------
    RootSet
        Roots and relative residuals ``|p(r)| / sum_k |c_k| |r|^k``.

    Raises
    ------
    RootFindFailure
        No convergence after 500 sweeps, or a residual above ``1e-8``.
    """
    coeffs = numpy.asarray(coeffs, dtype=numpy.complex128)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise ValueError('need a 1-d coefficient array of degree >= 1')
    if abs(coeffs[-1]) <= 1e-12 * numpy.abs(coeffs).max():
        raise ValueError('leading coefficient is numerically zero')
    z, residuals, failed = _aberth_batch(coeffs[None, :])
    if failed[0]:
        raise RootFindFailure('Aberth iteration failed (max residual %.3g)'
                              % residuals.max())
    return RootSet(roots=z[0], residuals=residuals[0])


def polynomial_for_sample(spec: EnsembleSpec, coeffs):
    """
    Ascending monomial coefficients of ``h`` (zeros mode) or ``h'``
    (critical mode) for one variable.
    """
    N = spec.N
    weights = numpy.sqrt([float(multinomial_coeff(N, (j,)))
                          for j in range(N + 1)])
    coeffs = numpy.asarray(coeffs)
    if spec.mode is Mode.ZEROS:
        coeffs = coeffs[..., 0, :] if coeffs.ndim > 1 else coeffs
        return coeffs * weights
    weighted = coeffs * weights
    return weighted[..., 1:] * numpy.arange(1, N + 1)


def _chunk_roots(spec, seed, start, stop):
    polys = []
    for index in range(start, stop):
        rng = numpy.random.default_rng([seed, index])
        polys.append(polynomial_for_sample(spec,
                                           sample_coefficients(spec, rng)))
    z, residuals, failed = _aberth_batch(numpy.array(polys))
    return z, residuals, failed


def sample_roots(spec: EnsembleSpec, n_samples: int, seed: int,
                 start: int = 0, chunk: int = 1000):
    """
    Roots of ``h'`` (critical) or ``h`` (zeros) for samples
    ``start .. start + n_samples - 1``.

    Returns ``(roots, residuals, n_failed)`` with ``roots`` of shape
    ``(n_accepted, degree)``. Failed samples are dropped and counted.
    """
    if spec.m != 1:
        raise ValueError('Monte Carlo sampling supports m = 1 only')
    roots, residuals, n_failed = [], [], 0
    for lo in range(start, start + n_samples, chunk):
        hi = min(lo + chunk, start + n_samples)
        z, res, failed = _chunk_roots(spec, seed, lo, hi)
        roots.append(z[~failed])
        residuals.append(res[~failed])
        n_failed += int(failed.sum())
    degree = spec.N - 1 if spec.mode is Mode.CRITICAL else spec.N
    roots = (numpy.concatenate(roots) if roots
             else numpy.empty((0, degree), dtype=numpy.complex128))
    residuals = (numpy.concatenate(residuals) if residuals
                 else numpy.empty((0, degree)))
    return roots, residuals, n_failed


def sample_critical_points(spec: EnsembleSpec, n_samples: int, seed: int,
                           start: int = 0):
    """
    Stream of :class:`RootSet`, one per accepted sample.

    Raises :class:`RootFindFailure` if more than 0.1% of samples fail.
    """
    roots, residuals, n_failed = sample_roots(spec, n_samples, seed, start)
    if n_samples and n_failed / n_samples > MAX_FAILURE_RATE:
        raise RootFindFailure('%d of %d samples failed to converge'
                              % (n_failed, n_samples))
    for r, res in zip(roots, residuals):
        yield RootSet(roots=r, residuals=res)


def default_density(spec: EnsembleSpec):
    """Analytic density used as the Monte Carlo reference for ``spec``."""
    N = spec.N
    if spec.field is Field.COMPLEX:
        if spec.mode is Mode.CRITICAL:
            return lambda z: su2_crit_density(N, z)
        return lambda z: su_zero_density(1, N, z)
    return lambda z: density_batch(spec, z)


def integrate_cells(density_fn, re_edges, im_edges, mask=None,
                    rtol=1e-4, start=4, max_sub=512):
    """
    Integrals of ``density_fn`` over grid cells by midpoint rule, doubling
    the per-cell subdivision until every cell changes by less than ``rtol``.

    Cells where ``mask`` is False are skipped and returned as ``nan``.
    """
    re_edges = numpy.asarray(re_edges, dtype=float)
    im_edges = numpy.asarray(im_edges, dtype=float)
    nre, nim = len(re_edges) - 1, len(im_edges) - 1
    if mask is None:
        mask = numpy.ones((nre, nim), dtype=bool)
    ii, jj = numpy.nonzero(mask)
    out = numpy.full((nre, nim), numpy.nan)
    if ii.size == 0:
        return out

    def midpoint(k):
        t = (numpy.arange(k) + 0.5) / k
        x0, x1 = re_edges[ii], re_edges[ii + 1]
        y0, y1 = im_edges[jj], im_edges[jj + 1]
        xs = x0[:, None] + (x1 - x0)[:, None] * t
        ys = y0[:, None] + (y1 - y0)[:, None] * t
        pts = xs[:, :, None] + 1j * ys[:, None, :]
        vals = numpy.asarray(density_fn(pts.reshape(-1)), dtype=float)
        area = (x1 - x0) * (y1 - y0)
        return vals.reshape(len(ii), k * k).mean(axis=1) * area

    k = start
    prev = midpoint(k)
    while True:
        k *= 2
        cur = midpoint(k)
        if numpy.all(numpy.abs(cur - prev) <= rtol * numpy.abs(cur)) \
                or k >= max_sub:
            break
        prev = cur
    out[ii, jj] = cur
    return out


def _count_chunk(args):
    spec, seed, start, stop, re_edges, im_edges = args
    roots, _, n_failed = sample_roots(spec, stop - start, seed, start)
    counts, _, _ = numpy.histogram2d(roots.real.ravel(), roots.imag.ravel(),
                                     bins=[re_edges, im_edges])
    return counts.astype(numpy.int64), n_failed, len(roots)


def build_histogram(spec: EnsembleSpec, n_samples: int, seed: int,
                    re_edges, im_edges, density_fn=None, real_band=None,
                    workers: int = 1, chunk: int = 1000):
    """
    Sample, bin and attach expected per-cell integrals.

    Parameters
    ----------
    real_band : float, optional
        Exclude every cell that intersects ``|Im z| <= real_band``.
        Required in practice for the real field, whose analytic density
        degenerates on the real axis.
    workers : int
        Process count. The histogram is identical for every value.
    """
    re_edges = numpy.asarray(re_edges, dtype=float)
    im_edges = numpy.asarray(im_edges, dtype=float)
    tasks = [(spec, seed, lo, min(lo + chunk, n_samples), re_edges, im_edges)
             for lo in range(0, n_samples, chunk)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_chunk, tasks))
    else:
        results = [_count_chunk(t) for t in tasks]
    counts = numpy.zeros((len(re_edges) - 1, len(im_edges) - 1),
                         dtype=numpy.int64)
    n_failed = 0
    for c, f, _ in results:
        counts += c
        n_failed += f
    if n_samples and n_failed / n_samples > MAX_FAILURE_RATE:
        raise RootFindFailure('%d of %d samples failed to converge'
                              % (n_failed, n_samples))
    excluded = numpy.zeros(counts.shape, dtype=bool)
    if real_band is not None:
        lo, hi = im_edges[:-1], im_edges[1:]
        touches = (hi >= -real_band) & (lo <= real_band)
        excluded[:, touches] = True
    if density_fn is None:
        density_fn = default_density(spec)
    expected = integrate_cells(density_fn, re_edges, im_edges,
                               mask=~excluded)
    degree = spec.N - 1 if spec.mode is Mode.CRITICAL else spec.N
    return EmpiricalHistogram(re_edges=re_edges, im_edges=im_edges,
                              counts=counts, n_samples=n_samples - n_failed,
                              expected=expected, excluded=excluded,
                              n_failed=n_failed, degree=degree)


def compare_histogram(hist: EmpiricalHistogram, threshold: float = 3.0):
    """
    Per-cell z-scores ``(count - n mu) / sqrt(n mu)`` and a summary.

    ``0/0`` is taken as 0. Excluded cells get ``nan`` and are left out of
    the summary.
    """
    mean = hist.n_samples * numpy.where(hist.excluded, numpy.nan,
                                        hist.expected)
    with numpy.errstate(divide='ignore', invalid='ignore'):
        z = (hist.counts - mean) / numpy.sqrt(mean)
    z = numpy.where((mean == 0) & (hist.counts == 0), 0.0, z)
    z = numpy.where(hist.excluded, numpy.nan, z)
    compared = ~hist.excluded
    n_cells = int(compared.sum())
    bad = int((numpy.abs(z[compared]) > threshold).sum())
    summary = {
        'n_samples': int(hist.n_samples),
        'n_failed': int(hist.n_failed),
        'n_cells': n_cells,
        'n_excluded': int(hist.excluded.sum()),
        'n_bad_cells': bad,
        'fraction_bad_cells': bad / n_cells if n_cells else 0.0,
        'max_abs_z': float(numpy.nanmax(numpy.abs(z))) if n_cells else 0.0,
        'threshold': threshold,
    }
    return z, summary
