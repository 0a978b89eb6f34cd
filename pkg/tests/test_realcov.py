import numpy
import pytest

from krlab.ensemble import EnsembleSpec
from krlab.errors import DegenerateCovariance
from krlab.kernel import jet_covariances
from krlab.realcov import (CovarianceBlocks, _condition, assemble_blocks,
                           complex_to_real_cov, real_covariance, schur_lambda)


def test_conversion_examples():
    assert numpy.allclose(complex_to_real_cov(0, 1), 0.5 * numpy.eye(2))
    assert numpy.allclose(complex_to_real_cov(1, 1), [[1, 0], [0, 0]])


def test_conversion_against_sampling():
    # u = a g1 + b g2 with complex/real Gaussians mixed; compare with the
    # empirical covariance of (Re u, Im u, Re v, Im v).
    rng = numpy.random.default_rng(4)
    n = 10 ** 6
    x = rng.standard_normal((3, n))
    g = (rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))) \
        / numpy.sqrt(2)
    u = (0.7 + 0.2j) * x[0] + 0.5j * g[0] + 0.3 * x[1]
    v = (0.1 - 0.4j) * x[0] + (0.2 + 0.3j) * g[0] + 0.8 * g[1] + x[2]
    P = numpy.array([[numpy.mean(u * u), numpy.mean(u * v)],
                     [numpy.mean(v * u), numpy.mean(v * v)]])
    H = numpy.array([[numpy.mean(u * u.conj()), numpy.mean(u * v.conj())],
                     [numpy.mean(v * u.conj()), numpy.mean(v * v.conj())]])
    # Analytic P and H from the construction.
    cu = numpy.array([0.7 + 0.2j, 0.3, 0, 0.5j, 0])
    cv = numpy.array([0.1 - 0.4j, 0, 1, 0.2 + 0.3j, 0.8])
    real = numpy.array([1, 1, 1, 0, 0], dtype=bool)

    def pure(a, b):
        return numpy.sum((a * b)[real])

    def herm(a, b):
        return numpy.sum(a * b.conj())

    P_exact = numpy.array([[pure(cu, cu), pure(cu, cv)],
                           [pure(cv, cu), pure(cv, cv)]])
    H_exact = numpy.array([[herm(cu, cu), herm(cu, cv)],
                           [herm(cv, cu), herm(cv, cv)]])
    full = real_covariance(P_exact, H_exact)
    samples = numpy.stack([u.real, v.real, u.imag, v.imag])
    emp = samples @ samples.T / n
    # Each entry is a mean of products with variance <= 4 here.
    se = numpy.sqrt(numpy.mean((samples[:, None] * samples[None]) ** 2,
                               axis=-1) / n)
    assert numpy.all(numpy.abs(emp - full) < 4 * se + 1e-12)
    assert numpy.allclose(P, P_exact, atol=0.01)
    assert numpy.allclose(H, H_exact, atol=0.01)


def test_complex_field_pattern():
    H = numpy.array([[2.0, 0.3 - 0.4j], [0.3 + 0.4j, 1.0]])
    full = real_covariance(numpy.zeros_like(H), H)
    assert numpy.allclose(full[:2, :2], 0.5 * H.real)
    assert numpy.allclose(full[2:, 2:], 0.5 * H.real)
    assert numpy.allclose(full[:2, 2:], -full[:2, 2:].T)


def test_blocks_at_origin():
    N = 6
    blocks = assemble_blocks(jet_covariances(
        EnsembleSpec(1, N, 'complex', 'crit'), numpy.zeros(1)))
    assert numpy.allclose(blocks.A, N / 2 * numpy.eye(2))
    assert numpy.allclose(blocks.B, 0)
    assert numpy.allclose(blocks.C, N * (N - 1) * numpy.eye(2))
    blocks = assemble_blocks(jet_covariances(
        EnsembleSpec(1, N, 'complex', 'zeros'), numpy.zeros(1)))
    assert numpy.allclose(blocks.A, 0.5 * numpy.eye(2))
    assert numpy.allclose(blocks.B, 0)
    assert numpy.allclose(blocks.C, N / 2 * numpy.eye(2))


def _random_spd(rng, n):
    root = rng.normal(size=(n, n))
    return root @ root.T + n * numpy.eye(n)


def test_schur_special_cases():
    rng = numpy.random.default_rng(0)
    A = _random_spd(rng, 2)
    C = _random_spd(rng, 4)
    out = schur_lambda(CovarianceBlocks(A=A, B=numpy.zeros((2, 4)), C=C))
    assert numpy.array_equal(out, C)
    B = 0.3 * rng.normal(size=(2, 4))
    out = schur_lambda(CovarianceBlocks(A=numpy.eye(2), B=B, C=C))
    assert numpy.allclose(out, C - B.T @ B, rtol=1e-14, atol=1e-14)


def test_degenerate_near_real_axis():
    spec = EnsembleSpec(1, 10, 'real', 'crit')
    with pytest.raises(DegenerateCovariance):
        schur_lambda(assemble_blocks(jet_covariances(spec, 0.3 + 1e-9j)))
    conds = [float(_condition(assemble_blocks(
        jet_covariances(spec, complex(0.3, y))).A)) for y in (1e-1, 1e-2,
                                                              1e-3, 1e-4)]
    assert all(b > 10 * a for a, b in zip(conds, conds[1:]))


@pytest.mark.parametrize('t', [1e-6, 1e6])
def test_scaling(t):
    spec = EnsembleSpec(2, 7, 'real', 'crit')
    cov = jet_covariances(spec, numpy.array([0.4 + 0.3j, -0.2 + 0.5j]))
    base = assemble_blocks(cov)
    lam = schur_lambda(base)
    cov.P, cov.H = t * cov.P, t * cov.H
    scaled = assemble_blocks(cov)
    for name in 'ABC':
        ref = t * getattr(base, name)
        assert numpy.allclose(getattr(scaled, name), ref, rtol=1e-12,
                              atol=1e-12 * numpy.abs(ref).max())
    assert numpy.allclose(schur_lambda(scaled), t * lam, rtol=1e-12,
                          atol=1e-12 * t * numpy.abs(lam).max())


@pytest.mark.parametrize('m,mode,field', [(1, 'crit', 'real'),
                                          (2, 'crit', 'real'),
                                          (2, 'zeros', 'real'),
                                          (2, 'crit', 'complex'),
                                          (3, 'zeros', 'real')])
def test_lambda_psd(m, mode, field):
    rng = numpy.random.default_rng(m)
    z = rng.normal(size=(10, m)) + 1j * rng.uniform(0.2, 1.0, size=(10, m))
    blocks = assemble_blocks(jet_covariances(EnsembleSpec(m, 8, field, mode),
                                             z))
    lam = schur_lambda(blocks)
    assert lam.shape == (10, blocks.C.shape[-1], blocks.C.shape[-1])
    for L in lam:
        assert numpy.linalg.eigvalsh(L).min() >= -1e-10 * numpy.trace(L)
