import math

import numpy
import pytest
from scipy.stats import special_ortho_group

from krlab.closedform import su2_crit_density, su_zero_density
from krlab.ensemble import EnsembleSpec
from krlab.errors import DegenerateCovariance, RateUnresolvable
from krlab.kacrice import (decay_rate_fit, density, density_batch,
                           density_from_covariance, density_ratio, lambda_z)
from krlab.kernel import jet_covariances


def test_point_examples():
    d = density(EnsembleSpec(1, 10, 'complex', 'crit'), 0j)
    assert d.density == pytest.approx(18 / math.pi, rel=1e-12)
    assert d.normalization_degree == 0
    d = density(EnsembleSpec(1, 10, 'complex', 'zeros'), 0j)
    assert d.density == pytest.approx(10 / math.pi, rel=1e-12)
    d = density(EnsembleSpec(2, 5, 'complex', 'zeros'), numpy.zeros(2))
    assert d.density == pytest.approx(2 * 25 / math.pi ** 2, rel=1e-12)


def test_crit_closed_form_m1():
    rng = numpy.random.default_rng(0)
    z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    for N in (2, 5, 10, 25, 100):
        got = density_batch(EnsembleSpec(1, N, 'complex', 'crit'), z)
        assert numpy.max(numpy.abs(got / su2_crit_density(N, z) - 1)) < 1e-10


@pytest.mark.parametrize('m', [1, 2, 3])
def test_zero_density_has_bezout_normalization(m):
    # The pipeline density equals m! N^m / pi^m / (1+|z|^2)^(m+1), whose
    # integral over C^m is N^m.
    rng = numpy.random.default_rng(m)
    z = rng.normal(size=(10, m)) + 1j * rng.normal(size=(10, m))
    for N in (1, 3, 7):
        got = density_batch(EnsembleSpec(m, N, 'complex', 'zeros'), z)
        assert numpy.allclose(got, su_zero_density(m, N, z), rtol=1e-10,
                              atol=0)


def test_real_field_on_real_locus_is_an_error():
    with pytest.raises(DegenerateCovariance):
        density(EnsembleSpec(1, 10, 'real', 'crit'), 0.5 + 0j)
    with pytest.raises(DegenerateCovariance):
        density(EnsembleSpec(2, 6, 'real', 'zeros'), numpy.array([0.1, -1.0]))


def test_real_field_symmetries():
    rng = numpy.random.default_rng(3)
    for mode in ('crit', 'zeros'):
        spec = EnsembleSpec(1, 14, 'real', mode)
        for _ in range(5):
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5))
            ref = density(spec, z).density
            for w in (z.conjugate(), -z, -z.conjugate()):
                assert abs(density(spec, w).density / ref - 1) < 1e-10


def test_complex_field_rotation():
    rng = numpy.random.default_rng(4)
    spec = EnsembleSpec(1, 14, 'complex', 'crit')
    z = complex(0.8, -0.3)
    ref = density(spec, z).density
    for theta in rng.uniform(0, 2 * math.pi, 6):
        w = z * complex(math.cos(theta), math.sin(theta))
        assert abs(density(spec, w).density / ref - 1) < 1e-10


@pytest.mark.parametrize('field,mode', [('real', 'crit'), ('real', 'zeros'),
                                        ('complex', 'crit')])
def test_real_orthogonal_invariance_m2(field, mode):
    rng = numpy.random.default_rng(5)
    spec = EnsembleSpec(2, 9, field, mode)
    for _ in range(3):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        R = special_ortho_group.rvs(2, random_state=rng)
        ref = density(spec, z).density
        assert abs(density(spec, R @ z).density / ref - 1) < 1e-8


@pytest.mark.parametrize('t', [1e-6, 1e6])
def test_covariance_scale_invariance(t):
    spec = EnsembleSpec(2, 8, 'real', 'crit')
    z = numpy.array([0.3 + 0.6j, -0.5 + 0.2j])
    cov = jet_covariances(spec, z)
    ref = density_from_covariance(spec, cov)[0]
    cov.P, cov.H = t * cov.P, t * cov.H
    assert abs(density_from_covariance(spec, cov)[0] / ref - 1) < 1e-10


def test_lambda_examples():
    assert lambda_z(0.5j) == pytest.approx(math.log(5 / 3), rel=1e-14)
    assert lambda_z(numpy.array([0.5j, 0])) == \
        pytest.approx(math.log(5 / 3), rel=1e-14)
    assert lambda_z(0.7) == 0
    assert lambda_z(numpy.array([0.3, -2.0])) == 0
    assert lambda_z(1j) == math.inf
    assert lambda_z(0.5 + 0.5j) == pytest.approx(
        math.log(1.5 / math.sqrt(1.25)), rel=1e-14)


def test_ratio_converges():
    assert abs(density_ratio(1, 100, 'crit', 0.5j) - 1) < \
        abs(density_ratio(1, 10, 'crit', 0.5j) - 1)
    z = numpy.array([0.5j, 0])
    gaps = [abs(density_ratio(2, N, 'zeros', z) - 1)
            for N in (4, 8, 16, 24)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-8


@pytest.mark.parametrize('N', [10, 25])
def test_zeros_ratio_inversion_invariance(N):
    # Infinity is a real point, so the ratio does not tend to 1 as
    # Im z -> infinity. For zeros the inversion z -> 1/z preserves both
    # ensembles, hence ratio(100i) = ratio(0.01i).
    big = density_ratio(1, N, 'zeros', 100j)
    small = density_ratio(1, N, 'zeros', 0.01j)
    assert big == pytest.approx(small, rel=1e-6)
    assert big < 0.1


@pytest.mark.parametrize('z', [0.5j, 0.5 + 0.5j, 0.3 + 0.8j])
def test_convergence_bound(z):
    lam = lambda_z(z)
    rate = 0.9 * lam
    Ns = numpy.arange(4, 61, 2)
    gaps = numpy.array([abs(density_ratio(1, int(N), 'crit', z) - 1)
                        for N in Ns])
    # Fit K on the small-N part, then check the bound on the whole range.
    fit = Ns <= 20
    K = numpy.max(gaps[fit] * numpy.exp(rate * Ns[fit]))
    assert numpy.all(gaps <= K * numpy.exp(-rate * Ns) + 1e-13)


@pytest.mark.parametrize('m,mode,z', [(1, 'crit', 0.5 + 0.5j),
                                      (1, 'zeros', 0.5j),
                                      (2, 'zeros', [0.5j, 0]),
                                      (2, 'crit', [0.5j, 0])])
def test_difference_decays_at_twice_lambda(m, mode, z):
    # The density depends on the pure covariance only through even powers,
    # so the real/complex gap decays at 2 lambda_z. Fitting a N^p prefactor
    # along with the rate makes this visible at moderate N.
    fit = decay_rate_fit(m, mode, z, range(10, 61), log_prefactor=True)
    assert fit.n_points >= 20
    assert abs(fit.fitted_rate / (2 * fit.theoretical_rate) - 1) < 0.12


@pytest.mark.parametrize('mode', ['zeros', 'crit'])
def test_zero_padding_keeps_rate(mode):
    Ns = range(60, 241, 5)
    one = decay_rate_fit(1, mode, 0.2j, Ns)
    two = decay_rate_fit(2, mode, [0.2j, 0], Ns)
    assert one.theoretical_rate == pytest.approx(two.theoretical_rate)
    assert abs(two.fitted_rate / one.fitted_rate - 1) < 0.1


def test_rate_unresolvable_far_from_real_locus():
    with pytest.raises(RateUnresolvable):
        decay_rate_fit(1, 'crit', 0.99j, range(10, 21))


def test_batch_matches_single():
    spec = EnsembleSpec(2, 6, 'real', 'crit')
    rng = numpy.random.default_rng(8)
    z = rng.normal(size=(4, 2)) + 1j * rng.uniform(0.2, 1, size=(4, 2))
    batch = density_batch(spec, z)
    for b in range(4):
        assert batch[b] == pytest.approx(density(spec, z[b]).density,
                                         rel=1e-13)
        assert batch[b] > 0
