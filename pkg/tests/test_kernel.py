import itertools
import math

import mpmath
import numpy
import pytest

from krlab.errors import DomainError
from krlab.ensemble import EnsembleSpec, enumerate_multi_indices, multinomial_coeff
from krlab.kacrice import lambda_z
from krlab.kernel import (evaluate_normalized, jet_covariances,
                          kernel_partial)


def _orders(m):
    """All derivative multi-indices of order <= 2 in m variables."""
    out = []
    for total in range(3):
        for combo in itertools.combinations_with_replacement(range(m), total):
            alpha = [0] * m
            for q in combo:
                alpha[q] += 1
            out.append(tuple(alpha))
    return out


def _monomial_derivative(J, alpha, x):
    value = mpmath.mpc(1)
    for j, a, xq in zip(J, alpha, x):
        if a > j:
            return mpmath.mpc(0)
        value *= math.perm(j, a) * xq ** (j - a)
    return value


def brute_force(alpha, beta, z, w, N):
    """
    sum_J C(N,J) d^alpha z^J d^beta w^J, divided by (1+|z|^2)^N.

    Summed in 40-digit arithmetic: near 1 + z.w = 0 the float sum cancels
    catastrophically.
    """
    with mpmath.workdps(40):
        z = [mpmath.mpc(complex(c)) for c in z]
        w = [mpmath.mpc(complex(c)) for c in w]
        total = mpmath.mpc(0)
        for J in enumerate_multi_indices(len(z), N):
            total += (multinomial_coeff(N, J)
                      * _monomial_derivative(J, alpha, z)
                      * _monomial_derivative(J, beta, w))
        s = 1 + sum(abs(c) ** 2 for c in z)
        return complex(total / s ** N)


def test_trivial_partial():
    expr = kernel_partial((0, 0), (0, 0), 2)
    assert len(expr) == 1
    term = expr.terms[0]
    assert term.k == 0 and term.zexp == (0, 0) and term.coeff == 1


@pytest.mark.parametrize('N', [2, 5, 17])
def test_examples_at_origin(N):
    z = numpy.zeros(1)
    e11 = kernel_partial((1,), (1,), 1)
    e22 = kernel_partial((2,), (2,), 1)
    assert evaluate_normalized(e11, z, z, N).real == pytest.approx(N)
    assert evaluate_normalized(e22, z, z, N).real == \
        pytest.approx(2 * N * (N - 1))


def test_order_limit():
    with pytest.raises(DomainError):
        kernel_partial((3,), (0,), 1)
    with pytest.raises(DomainError):
        kernel_partial((1, 1), (0, 1, 1), 2)


@pytest.mark.parametrize('m', [1, 2, 3])
def test_matches_brute_force(m):
    rng = numpy.random.default_rng(m)
    orders = _orders(m)
    for N in (2, 5, 12):
        z = 0.6 * (rng.normal(size=m) + 1j * rng.normal(size=m))
        for alpha in orders:
            for beta in orders:
                expr = kernel_partial(alpha, beta, m)
                for w in (numpy.conj(z), z):
                    got = evaluate_normalized(expr, z, w, N)
                    ref = brute_force(alpha, beta, z, w, N)
                    scale = max(abs(ref), 1e-300)
                    if abs(ref) < 1e-13:
                        assert abs(got) < 1e-12
                    else:
                        assert abs(got - ref) / scale < 1e-12, \
                            (alpha, beta, N)


def test_pure_point_bound_and_large_N():
    z = numpy.array([0.5j])
    expr = kernel_partial((1,), (1,), 1)
    for N in (5, 20, 80):
        val = evaluate_normalized(expr, z, z, N)
        assert abs(val) <= (N * N + N) * 0.6 ** (N - 2) / 1.25 ** 2
    big = evaluate_normalized(expr, z, z, 10 ** 6)
    assert numpy.isfinite(big)
    herm = evaluate_normalized(expr, z, numpy.conj(z), 10 ** 6)
    assert numpy.isfinite(herm) and abs(herm) > 0


def test_invalid_pair_raises():
    expr = kernel_partial((0,), (0,), 1)
    with pytest.raises(DomainError):
        evaluate_normalized(expr, numpy.array([1.0]), numpy.array([2.0]), 4)


def test_jet_covariances_at_origin():
    for field in ('complex', 'real'):
        N = 7
        cov = jet_covariances(EnsembleSpec(1, N, field, 'crit'),
                              numpy.zeros(1))
        assert numpy.allclose(cov.H, numpy.diag([N, 2 * N * (N - 1)]))
        if field == 'complex':
            assert numpy.all(cov.P == 0)
        else:
            assert numpy.allclose(cov.P, numpy.diag([N, 2 * N * (N - 1)]))


def test_hermitian_block_matches_finite_sum_m2():
    rng = numpy.random.default_rng(9)
    N = 6
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    spec = EnsembleSpec(2, N, 'complex', 'crit')
    cov = jet_covariances(spec, z)
    orders = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    for i, a in enumerate(orders):
        for j, b in enumerate(orders):
            ref = brute_force(a, b, z, numpy.conj(z), N)
            assert abs(cov.H[i, j] - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize('m,mode', [(1, 'crit'), (2, 'crit'), (2, 'zeros'),
                                    (3, 'crit')])
def test_hermitian_psd_and_field_independent(m, mode):
    rng = numpy.random.default_rng(21)
    for _ in range(5):
        z = rng.normal(size=m) + 1j * rng.normal(size=m)
        real = jet_covariances(EnsembleSpec(m, 9, 'real', mode), z)
        cx = jet_covariances(EnsembleSpec(m, 9, 'complex', mode), z)
        assert numpy.array_equal(real.H, cx.H)
        assert numpy.array_equal(cx.H, cx.H.conj().T)
        assert numpy.all(cx.P == 0)
        eig = numpy.linalg.eigvalsh(cx.H)
        assert eig.min() >= -1e-10 * numpy.trace(cx.H).real


def test_pure_covariance_decay():
    z = numpy.array([0.5 + 0.5j])
    lam = lambda_z(z)
    for N in (10, 30, 60, 120):
        P = jet_covariances(EnsembleSpec(1, N, 'real', 'crit'), z).P
        bound = N ** 4 * math.exp(-lam * (N - 2))
        assert numpy.abs(P).max() <= bound


def test_batch_matches_single():
    spec = EnsembleSpec(2, 8, 'real', 'zeros')
    rng = numpy.random.default_rng(2)
    z = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    batch = jet_covariances(spec, z)
    for b in range(3):
        single = jet_covariances(spec, z[b])
        assert numpy.allclose(batch.P[b], single.P, rtol=1e-14, atol=0)
        assert numpy.allclose(batch.H[b], single.H, rtol=1e-14, atol=0)
