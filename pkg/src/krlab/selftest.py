"""Quick invariant suites run by ``krlab selftest``."""

import math

import numpy

from .closedform import so2_crit_density, su2_crit_density, su_zero_density
from .ensemble import EnsembleSpec
from .kacrice import density
from .kacrice import density_batch
from .wick import build_xi_map, wick_det_expectation, wick_mc_oracle


def _closed_form_suite(rng):
    worst = 0.0
    for N in (2, 5, 10, 25, 100):
        z = rng.uniform(-2, 2, 10) + 1j * rng.uniform(-2, 2, 10)
        got = density_batch(EnsembleSpec(1, N, 'complex', 'crit'), z)
        worst = max(worst, numpy.max(numpy.abs(got / su2_crit_density(N, z)
                                               - 1)))
    for m in (1, 2, 3):
        z = rng.normal(size=(5, m)) + 1j * rng.normal(size=(5, m))
        got = density_batch(EnsembleSpec(m, 4, 'complex', 'zeros'), z)
        worst = max(worst, numpy.max(numpy.abs(got / su_zero_density(m, 4, z)
                                               - 1)))
    return worst, 1e-8


def _real_suite(rng):
    worst = 0.0
    for N in (10, 25):
        for _ in range(5):
            z = complex(rng.uniform(-1, 1), rng.uniform(0.2, 1.0))
            got = density(EnsembleSpec(1, N, 'real', 'crit'), z).density
            worst = max(worst, abs(got / so2_crit_density(N, z) - 1))
    return worst, 1e-5


def _wick_suite(rng):
    # Worst |analytic - sampled| in standard errors.
    worst = 0.0
    for m in (1, 2):
        xmap = build_xi_map(m, 'crit')
        root = rng.normal(size=(xmap.n_hat, xmap.n_hat))
        Lambda = root @ root.T / xmap.n_hat
        exact = wick_det_expectation(Lambda, xmap)
        mean, se = wick_mc_oracle(Lambda, xmap, 200_000, rng)
        worst = max(worst, abs(mean - exact) / se)
    return worst, 4.0


def _symmetry_suite(rng):
    worst = 0.0
    spec = EnsembleSpec(1, 12, 'real', 'crit')
    for _ in range(5):
        z = complex(rng.uniform(-1, 1), rng.uniform(0.2, 1.0))
        ref = density(spec, z).density
        for w in (z.conjugate(), -z):
            worst = max(worst, abs(density(spec, w).density / ref - 1))
    spec = EnsembleSpec(1, 12, 'complex', 'crit')
    z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    ref = density(spec, z).density
    for theta in rng.uniform(0, 2 * math.pi, 4):
        w = z * complex(math.cos(theta), math.sin(theta))
        worst = max(worst, abs(density(spec, w).density / ref - 1))
    return worst, 1e-10


SUITES = [
    ('closed-form vs pipeline', _closed_form_suite),
    ('real-field cross-check', _real_suite),
    ('wick vs sampling oracle', _wick_suite),
    ('symmetry', _symmetry_suite),
]


def run(seed=0, out=print):
    """Run every suite; return True when all pass."""
    rng = numpy.random.default_rng(seed)
    ok = True
    for name, suite in SUITES:
        err, tol = suite(rng)
        passed = err <= tol
        ok &= passed
        out('%-4s %-26s max error %.3e (tolerance %.1e)'
            % ('PASS' if passed else 'FAIL', name, err, tol))
    out('overall: %s' % ('PASS' if ok else 'FAIL'))
    return ok
