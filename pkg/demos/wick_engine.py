"""
E[det xi] for a Gaussian real Jacobian with Cauchy-Riemann structure,
compiled once into a polynomial in the covariance entries.

Run: python demos/wick_engine.py
"""
import numpy as np

from krlab.wick import (build_xi_map, wick_det_expectation, wick_mc_oracle,
                        wick_polynomial)

xmap = build_xi_map(1, 'crit')
print(xmap.sign * 1, xmap.index, sep='\n')
print(wick_det_expectation(np.array([[2.0, 0.5], [0.5, 3.0]]), xmap))

rng = np.random.default_rng(0)
for m, mode in ((1, 'crit'), (2, 'crit'), (2, 'zeros'), (3, 'crit')):
    xmap = build_xi_map(m, mode)
    rows, cols, coeffs = wick_polynomial(m, mode)
    root = rng.normal(size=(xmap.n_hat, xmap.n_hat))
    lam = root @ root.T / xmap.n_hat
    exact = wick_det_expectation(lam, xmap)
    mean, se = wick_mc_oracle(lam, xmap, 200_000, rng)
    print('m=%d %-5s %5d monomials  exact %.5f  sampled %.5f +- %.5f'
          % (m, mode, len(coeffs), exact, mean, se))
