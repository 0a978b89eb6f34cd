"""
How fast the real-coefficient density approaches the complex one.

The gap |real - complex| shrinks exponentially in N. lambda_z bounds the
rate from below; in practice the gap falls at about 2 lambda_z, since the
density only sees even powers of the pure covariance E(f f).

Run: python demos/decay_rate.py
"""
import numpy as np

from krlab import decay_rate_fit, lambda_z

cases = [(1, 'crit', 0.5 + 0.5j), (1, 'zeros', 0.5j),
         (2, 'crit', [0.5j, 0]), (2, 'zeros', [0.5j, 0])]
for m, mode, z in cases:
    plain = decay_rate_fit(m, mode, z, range(10, 61))
    with_p = decay_rate_fit(m, mode, z, range(10, 61), log_prefactor=True)
    lam = lambda_z(z)
    print('m=%d %-5s z=%-12s lambda=%.4f  fit=%.4f  fit with N^p=%.4f  '
          '(2 lambda=%.4f)' % (m, mode, z, lam, plain.fitted_rate,
                               with_p.fitted_rate, 2 * lam))

# The raw differences, oscillating in sign under the envelope.
fit = decay_rate_fit(1, 'crit', 0.5 + 0.5j, range(10, 31))
for N, d in zip(fit.N, fit.diff):
    print(N, '%.3e' % d, '#' * int(max(0, 40 + np.log(d))))
