"""
Ratio of real to complex densities along the imaginary axis.

Near the real axis real-coefficient polynomials have fewer complex critical
points; away from it the ratio settles to 1, faster for larger N.

Run: python demos/ratio_scan.py
"""
import numpy as np

from krlab import density_ratio

ys = np.linspace(0.02, 1.0, 50)
curves = {}
for mode in ('crit', 'zeros'):
    for N in (10, 25, 100):
        curves[mode, N] = np.array([density_ratio(1, N, mode, 1j * y)
                                    for y in ys])

print('    y   crit N=10   N=25   N=100 | zeros N=10  N=25   N=100')
for k in range(0, len(ys), 5):
    print('%5.2f' % ys[k],
          ' '.join('%7.4f' % curves['crit', N][k] for N in (10, 25, 100)),
          '|',
          ' '.join('%7.4f' % curves['zeros', N][k] for N in (10, 25, 100)))

