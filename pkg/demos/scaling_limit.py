"""
Critical points of real polynomials near the real axis, zoomed in by
sqrt(N): (1/N) times the density at z / sqrt(N) tends to a universal profile.

Run: python demos/scaling_limit.py
"""
import numpy as np

from krlab.closedform import (near_real_slope, scaled_crit_density,
                              so2_crit_density)

for z in (0.5j, 1j, 1 + 1j):
    limit = scaled_crit_density('real', z).value
    print('z =', z, ' limit %.6f' % limit)
    for N in (100, 400, 1600):
        approx = so2_crit_density(N, z / np.sqrt(N)) / N
        print('   N=%5d  %.6f  diff %.2e' % (N, approx, abs(approx - limit)))

# The profile vanishes linearly at the real axis; slope at x:
for x in (0.0, 0.5, 1.0, 2.0):
    y = 0.01
    print('x=%.1f  slope %.5f  (density/y at y=0.01: %.5f)'
          % (x, near_real_slope(x),
             scaled_crit_density('real', complex(x, y)).value / y))
print('slope at 0 equals 3 sqrt(2) / (2 pi):', 3 * np.sqrt(2) / (2 * np.pi))
