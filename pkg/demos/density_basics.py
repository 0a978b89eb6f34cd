"""
Densities from the Kac-Rice pipeline next to the explicit formulas.

Run: python demos/density_basics.py
"""
import numpy as np

from krlab import EnsembleSpec, density, density_batch
from krlab.closedform import su2_crit_density, su_zero_density, so2_crit_density

# Critical points of a complex-coefficient degree 10 polynomial at the origin.
# The explicit formula gives 2(N - 1)/pi there.
spec = EnsembleSpec(m=1, N=10, field='complex', mode='crit')
print('crit, complex, z=0:', density(spec, 0j).density, 18 / np.pi)

# Along a line the two agree to rounding.
z = np.linspace(-2, 2, 9) + 0.5j
print(np.c_[z.real, density_batch(spec, z), su2_crit_density(10, z)])

# Common zeros of m polynomials in m variables: the density is
# m! N^m / pi^m / (1 + |z|^2)^(m + 1), which integrates to N^m.
for m in (1, 2, 3):
    s = EnsembleSpec(m, 5, 'complex', 'zeros')
    origin = np.zeros(m)
    print('zeros m=%d:' % m, density(s, origin).density,
          su_zero_density(m, 5, origin))

# Real coefficients: the density differs from the complex one by an error
# term that is negative near the real axis.
real = EnsembleSpec(1, 10, 'real', 'crit')
for y in (0.05, 0.2, 0.5, 1.0):
    w = 0.3 + 1j * y
    print('y=%.2f  real %.6f  closed form %.6f  complex %.6f'
          % (y, density(real, w).density, so2_crit_density(10, w),
             density(spec, w).density))

# Points of R^m are rejected for the real field.
try:
    density(real, 0.3 + 0j)
except Exception as exc:
    print(type(exc).__name__, exc)
