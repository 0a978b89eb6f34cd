"""
Sample random polynomials, find their critical points, and compare the
histogram with the analytic density.

Run: python demos/monte_carlo.py
"""
import numpy as np

from krlab import EnsembleSpec
from krlab.montecarlo import build_histogram, compare_histogram

edges = np.linspace(-2, 2, 11)
for field, band in (('complex', None), ('real', 0.2)):
    spec = EnsembleSpec(1, 25, field, 'crit')
    hist = build_histogram(spec, 4000, seed=1, re_edges=edges,
                           im_edges=edges, real_band=band)
    z, summary = compare_histogram(hist)
    print(field, summary)
    # z-scores, real part across, imaginary part down
    print(np.array2string(z.T[::-1], precision=1, suppress_small=True,
                          max_line_width=120))
