"""
krlab: densities of complex zeros and critical points of Gaussian random
polynomials with real (SO(m+1)) or complex (SU(m+1)) Kostlan coefficients.
"""

from .ensemble import (EnsembleSpec, Field, Mode, enumerate_multi_indices,
                       eval_jet, multinomial_coeff, sample_coefficients)
from .errors import (DegenerateCovariance, DomainError, NonFinite,
                     RateUnresolvable, RootFindFailure)
from .kacrice import (DecayFit, DensityResult, decay_rate_fit, density,
                      density_batch, density_ratio, lambda_z)
from .closedform import (near_real_slope, scaled_crit_density,
                         so2_crit_density, so2_crit_error, su2_crit_density,
                         su_zero_density)

__version__ = '0.1.0'
