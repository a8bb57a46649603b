"""Phase-modulation lock-in spectroscopy: first-harmonic lineshapes, error-signal
slopes and slope-optimal modulation parameters for CPT, two-level and
radio-optical double resonances."""
__version__ = "0.1.0"

from ._backend import USE_NUMBA
from .errors import DomainError
from .special import BesselTable, bessel_j, bessel_row, bessel_rows
from .lineshapes import (CptParams, DoubleResonanceParams, HarmonicResponse, SeriesTruncation,
                         TwoLevelParams, cpt_first_harmonic, cpt_in_phase_closed_form,
                         dr_first_harmonic, first_harmonic, make_params, two_level_central_amplitude,
                         two_level_first_harmonic, two_level_in_phase_low_freq)
from .lockin import (DemodulationSettings, SlopeResult, center_slope, error_signal, optimal_alpha,
                     slope_at_center, slope_components)
from .optimize import (OptimumPoint, SweepTable, lorentzian_pair_shift, maximize_slope,
                       stationarity_report, sweep_omega)
from .oracle import (OdeSettings, TimeDomainResult, integrate, integrate_cpt, integrate_dr,
                     integrate_two_level)
