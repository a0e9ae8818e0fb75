"""Crisis-time collective behaviour in stock ensembles.

Windowed pairwise Granger causality, fixed-recurrence-rate auto-RQA, and a
geometric Brownian motion model driven by a common external field.
"""

__version__ = "0.1.0"

from .errors import CrisisGCError, InputError, NumericalError
from .granger import (
    GcConfig,
    causality_matrix,
    correlation_matrix,
    exceedance_fraction,
    gc_test,
    mean_causality_series,
)
from .market import (
    DrivenGbmParams,
    Epoch,
    ExternalField,
    GbmParams,
    build_external_field,
    calibrate_from_series,
    simulate_driven_gbm,
    simulate_gbm,
    synthetic_field,
)
from .numstat import RandomSource, f_sf, ols, pearson_corr
from .rqa import calibrate_epsilon, recurrence_quantifiers, windowed_arqa
from .series import Ensemble, Series, WindowSpec, adf_stationarity, log_returns, windows
