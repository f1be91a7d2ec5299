"""Nelson-Aalen estimation with simultaneous confidence bands.

Estimates the integrated hazard of a counting process under the
multiplicative intensity model, resamples it with the weird bootstrap,
and builds bootstrap (symmetric and equal-tailed) as well as asymptotic
(Hall-Wellner / equal-precision, plus arcsine- and log-transformed)
simultaneous confidence bands.  A Monte Carlo harness measures actual
coverage of every band family.
"""

from .bands import (
    ASYMPTOTIC_METHODS,
    BOOTSTRAP_METHODS,
    METHODS,
    TRANSFORMED_METHODS,
    BandSettings,
    ConfidenceBand,
    asymptotic_band,
    bootstrap_band,
    critical_value_symmetric,
    critical_values_equal_tailed,
    transformed_band,
)
from .bootstrap import (
    SupStatistics,
    WeirdReplicate,
    t_star_extrema,
    weird_resample,
)
from .bridge import (
    EP_WEIGHT,
    HW_WEIGHT,
    SupQuantileTable,
    brownian_bridge_sup_quantile,
    build_sup_quantile_table,
)
from .errors import (
    DataFormatError,
    DegenerateBandError,
    DomainError,
    HazbandError,
    InvalidInputError,
)
from .process import (
    CountingPath,
    HazardEstimate,
    RiskPath,
    from_censored_sample,
    nelson_aalen,
)
from .simulation import (
    ALPHA_ORDER,
    COVERED,
    INTENSITIES,
    LEFT_MISS,
    METHOD_ORDER,
    RIGHT_MISS,
    CoverageTable,
    ExperimentConfig,
    IntensityModel,
    classify_band,
    coverage_experiment,
    generate_risk_path,
    simulate_counting,
    true_integrated_hazard,
)
from .stepfun import StepFunction, TimeInterval, evaluate

__version__ = "0.1.0"
