"""Goodness-of-fit tests for the standard uniform distribution.

A pair-kernel test for complete samples with an exact reweighted extension
to right-censored data, four classical competitors with Monte Carlo
calibration, and a simulation engine that reproduces the published
type-I-error and power tables.
"""

__version__ = "0.1.0"

from .censored import (
    IpcwWeights,
    KaplanMeierCurve,
    censored_delta,
    censored_null_variance,
    censored_test,
    censoring_survival,
    conditional_kernel_mean,
    ipcw_weights,
    km_at,
    residual_weight,
)
from .classical import (
    CriticalValueTable,
    classical_test,
    frozini_stat,
    ks_stat,
    mc_critical_value,
    q_stat,
    sherman_stat,
)
from .delta import NULL_VARIANCE, TestResult, delta_orderstat, delta_test, delta_ustat, pair_kernel
from .distributions import (
    DistributionSpec,
    calibrate_censoring,
    censoring_rate,
    parse_distribution,
    sample_dist,
)
from .errors import (
    ArgumentError,
    CalibrationError,
    DegenerateDataError,
    DegenerateWeightError,
    DomainError,
    ParseError,
    SampleSizeError,
    UnifitError,
    UnsupportedCombinationError,
)
from .samples import (
    CensoredObservation,
    CensoredSample,
    OrderedSample,
    Sample,
    edf,
    normal_cdf,
    normal_quantile,
    sort_sample,
)
from .simulate import (
    PowerRow,
    PowerTable,
    SimulationConfig,
    rejection_rate,
    reproduce_table,
    table_ids,
)

__all__ = [
    "__version__",
    "ArgumentError",
    "CalibrationError",
    "CensoredObservation",
    "CensoredSample",
    "CriticalValueTable",
    "DegenerateDataError",
    "DegenerateWeightError",
    "DistributionSpec",
    "DomainError",
    "IpcwWeights",
    "KaplanMeierCurve",
    "NULL_VARIANCE",
    "OrderedSample",
    "ParseError",
    "PowerRow",
    "PowerTable",
    "Sample",
    "SampleSizeError",
    "SimulationConfig",
    "TestResult",
    "UnifitError",
    "UnsupportedCombinationError",
    "calibrate_censoring",
    "censored_delta",
    "censored_null_variance",
    "censored_test",
    "censoring_rate",
    "censoring_survival",
    "classical_test",
    "conditional_kernel_mean",
    "delta_orderstat",
    "delta_test",
    "delta_ustat",
    "edf",
    "frozini_stat",
    "ipcw_weights",
    "km_at",
    "ks_stat",
    "mc_critical_value",
    "normal_cdf",
    "normal_quantile",
    "pair_kernel",
    "parse_distribution",
    "q_stat",
    "rejection_rate",
    "reproduce_table",
    "residual_weight",
    "sample_dist",
    "sherman_stat",
    "sort_sample",
    "table_ids",
]
