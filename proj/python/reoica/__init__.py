"""Reservoir-expanded online ICA with RSI diagnostics (C++ core)."""

from ._core import (
    AggregationError,
    ConfigError,
    DataError,
    MetricError,
    ModeError,
    NotReadyError,
    NumericalError,
    ReoicaError,
    entry_condition,
    evaluate,
    fastica,
    generate_sources,
    hungarian_match,
    lag_corr_matrix,
    lr_schedule,
    make_inputs,
    random_mixing_matrix,
    rsi_diagnostics,
    run,
    run_experiment,
    running_si_sdr,
    si_sdr,
    symmetric_orthogonalize,
)

__all__ = [
    "AggregationError",
    "ConfigError",
    "DataError",
    "MetricError",
    "ModeError",
    "NotReadyError",
    "NumericalError",
    "ReoicaError",
    "entry_condition",
    "evaluate",
    "fastica",
    "generate_sources",
    "hungarian_match",
    "lag_corr_matrix",
    "lr_schedule",
    "make_inputs",
    "random_mixing_matrix",
    "rsi_diagnostics",
    "run",
    "run_experiment",
    "running_si_sdr",
    "si_sdr",
    "symmetric_orthogonalize",
]
__version__ = "0.1.0"
