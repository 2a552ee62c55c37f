"""Software aging toolkit: LOWESS smoothing, aging curves, feedback-loop
model fitting and a simulated streaming server."""

from ._core import (
    WORKLOAD_L1,
    WORKLOAD_L2,
    AgingError,
    DomainError,
    FitReport,
    InputError,
    SimConfig,
    Workload,
    aging_curve,
    eval_model,
    fit,
    lowess,
    normalize,
    ode_residual,
    parse_workload,
    r_square,
    rejuvenate,
    rmse,
    run_cli,
    simulate,
)

__all__ = [
    "WORKLOAD_L1",
    "WORKLOAD_L2",
    "AgingError",
    "DomainError",
    "FitReport",
    "InputError",
    "SimConfig",
    "Workload",
    "aging_curve",
    "eval_model",
    "fit",
    "lowess",
    "normalize",
    "ode_residual",
    "parse_workload",
    "r_square",
    "rejuvenate",
    "rmse",
    "run_cli",
    "simulate",
]
