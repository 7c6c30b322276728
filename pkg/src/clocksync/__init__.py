"""Two-node clock synchronization toolkit.

Simulates two-way timestamp exchanges under random delays, denoises the
timestamp matrix by low-rank approximation, jointly estimates clock skew,
offset, and fixed propagation delay by maximum likelihood, and benchmarks
estimator MSE against the Cramer-Rao lower bounds.
"""

from ._backend import HAS_NUMBA, get_backend
from .clock_model import ClockParams, to_local, to_reference
from .crlb import CrlbInputs, DegenerateGeometryError, crlb_offset, crlb_skew
from .denoise import (
    DenoiseConfig,
    SvdFactors,
    estimate_noise_std,
    feasibility_radius,
    lrma_denoise,
    svd_factors,
    svd_truncate,
)
from .estimator import EstimateReport, SingularSystemError, log_likelihood, mle_estimate
from .exchange_sim import (
    DelayModel,
    ExchangeLog,
    SchedulePlan,
    empirical_delay_moments,
    read_rows_csv,
    simulate_cycle,
    write_exchange_csv,
)
from .harness import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    TrialResult,
    emit_outputs,
    format_results_csv,
    parse_results_csv,
    run_experiment,
    run_trial,
)
from .matrix_forms import (
    ParamVector,
    StackedSystem,
    TimestampMatrix,
    build_stacked,
    build_timestamp_matrix,
    params_from_psi,
    read_matrix_csv,
    write_matrix_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ClockParams",
    "CrlbInputs",
    "DegenerateGeometryError",
    "DelayModel",
    "DenoiseConfig",
    "EstimateReport",
    "ExchangeLog",
    "ExperimentConfig",
    "HAS_NUMBA",
    "ParamVector",
    "ResultRow",
    "ResultTable",
    "SchedulePlan",
    "SingularSystemError",
    "StackedSystem",
    "SvdFactors",
    "TimestampMatrix",
    "TrialResult",
    "build_stacked",
    "build_timestamp_matrix",
    "crlb_offset",
    "crlb_skew",
    "emit_outputs",
    "empirical_delay_moments",
    "estimate_noise_std",
    "feasibility_radius",
    "format_results_csv",
    "get_backend",
    "log_likelihood",
    "lrma_denoise",
    "mle_estimate",
    "params_from_psi",
    "parse_results_csv",
    "read_matrix_csv",
    "read_rows_csv",
    "run_experiment",
    "run_trial",
    "simulate_cycle",
    "svd_factors",
    "svd_truncate",
    "to_local",
    "to_reference",
    "write_exchange_csv",
    "write_matrix_csv",
]
