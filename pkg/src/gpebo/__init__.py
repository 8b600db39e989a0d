"""State observation for linear time-varying plants with delayed outputs.

The observer runs a copy of the plant alongside its transition matrix,
reduces state reconstruction to estimating the constant initial mismatch
between copy and plant, and recovers the state algebraically from the
estimate.  The package bundles the plant/scenario definitions, the
fixed-step integrator, gradient and decoupled (regressor-mixing)
estimators, excitation diagnostics, closed-form reference solutions, and
a CLI that renders sweep reports.
"""

from .model import (
    DelaySpec,
    NamedScenario,
    SystemSpec,
    benchmark_system,
    builtin_scenario,
    eval_delay,
    eval_system,
)
from .history import TrajectoryHistory
from .observer import (
    GainSpec,
    RegressionSample,
    build_regression,
    gradient_update,
    reconstruct,
)
from .drem import (
    DremConfig,
    MixedRegression,
    adjugate,
    default_ext_delays,
    drem_update,
    extend_regressor,
    mix,
)
from .integrate import (
    CoupledState,
    DivergenceError,
    Histories,
    SimulationResult,
    rhs,
    rk4_step,
    simulate,
)
from .excitation import (
    DelayRateError,
    ExcitationReport,
    pe_check,
    pe_integral,
    delayed_pe_integral,
)
from .oracle import LtiOracle, liouville_det, matrix_exponential, phi_closed_form
from .report import RunResult, emit_csv, emit_svg, format_pe_summary, write_pe_report
from .cli import ConfigError, RunConfig, main, run

__version__ = "0.1.0"

__all__ = [
    "SystemSpec",
    "DelaySpec",
    "NamedScenario",
    "benchmark_system",
    "builtin_scenario",
    "eval_delay",
    "eval_system",
    "TrajectoryHistory",
    "RegressionSample",
    "GainSpec",
    "build_regression",
    "gradient_update",
    "reconstruct",
    "DremConfig",
    "MixedRegression",
    "default_ext_delays",
    "adjugate",
    "extend_regressor",
    "mix",
    "drem_update",
    "CoupledState",
    "Histories",
    "SimulationResult",
    "DivergenceError",
    "rhs",
    "rk4_step",
    "simulate",
    "ExcitationReport",
    "DelayRateError",
    "pe_integral",
    "delayed_pe_integral",
    "pe_check",
    "LtiOracle",
    "phi_closed_form",
    "matrix_exponential",
    "liouville_det",
    "RunResult",
    "emit_csv",
    "emit_svg",
    "write_pe_report",
    "format_pe_summary",
    "RunConfig",
    "ConfigError",
    "run",
    "main",
]
