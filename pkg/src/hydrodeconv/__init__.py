"""Water residence time estimation by constrained, regularized 1D
deconvolution of paired rainfall / aquifer-level time series."""

__version__ = "0.1.0"

from ._validation import NumericalError
from .signals import (
    apply_difference,
    convolve,
    correlate_lags,
    difference_gram,
    difference_matrix,
    is_causal,
    is_nonnegative,
    kernel_lags,
    project_causal_nonneg,
    smoothness_penalty,
)
from .synth import (
    KernelSpec,
    MultifractalParams,
    Scenario,
    levy_extremal,
    make_beta_kernel,
    make_scenario,
    simulate_rainfall,
    synthesize_observation,
)
from .solver import (
    DeconvResult,
    SolverConfig,
    convolution_gram,
    estimate_c,
    evaluate_objective,
    newton_step,
    run_am,
)
from .baseline import xcorr_estimate
from .select import (
    STRATEGIES,
    SweepEntry,
    SweepReport,
    StrategySelection,
    corr_coeff,
    default_lambda_grid,
    lambda_grid,
    mean_residence_time,
    real_data_lambda_grid,
    select_lambda,
    snr_db,
    sweep,
)
from .bench import BenchSpec, run_bench
from .estimators import AMDeconvolver, GridSearchDeconvolver, XCorrDeconvolver

__all__ = [
    "AMDeconvolver",
    "BenchSpec",
    "DeconvResult",
    "GridSearchDeconvolver",
    "KernelSpec",
    "MultifractalParams",
    "NumericalError",
    "STRATEGIES",
    "Scenario",
    "SolverConfig",
    "StrategySelection",
    "SweepEntry",
    "SweepReport",
    "XCorrDeconvolver",
    "apply_difference",
    "convolve",
    "convolution_gram",
    "corr_coeff",
    "correlate_lags",
    "default_lambda_grid",
    "difference_gram",
    "difference_matrix",
    "estimate_c",
    "evaluate_objective",
    "is_causal",
    "is_nonnegative",
    "kernel_lags",
    "lambda_grid",
    "levy_extremal",
    "make_beta_kernel",
    "make_scenario",
    "mean_residence_time",
    "newton_step",
    "project_causal_nonneg",
    "real_data_lambda_grid",
    "run_am",
    "run_bench",
    "select_lambda",
    "simulate_rainfall",
    "smoothness_penalty",
    "snr_db",
    "sweep",
    "synthesize_observation",
    "xcorr_estimate",
]
