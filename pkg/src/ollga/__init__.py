"""(1+(lambda,lambda)) GA laboratory on jump functions: instrumented
simulation engine, exact log-space theory, and Monte Carlo cross-validation."""

__version__ = "0.1.0"

from .core import (
    BitString,
    JumpProblem,
    hamming,
    is_global_optimum,
    jump_fitness,
    make_local_optimum,
    one_max,
)
from .engine import (
    BACKEND,
    GaParams,
    RunOutcome,
    crossover,
    crossover_phase,
    ga_iteration,
    mutate_exact,
    mutation_phase,
    run_ga,
    run_opoea,
    sample_ell,
)
from .rng import RngStream, derive_seed
from .theory import (
    BoundReport,
    LogProb,
    escape_probability_exact,
    escape_time_exact,
    lower_bound_evals,
    make_bound_report,
    optimal_params,
    upper_bound_P,
    upper_bound_escape,
)

__all__ = [
    "BACKEND",
    "BitString",
    "BoundReport",
    "GaParams",
    "JumpProblem",
    "LogProb",
    "RngStream",
    "RunOutcome",
    "crossover",
    "crossover_phase",
    "derive_seed",
    "escape_probability_exact",
    "escape_time_exact",
    "ga_iteration",
    "hamming",
    "is_global_optimum",
    "jump_fitness",
    "lower_bound_evals",
    "make_bound_report",
    "make_local_optimum",
    "mutate_exact",
    "mutation_phase",
    "one_max",
    "optimal_params",
    "run_ga",
    "run_opoea",
    "sample_ell",
    "upper_bound_P",
    "upper_bound_escape",
]
