"""Seeded Monte Carlo campaigns: escape-time, full-run and
reach-local-optimum measurement, parameter sweeps and the (1+1) EA
baseline comparison, with summary statistics.

Trials are embarrassingly parallel: each owns a seed derived from the
base seed and its index, results are aggregated in trial-index order, so
output is independent of scheduling. OLLGA_THREADS caps the worker pool
(default: available parallelism).
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .core import BitString, JumpProblem
from .engine import GaParams, RunOutcome, run_ga, run_opoea
from .rng import RngStream, derive_seed
from .theory import BoundReport, escape_time_exact, make_bound_report, optimal_params

ParamsSpec = Union[GaParams, str]  # GaParams | "auto_escape" | "auto_full"
StartSpec = Union[BitString, str]  # BitString | "local_optimum" | "random"


@dataclass(frozen=True)
class ExperimentConfig:
    problem: JumpProblem
    params: ParamsSpec
    start: StartSpec
    trials: int
    base_seed: int
    budget: Optional[int] = None  # None: derived from the exact expectation
    algorithm: str = "ollga"  # "ollga" | "opoea"
    opoea_rate: Optional[float] = None  # None: k/n

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.algorithm not in ("ollga", "opoea"):
            raise ValueError(f"unknown algorithm: {self.algorithm!r}")


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    variance: float
    std_error: float
    ci95_low: float
    ci95_high: float
    censored_count: int
    variance_is_defined: bool = True


@dataclass
class TrialRecord:
    trial: int
    seed: int
    outcome: RunOutcome


@dataclass
class ExperimentResult:
    records: list[TrialRecord]
    iterations: SummaryStats
    evaluations: SummaryStats
    metric: str  # what the two stats measure, for reporting


def summarize(samples: list[float], censored_count: int = 0) -> SummaryStats:
    """Mean, unbiased variance and a normal-approximation 95% CI.

    A singleton sample reports variance 0 with variance_is_defined=False
    rather than erroring, to keep sweeps over cheap cells total.
    """
    if not samples:
        raise ValueError("summarize requires at least one sample")
    count = len(samples)
    mean = math.fsum(samples) / count
    if count == 1:
        return SummaryStats(1, mean, 0.0, 0.0, mean, mean, censored_count, False)
    variance = math.fsum((s - mean) ** 2 for s in samples) / (count - 1)
    se = math.sqrt(variance / count)
    return SummaryStats(
        count=count,
        mean=mean,
        variance=variance,
        std_error=se,
        ci95_low=mean - 1.96 * se,
        ci95_high=mean + 1.96 * se,
        censored_count=censored_count,
    )


def resolve_params(config: ExperimentConfig) -> Optional[GaParams]:
    if config.algorithm == "opoea":
        return None
    if isinstance(config.params, GaParams):
        return config.params
    if config.params == "auto_escape":
        return optimal_params(config.problem, "escape")
    if config.params == "auto_full":
        return optimal_params(config.problem, "full_run")
    raise ValueError(f"unknown params spec: {config.params!r}")


def default_budget(config: ExperimentConfig, params: Optional[GaParams]) -> int:
    """10^4 x ceil(exact expected evaluations) when computable, else 10^8.

    Under the geometric escape law this makes the per-trial censoring
    probability below 1e-6.
    """
    problem = config.problem
    if config.algorithm == "opoea":
        rate = config.opoea_rate if config.opoea_rate is not None else (
            problem.k / problem.n
        )
        q = rate**problem.k * (1 - rate) ** (problem.n - problem.k)
        if q > 0:
            return 10**4 * math.ceil(1.0 / q)
        return 10**8
    assert params is not None
    try:
        _, evals = escape_time_exact(problem, params)
    except ValueError:
        return 10**8
    if math.isfinite(evals):
        return 10**4 * math.ceil(evals)
    return 10**8


def _thread_count() -> int:
    env = os.environ.get("OLLGA_THREADS")
    if env:
        count = int(env)
        if count < 1:
            raise ValueError("OLLGA_THREADS must be a positive integer")
        return count
    return os.cpu_count() or 1


def _run_trials(config: ExperimentConfig, stop_om: Optional[int] = None) -> list[TrialRecord]:
    params = resolve_params(config)
    budget = config.budget
    if budget is None:
        budget = default_budget(config, params)

    def one(index: int) -> TrialRecord:
        seed = derive_seed(config.base_seed, index)
        rng = RngStream(seed)
        if config.algorithm == "opoea":
            rate = config.opoea_rate if config.opoea_rate is not None else (
                config.problem.k / config.problem.n
            )
            outcome = run_opoea(config.problem, rate, config.start, budget, rng)
        else:
            outcome = run_ga(
                config.problem, params, config.start, budget, rng, stop_om=stop_om
            )
        return TrialRecord(index, seed, outcome)

    workers = min(_thread_count(), config.trials)
    if workers == 1:
        records = [one(i) for i in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(config.trials)))
    records.sort(key=lambda r: r.trial)
    return records


def _hit_stats(records: list[TrialRecord]) -> tuple[SummaryStats, SummaryStats]:
    hits = [r.outcome for r in records if r.outcome.hit_optimum]
    censored = len(records) - len(hits)
    if not hits:
        nan = float("nan")
        empty = SummaryStats(0, nan, nan, nan, nan, nan, censored, False)
        return empty, empty
    iters = summarize([float(o.iterations) for o in hits], censored)
    evals = summarize([float(o.first_hit_evaluation) for o in hits], censored)
    return iters, evals


def run_escape_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Escape-time measurement: every trial starts from a fresh uniformly
    random plateau point and runs until the optimum is sampled."""
    if config.start != "local_optimum":
        raise ValueError("escape experiment requires start='local_optimum'")
    records = _run_trials(config)
    iters, evals = _hit_stats(records)
    return ExperimentResult(records, iters, evals, metric="to_first_optimum_hit")


def run_full_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Full-run measurement from uniform random initialization."""
    if config.start != "random":
        raise ValueError("full-run experiment requires start='random'")
    records = _run_trials(config)
    iters, evals = _hit_stats(records)
    return ExperimentResult(records, iters, evals, metric="to_first_optimum_hit")


def _reached_plateau(outcome: RunOutcome, problem: JumpProblem) -> bool:
    # parent one-count >= n-k <=> fitness >= n (OneMax branch) or in the
    # valley (fitness < k) or at the optimum
    return outcome.hit_optimum or outcome.final_fitness >= problem.n or (
        outcome.final_fitness < problem.k
    )


def run_reach_local_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Iterations until the parent first reaches one-count >= n-k
    (or the optimum), from uniform random initialization."""
    if config.start != "random":
        raise ValueError("reach-local experiment requires start='random'")
    if config.algorithm != "ollga":
        raise ValueError("reach-local experiment requires the GA")
    records = _run_trials(config, stop_om=config.problem.n - config.problem.k)
    done = [r.outcome for r in records if _reached_plateau(r.outcome, config.problem)]
    censored = len(records) - len(done)
    if not done:
        nan = float("nan")
        empty = SummaryStats(0, nan, nan, nan, nan, nan, censored, False)
        return ExperimentResult(records, empty, empty, metric="to_plateau")
    iters = summarize([float(o.iterations) for o in done], censored)
    evals = summarize([float(o.evaluations) for o in done], censored)
    return ExperimentResult(records, iters, evals, metric="to_plateau")


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Dispatch on the start spec: plateau starts measure escape,
    random starts measure a full run."""
    if config.start == "local_optimum":
        return run_escape_experiment(config)
    return run_full_experiment(config)


@dataclass
class SweepCell:
    coords: dict
    result: Optional[ExperimentResult]
    report: Optional[BoundReport]
    error: Optional[str] = None


_GRID_KEYS = ("n", "k", "p", "c", "lambda_m", "lambda_c", "lambda")


def sweep(
    grid: dict[str, list], template: ExperimentConfig, cell_limit: int = 10_000
) -> list[SweepCell]:
    """Cartesian product over grid axes; each cell runs the templated
    experiment and attaches a BoundReport. Cells with invalid parameters
    are marked errored and the sweep continues. Output is ordered
    lexicographically by grid coordinates."""
    if not grid:
        raise ValueError("grid must be non-empty")
    for key in grid:
        if key not in _GRID_KEYS:
            raise ValueError(f"unknown grid axis: {key!r}")
    keys = list(grid.keys())
    total = math.prod(len(v) for v in grid.values())
    if total > cell_limit:
        raise ValueError(f"sweep has {total} cells, limit is {cell_limit}")
    cells = []
    for values in itertools.product(*(grid[k] for k in keys)):
        coords = dict(zip(keys, values))
        try:
            cells.append(_run_cell(coords, template))
        except (ValueError, OverflowError) as exc:
            cells.append(SweepCell(coords, None, None, error=str(exc)))
    return cells


def _run_cell(coords: dict, template: ExperimentConfig) -> SweepCell:
    problem = JumpProblem(
        n=coords.get("n", template.problem.n), k=coords.get("k", template.problem.k)
    )
    config = replace(template, problem=problem)
    params_spec = template.params
    if any(k in coords for k in ("p", "c", "lambda_m", "lambda_c", "lambda")):
        base = params_spec if isinstance(params_spec, GaParams) else resolve_params(
            replace(config, params=params_spec)
        )
        lam = coords.get("lambda")
        params = GaParams(
            p=coords.get("p", base.p),
            c=coords.get("c", base.c),
            lambda_m=coords.get("lambda_m", lam if lam is not None else base.lambda_m),
            lambda_c=coords.get("lambda_c", lam if lam is not None else base.lambda_c),
        )
        config = replace(config, params=params)
    resolved = resolve_params(config)
    report = make_bound_report(problem, resolved) if resolved is not None else None
    result = run_experiment(replace(config, params=resolved or config.params))
    return SweepCell(coords, result, report)


@dataclass
class ComparisonResult:
    ga: ExperimentResult
    ea: ExperimentResult
    ratio: float  # mean EA evaluations / mean GA evaluations
    ratio_se: float  # propagated standard error
    reliable: bool  # false when either arm has censored trials


def compare_baseline(
    config_ga: ExperimentConfig, config_ea: ExperimentConfig
) -> ComparisonResult:
    """GA-vs-EA evaluation-count ratio with a propagated standard error."""
    if config_ga.problem != config_ea.problem:
        raise ValueError("both arms must share the same problem instance")
    ga = run_experiment(config_ga)
    ea = run_experiment(config_ea)
    m_ga, m_ea = ga.evaluations.mean, ea.evaluations.mean
    ratio = m_ea / m_ga
    ratio_se = abs(ratio) * math.sqrt(
        (ea.evaluations.std_error / m_ea) ** 2
        + (ga.evaluations.std_error / m_ga) ** 2
    )
    reliable = (
        ga.evaluations.censored_count == 0 and ea.evaluations.censored_count == 0
    )
    return ComparisonResult(ga, ea, ratio, ratio_se, reliable)


def geometric_chisquare(samples: list[int], p: float, min_expected: float = 5.0):
    """Chi-squared goodness of fit of positive-integer samples against
    Geometric(p) (support 1, 2, ...). Bins are consecutive values with a
    merged tail so every expected count is >= min_expected.

    Returns (statistic, p_value).
    """
    from scipy import stats

    count = len(samples)
    edges: list[int] = []  # inclusive upper bounds; a tail bin is implied
    closed_mass = 0.0  # total mass of closed bins
    bin_mass = 0.0  # mass of the bin under construction
    value = 1
    while True:
        bin_mass += p * (1 - p) ** (value - 1)
        tail_mass = 1 - closed_mass - bin_mass
        if tail_mass * count < min_expected:
            break  # fold the rest into the tail bin
        if bin_mass * count >= min_expected:
            edges.append(value)
            closed_mass += bin_mass
            bin_mass = 0.0
        value += 1
    probs = []
    prev = 0.0
    for e in edges:
        mass = 1 - (1 - p) ** e
        probs.append(mass - prev)
        prev = mass
    probs.append(1 - prev)  # tail
    observed = [0] * len(probs)
    for s in samples:
        for i, e in enumerate(edges):
            if s <= e:
                observed[i] += 1
                break
        else:
            observed[-1] += 1
    expected = [q * count for q in probs]
    stat, pvalue = stats.chisquare(observed, expected)
    return stat, pvalue
