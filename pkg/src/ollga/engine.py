"""The (1+(lambda,lambda)) GA with generalized parameters, plus a (1+1) EA
baseline, fully instrumented and deterministically seeded.

The hot per-iteration work is delegated to a kernel backend: the compiled
extension when available, otherwise the pure-Python twin. Both consume
the RNG stream identically, so outcomes do not depend on the backend.
Set OLLGA_PURE_PYTHON=1 to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    BitString,
    JumpProblem,
    jump_fitness_from_om,
    make_local_optimum,
)
from .rng import RngStream

if os.environ.get("OLLGA_PURE_PYTHON"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"


@dataclass(frozen=True)
class GaParams:
    """The four algorithm parameters: mutation rate p, crossover bias c,
    and the mutation / crossover offspring population sizes."""

    p: float
    c: float
    lambda_m: int
    lambda_c: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0,1], got {self.p}")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must be in [0,1], got {self.c}")
        if self.lambda_m < 1 or self.lambda_c < 1:
            raise ValueError("lambda_m and lambda_c must be >= 1")


@dataclass
class RunOutcome:
    """Instrumented result of one run."""

    iterations: int
    evaluations: int
    hit_optimum: bool
    final_fitness: int
    first_hit_evaluation: Optional[int] = None
    trajectory: Optional[list[tuple[int, int]]] = None


Start = Union[BitString, str]  # BitString | "random" | "local_optimum"


def sample_ell(n: int, p: float, rng: RngStream) -> int:
    """Mutation radius: one Bin(n, p) draw."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    ell, rng.state = kernels.binomial(n, p, rng.state)
    return ell


def mutate_exact(x: BitString, ell: int, rng: RngStream) -> BitString:
    """Flip exactly ell bits, the subset uniform over all C(n, ell)."""
    if not 0 <= ell <= x.n:
        raise ValueError(f"ell={ell} out of [0..{x.n}]")
    positions, rng.state = kernels.sample_positions(x.n, ell, rng.state)
    return x.flip(positions)


def mutation_phase(
    x: BitString, problem: JumpProblem, params: GaParams, rng: RngStream
) -> tuple[BitString, int, int]:
    """Draw ell, create lambda_m radius-ell mutants, return the fittest.

    Ties are broken uniformly at random. Returns (x', ell, evaluations).
    """
    ell = sample_ell(x.n, params.p, rng)
    winner, _, rng.state = kernels.mutation_phase(
        bytearray(x.to_bytes()), x.ones_count, problem.k, ell, params.lambda_m,
        rng.state,
    )
    return x.flip(winner), ell, params.lambda_m


def crossover(x: BitString, x_prime: BitString, c: float, rng: RngStream) -> BitString:
    """Biased uniform crossover: where x and x' differ, take the x' value
    independently with probability c."""
    if x.n != x_prime.n:
        raise ValueError(f"length mismatch: {x.n} != {x_prime.n}")
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must be in [0,1], got {c}")
    differ = [i for i in range(x.n) if x[i] != x_prime[i]]
    subset, rng.state = kernels.select_biased(differ, c, rng.state)
    return x.flip(subset)


def crossover_phase(
    x: BitString,
    x_prime: BitString,
    problem: JumpProblem,
    params: GaParams,
    rng: RngStream,
) -> tuple[BitString, int]:
    """Create lambda_c crossover offspring of (x, x'), return the fittest.

    x' itself does not compete. Ties broken uniformly at random.
    """
    differ = [i for i in range(x.n) if x[i] != x_prime[i]]
    winner, _, rng.state = kernels.crossover_phase(
        bytearray(x.to_bytes()), x.ones_count, problem.k, differ, params.c,
        params.lambda_c, rng.state,
    )
    return x.flip(winner), params.lambda_c


def ga_iteration(
    x: BitString, problem: JumpProblem, params: GaParams, rng: RngStream
) -> tuple[BitString, int, bool]:
    """One full iteration with elitist (>=) acceptance.

    Returns (next parent, evaluations, sampled_optimum) where
    sampled_optimum is true iff any offspring evaluated this iteration
    is the global optimum.
    """
    if x.n != problem.n:
        raise ValueError(f"bit string length {x.n} != problem n {problem.n}")
    buf = bytearray(x.to_bytes())
    _, hit, rng.state = kernels.ga_iteration(
        buf, x.ones_count, problem.k, params.p, params.c,
        params.lambda_m, params.lambda_c, rng.state,
    )
    return BitString(buf), params.lambda_m + params.lambda_c, hit > 0


def _resolve_start(problem: JumpProblem, start: Start, rng: RngStream) -> BitString:
    if isinstance(start, BitString):
        if start.n != problem.n:
            raise ValueError(f"start length {start.n} != problem n {problem.n}")
        return start
    if start == "random":
        return BitString.random(problem.n, rng)
    if start == "local_optimum":
        return make_local_optimum(problem, rng)
    raise ValueError(f"unknown start spec: {start!r}")


def run_ga(
    problem: JumpProblem,
    params: GaParams,
    start: Start,
    budget: int,
    rng: RngStream,
    record_trajectory: bool = False,
    stop_om: Optional[int] = None,
) -> RunOutcome:
    """Run until the optimum is sampled anywhere or the budget is spent.

    The initial individual counts as one evaluation; first_hit_evaluation
    is the index of the first evaluation that samples the optimum,
    whether at initialization, in the mutation phase or in the crossover
    phase. With stop_om set, the run also stops once the parent's
    one-count reaches it (used for reach-local measurements).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n, k = problem.n, problem.k
    x0 = _resolve_start(problem, start, rng)
    parent = bytearray(x0.to_bytes())
    om = x0.ones_count
    evals = 1
    iterations = 0
    trajectory: Optional[list[tuple[int, int]]] = [] if record_trajectory else None
    if om == n:
        return RunOutcome(0, 1, True, jump_fitness_from_om(problem, n), 1, trajectory)
    hit_eval: Optional[int] = None
    cost = params.lambda_m + params.lambda_c
    while evals < budget:
        if stop_om is not None and om >= stop_om:
            break
        om, hit, rng.state = kernels.ga_iteration(
            parent, om, k, params.p, params.c,
            params.lambda_m, params.lambda_c, rng.state,
        )
        iterations += 1
        if hit:
            hit_eval = evals + hit
        evals += cost
        if trajectory is not None:
            trajectory.append((iterations, jump_fitness_from_om(problem, om)))
        if hit_eval is not None:
            break
    return RunOutcome(
        iterations=iterations,
        evaluations=evals,
        hit_optimum=hit_eval is not None,
        final_fitness=jump_fitness_from_om(problem, om),
        first_hit_evaluation=hit_eval,
        trajectory=trajectory,
    )


def run_opoea(
    problem: JumpProblem,
    mutation_rate: float,
    start: Start,
    budget: int,
    rng: RngStream,
    record_trajectory: bool = False,
) -> RunOutcome:
    """Classic (1+1) EA: standard bit mutation, elitist (>=) acceptance."""
    if not 0.0 < mutation_rate < 1.0:
        raise ValueError(f"mutation rate must be in (0,1), got {mutation_rate}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n, k = problem.n, problem.k
    x0 = _resolve_start(problem, start, rng)
    parent = bytearray(x0.to_bytes())
    om = x0.ones_count
    evals = 1
    iterations = 0
    trajectory: Optional[list[tuple[int, int]]] = [] if record_trajectory else None
    if om == n:
        return RunOutcome(0, 1, True, jump_fitness_from_om(problem, n), 1, trajectory)
    hit_eval: Optional[int] = None
    while evals < budget:
        om, hit, rng.state = kernels.ea_iteration(
            parent, om, k, mutation_rate, rng.state
        )
        iterations += 1
        evals += 1
        if hit:
            hit_eval = evals
        if trajectory is not None:
            trajectory.append((iterations, jump_fitness_from_om(problem, om)))
        if hit_eval is not None:
            break
    return RunOutcome(
        iterations=iterations,
        evaluations=evals,
        hit_optimum=hit_eval is not None,
        final_fitness=jump_fitness_from_om(problem, om),
        first_hit_evaluation=hit_eval,
        trajectory=trajectory,
    )
