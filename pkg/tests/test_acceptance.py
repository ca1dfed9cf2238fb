"""End-to-end acceptance gate.

One test per criterion; each prints a single PASS/FAIL line (visible in
captured output on failure, and mirrored by the pytest -v status) and
enforces its runtime limit.
"""

import json
import math
import statistics
import time

from ollga import (
    BitString,
    GaParams,
    JumpProblem,
    escape_probability_exact,
    escape_time_exact,
    hamming,
    mutate_exact,
    optimal_params,
    run_ga,
)
import ollga.engine as engine
from ollga.cli import execute
from ollga.experiments import (
    ExperimentConfig,
    compare_baseline,
    geometric_chisquare,
    run_escape_experiment,
    run_reach_local_experiment,
    summarize,
)
from ollga.rng import RngStream
from ollga.theory import q_ell_exact, upper_bound_escape


def _report(num: int, ok: bool, detail: str, elapsed: float, limit: float) -> None:
    in_time = elapsed <= limit
    verdict = "PASS" if (ok and in_time) else "FAIL"
    print(
        f"[criterion {num:2d}] {verdict}: {detail} ({elapsed:.1f}s / limit {limit:.0f}s)"
    )
    assert ok, f"criterion {num}: {detail}"
    assert in_time, f"criterion {num}: took {elapsed:.1f}s, limit {limit:.0f}s"


def _grid():
    """Shared parameter grid for the bound criteria: 576 combinations
    with n <= 32 and k <= n/4."""
    for n in (8, 16, 24, 32):
        for k in range(2, n // 4 + 1):
            for lam_m in (1, 4, 16):
                for lam_c in (1, 4, 16):
                    for (p, c) in (
                        (0.25, 0.25), (0.5, 0.5), (0.75, 0.75), (0.25, 0.75)
                    ):
                        yield n, k, GaParams(p, c, lam_m, lam_c)


def test_criterion_01_exact_formula_oracle(exact_p_oracle):
    t0 = time.monotonic()
    pairs = [(n, 2) for n in range(8, 13)] + [(12, 3)]
    checked = 0
    worst = 0.0
    for (n, k) in pairs:
        problem = JumpProblem(n, k)
        for lam_m in (1, 2, 4):
            for lam_c in (1, 2, 4):
                for p in (0.2, 0.4, 0.6, 0.8):
                    for c in (0.2, 0.4, 0.6, 0.8):
                        got = escape_probability_exact(
                            problem, GaParams(p, c, lam_m, lam_c)
                        ).value
                        want = float(exact_p_oracle(n, k, p, c, lam_m, lam_c))
                        rel = abs(got - want) / want
                        worst = max(worst, rel)
                        checked += 1
    elapsed = time.monotonic() - t0
    _report(
        1, worst <= 1e-10,
        f"{checked} big-rational comparisons, worst rel err {worst:.2e}",
        elapsed, 10,
    )


def test_criterion_02_simulation_matches_theory():
    t0 = time.monotonic()
    details = []
    ok = True
    for (n, k) in ((12, 2), (16, 2), (12, 3)):
        problem = JumpProblem(n, k)
        params = optimal_params(problem, "escape")
        P = escape_probability_exact(problem, params).value
        config = ExperimentConfig(problem, params, "local_optimum", 5000, 11)
        result = run_escape_experiment(config)
        iters = [r.outcome.iterations for r in result.records]
        stats = summarize([float(v) for v in iters[:2000]])
        z = abs(stats.mean - 1 / P) / stats.std_error
        _, pvalue = geometric_chisquare(iters, P)
        ok = ok and z <= 3 and pvalue >= 0.01
        details.append(f"({n},{k}) z={z:.2f} chi2-p={pvalue:.3f}")
    elapsed = time.monotonic() - t0
    _report(2, ok, "; ".join(details), elapsed, 120)


def test_criterion_03_upper_bound_p_grid():
    t0 = time.monotonic()
    checked = 0
    violations = 0
    for n, k, params in _grid():
        P = escape_probability_exact(JumpProblem(n, k), params).value
        bound = params.lambda_m * (params.lambda_c + 1) * (k / (2 * n)) ** k
        if not P <= bound + 1e-12:
            violations += 1
        checked += 1
    elapsed = time.monotonic() - t0
    _report(
        3, checked >= 200 and violations == 0,
        f"{checked} combinations, {violations} violations", elapsed, 30,
    )


def test_criterion_04_lower_bound_corollary_grid():
    t0 = time.monotonic()
    checked = 0
    violations = 0
    for n, k, params in _grid():
        P = escape_probability_exact(JumpProblem(n, k), params).value
        evals = (params.lambda_m + params.lambda_c) / P
        if not evals >= 2 * (2 * n / k) ** (k / 2) - 1:
            violations += 1
        checked += 1
    elapsed = time.monotonic() - t0
    _report(
        4, checked >= 200 and violations == 0,
        f"{checked} combinations, {violations} violations", elapsed, 30,
    )


def test_criterion_05_runtime_bound_sandwich():
    t0 = time.monotonic()
    checked = 0
    violations = 0
    for n, k, params in _grid():
        if params.p * n < 2 * k - 1e-12:
            continue
        problem = JumpProblem(n, k)
        iters_exact, _ = escape_time_exact(problem, params)
        bound_iters, _ = upper_bound_escape(problem, params, q_mode="exact")
        if not iters_exact <= bound_iters:
            violations += 1
        checked += 1
    elapsed = time.monotonic() - t0
    _report(
        5, checked >= 200 and violations == 0,
        f"{checked} in-domain combinations, {violations} violations", elapsed, 30,
    )


def test_criterion_06_q_ell_lower_bound():
    t0 = time.monotonic()
    checked = 0
    worst = 1.0
    for n in range(50, 501, 50):
        for p in (1 / n, 2 / n, 0.01, 0.1, 0.3, 0.5):
            if p * n < 1:
                continue
            worst = min(worst, q_ell_exact(n, p))
            checked += 1
    elapsed = time.monotonic() - t0
    _report(6, worst >= 0.1, f"{checked} (n,p) points, min q_ell {worst:.4f}",
            elapsed, 5)


def test_criterion_07_escape_cost_scaling():
    t0 = time.monotonic()
    ns = (8, 16, 32, 64, 128)
    inv_p = []
    log_evals = []
    for n in ns:
        problem = JumpProblem(n, 2)
        params = optimal_params(problem, "escape")
        iters, evals = escape_time_exact(problem, params)
        inv_p.append(iters)
        log_evals.append(math.log(evals))
    slope, _ = statistics.linear_regression([math.log(n) for n in ns], log_evals)
    ok = max(inv_p) <= 100 and 0.85 <= slope <= 1.15
    elapsed = time.monotonic() - t0
    _report(
        7, ok, f"max 1/P = {max(inv_p):.2f} (<= 100), eval slope {slope:.3f}",
        elapsed, 5,
    )


def test_criterion_08_ga_vs_ea_advantage():
    t0 = time.monotonic()
    n, k = 16, 3
    problem = JumpProblem(n, k)
    params = optimal_params(problem, "escape")
    P = escape_probability_exact(problem, params).value
    rate = k / n
    q = rate**k * (1 - rate) ** (n - k)
    exact_ratio = (1 / q) / ((params.lambda_m + params.lambda_c) / P)
    config_ga = ExperimentConfig(problem, params, "local_optimum", 2000, 5)
    config_ea = ExperimentConfig(
        problem, "auto_escape", "local_optimum", 2000, 5, algorithm="opoea"
    )
    comparison = compare_baseline(config_ga, config_ea)
    z = abs(comparison.ratio - exact_ratio) / comparison.ratio_se
    ok = exact_ratio > 5 and z <= 3 and comparison.reliable
    elapsed = time.monotonic() - t0
    _report(
        8, ok,
        f"exact ratio {exact_ratio:.2f} (required > 5), "
        f"empirical {comparison.ratio:.2f} z={z:.2f}",
        elapsed, 180,
    )


def test_criterion_09_reach_local_scaling():
    t0 = time.monotonic()
    ns = (32, 64, 128)
    k = 2
    log_means = []
    for n in ns:
        pc = math.sqrt(k / n)
        params = GaParams(pc, pc, n // k, n // k)
        config = ExperimentConfig(JumpProblem(n, k), params, "random", 500, 7)
        result = run_reach_local_experiment(config)
        assert result.iterations.censored_count == 0
        log_means.append(math.log(result.iterations.mean))
    slope, _ = statistics.linear_regression([math.log(n) for n in ns], log_means)
    ok = 0.7 <= slope <= 1.3
    elapsed = time.monotonic() - t0
    _report(9, ok, f"reach-local iteration slope {slope:.3f}", elapsed, 180)


def _check_exact_ell(cases: int) -> int:
    rng = RngStream(601)
    bases = {n: BitString.random(n, rng) for n in range(4, 41)}
    done = 0
    for _ in range(cases):
        n = 4 + rng.next_below(37)
        ell = rng.next_below(n + 1)
        x = bases[n]
        assert hamming(x, mutate_exact(x, ell, rng)) == ell
        done += 1
    return done


def _check_elitism_and_accounting(min_cases: int) -> tuple[int, int]:
    problem = JumpProblem(16, 3)
    params = GaParams(0.43, 0.43, 2, 2)
    cost = params.lambda_m + params.lambda_c
    total_iters = 0
    seed = 0
    while total_iters < min_cases:
        out = run_ga(
            problem, params, "local_optimum", 10**7, RngStream(seed),
            record_trajectory=True,
        )
        seed += 1
        fits = [f for _, f in out.trajectory]
        assert fits == sorted(fits)
        assert len(fits) == out.iterations
        assert out.evaluations == 1 + out.iterations * cost
        if out.hit_optimum:
            assert out.evaluations - cost < out.first_hit_evaluation <= out.evaluations
        total_iters += out.iterations
    return total_iters, total_iters


def _check_determinism(cases: int) -> int:
    done = 0
    for seed in range(100):
        a, b = RngStream(seed), RngStream(seed)
        for _ in range(cases // 100):
            assert a.next_u64() == b.next_u64()
            done += 1
    problem = JumpProblem(12, 2)
    params = optimal_params(problem, "escape")
    for seed in range(20):
        x = run_ga(problem, params, "local_optimum", 10**6, RngStream(seed))
        y = run_ga(problem, params, "local_optimum", 10**6, RngStream(seed))
        assert x == y
    return done


def _check_plateau_geometry(cases: int) -> int:
    # parent on the plateau of (12, 3): ones at [0..9), zeros at [9..12).
    # For ell in (k..2k) a good mutant (flips all k zeros) lands in the
    # valley below every bad mutant, so the fittest mutant is good iff all
    # are; for ell >= 2k a good mutant beats every bad one, so the fittest
    # is good iff any is.
    n, k, lam_m = 12, 3, 3
    kernels = engine.kernels
    rng = RngStream(907)
    state = rng.state
    done = 0
    for _ in range(cases):
        ell = k + 1 + (done % (n - k))  # cycle ell over [k+1..n]
        goods = []
        fits = []
        for _ in range(lam_m):
            pos, state = kernels.sample_positions(n, ell, state)
            flipped_zeros = sum(1 for q in pos if q >= n - k)
            om = (n - k) - (ell - flipped_zeros) + flipped_zeros
            goods.append(flipped_zeros == k)
            fits.append(om + k if om <= n - k or om == n else n - om)
        best = max(fits)
        argmax_good = [g for g, f in zip(goods, fits) if f == best]
        if ell >= 2 * k:
            if any(goods):
                assert all(argmax_good)
        else:
            if all(goods):
                assert all(argmax_good)
            else:
                assert not any(argmax_good)
        done += 1
    return done


def test_criterion_10_engine_invariants():
    t0 = time.monotonic()
    n_ell = _check_exact_ell(100_000)
    n_elitism, n_accounting = _check_elitism_and_accounting(100_000)
    n_det = _check_determinism(100_000)
    n_geom = _check_plateau_geometry(100_000)
    elapsed = time.monotonic() - t0
    ok = min(n_ell, n_elitism, n_accounting, n_det, n_geom) >= 100_000
    _report(
        10, ok,
        f"cases: exact-ell {n_ell}, elitism {n_elitism}, accounting "
        f"{n_accounting}, determinism {n_det}, plateau-geometry {n_geom}",
        elapsed, 60,
    )


def test_criterion_11_cli_round_trip(tmp_path):
    t0 = time.monotonic()
    first = tmp_path / "first"
    second = tmp_path / "second"
    argv = [
        "escape", "--n", "12", "--k", "2", "--auto-params", "escape",
        "--trials", "200", "--seed", "31", "--out", str(first),
    ]
    assert execute(argv) == 0
    summary = first / "summary.json"
    assert json.loads(summary.read_text(encoding="utf-8"))["config"]["trials"] == 200
    assert execute(["escape", "--config", str(summary), "--out", str(second)]) == 0
    identical = (
        (first / "records.csv").read_bytes() == (second / "records.csv").read_bytes()
    )
    elapsed = time.monotonic() - t0
    _report(11, identical, "records.csv byte-identical after --config re-run",
            elapsed, 30)
