"""Command-line front end.

Pure orchestration: parses flags, delegates to the theory and experiments
modules, and serializes results. Every successful experiment invocation
writes records.csv, summary.json and plotdata.csv into --out; summary.json
echoes enough state (config, seeds, version) to reproduce the other files
byte-identically via --config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from . import __version__
from .core import JumpProblem
from .engine import BACKEND, GaParams
from .experiments import (
    ComparisonResult,
    ExperimentConfig,
    ExperimentResult,
    SweepCell,
    compare_baseline,
    default_budget,
    resolve_params,
    run_escape_experiment,
    run_full_experiment,
    run_reach_local_experiment,
    sweep,
)
from .theory import BoundReport, make_bound_report

_MAX_PLAIN = 2.0**53


def _num_field(out: dict, name: str, value: Optional[float]) -> None:
    """Emit a numeric field that may exceed double-precision integer
    range: plain when safe, else a decimal/log-space string with a
    companion *_is_log flag."""
    if value is None:
        out[name] = None
        out[name + "_is_log"] = False
    elif math.isfinite(value) and abs(value) < _MAX_PLAIN:
        out[name] = value
        out[name + "_is_log"] = False
    else:
        out[name] = repr(math.log(value)) if value > 0 else repr(value)
        out[name + "_is_log"] = value > 0


def _bounds_json(report: BoundReport) -> dict:
    out: dict = {}
    out["exact_p"] = report.exact_p.log_value
    out["exact_p_is_log"] = True
    _num_field(out, "exact_iters", report.exact_iters)
    _num_field(out, "exact_evals", report.exact_evals)
    out["q_ell_exact"] = report.q_ell
    out["upper_bound_p"] = report.upper_bound_p.log_value
    out["upper_bound_p_is_log"] = True
    _num_field(out, "lower_bound_evals", report.lower_bound_evals)
    _num_field(out, "thm_runtime_bound_iters", report.thm_runtime_bound_iters)
    _num_field(out, "thm_runtime_bound_evals", report.thm_runtime_bound_evals)
    out["in_validity_domain"] = report.in_validity_domain
    return out


def _stats_json(result: ExperimentResult) -> dict:
    return {
        "metric": result.metric,
        "iterations": asdict(result.iterations),
        "evaluations": asdict(result.evaluations),
    }


def emit_csv(records, path: Path) -> None:
    """Per-trial rows; fixed header and field order, LF newlines, UTF-8."""
    lines = [
        "trial,seed,iterations,evaluations,hit_optimum,"
        "first_hit_evaluation,final_fitness"
    ]
    for rec in records:
        o = rec.outcome
        first = "" if o.first_hit_evaluation is None else str(o.first_hit_evaluation)
        hit = "true" if o.hit_optimum else "false"
        lines.append(
            f"{rec.trial},{rec.seed},{o.iterations},{o.evaluations},"
            f"{hit},{first},{o.final_fitness}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _plot_row(x, result: ExperimentResult, report: Optional[BoundReport]) -> str:
    exact = "" if report is None else repr(report.exact_evals)
    bound = (
        ""
        if report is None or report.thm_runtime_bound_evals is None
        else repr(report.thm_runtime_bound_evals)
    )
    return (
        f"{x},{result.evaluations.mean!r},{result.evaluations.std_error!r},"
        f"{exact},{bound}"
    )


def emit_plotdata(rows: list[str], path: Path) -> None:
    lines = ["x,mean_evals,se_evals,exact_evals,bound_evals"] + rows
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_summary(path: Path, payload: dict) -> None:
    payload = {"artifact_version": __version__, "backend": BACKEND, **payload}
    path.write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def _add_problem_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, help="bit string length")
    sp.add_argument("--k", type=int, help="jump size (in [2..n])")


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=float, help="mutation rate")
    sp.add_argument("--c", type=float, help="crossover bias")
    sp.add_argument("--lambda-m", type=int, dest="lambda_m")
    sp.add_argument("--lambda-c", type=int, dest="lambda_c")
    sp.add_argument(
        "--auto-params",
        choices=("escape", "full"),
        help="derive p, c and lambdas from the runtime-optimal formulas "
        "(overrides explicit values with a warning)",
    )


def _add_experiment_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--budget", type=int, help="max evaluations per trial")
    sp.add_argument("--config", help="re-run from an echoed summary.json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ollga",
        description="(1+(lambda,lambda)) GA laboratory on jump functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("theory", help="exact P and all closed-form bounds")
    _add_problem_flags(sp)
    _add_param_flags(sp)
    sp.add_argument("--out", required=True)

    for name, help_text in (
        ("escape", "escape-time Monte Carlo from the local optimum"),
        ("run", "full-run Monte Carlo from random initialization"),
        ("reach-local", "iterations to reach the plateau"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _add_problem_flags(sp)
        _add_param_flags(sp)
        _add_experiment_flags(sp)
        sp.add_argument(
            "--start",
            choices=("local", "random"),
            help="override the command's default start",
        )
        sp.add_argument("--out", required=True)

    sp = sub.add_parser("sweep", help="grid sweep along one axis")
    _add_problem_flags(sp)
    _add_param_flags(sp)
    _add_experiment_flags(sp)
    sp.add_argument("--axis", choices=("n", "lambda", "k"), required=True)
    sp.add_argument("--values", required=True, help="comma-separated axis values")
    sp.add_argument("--start", choices=("local", "random"), default="local")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("compare", help="GA (auto escape) vs (1+1) EA baseline")
    _add_problem_flags(sp)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--ea-rate", type=float, dest="ea_rate", help="default k/n")
    sp.add_argument("--out", required=True)

    return parser


def _params_from_args(args, problem: JumpProblem) -> tuple[GaParams, Optional[str]]:
    """Returns (params, auto_mode). auto_mode is echoed for provenance."""
    explicit = [args.p, args.c, args.lambda_m, args.lambda_c]
    if args.auto_params:
        if any(v is not None for v in explicit):
            print(
                "warning: --auto-params overrides explicit --p/--c/--lambda-* values",
                file=sys.stderr,
            )
        mode = "escape" if args.auto_params == "escape" else "full_run"
        from .theory import optimal_params

        return optimal_params(problem, mode), args.auto_params
    missing = [
        flag
        for flag, v in zip(("--p", "--c", "--lambda-m", "--lambda-c"), explicit)
        if v is None
    ]
    if missing:
        raise ValueError(
            f"missing {', '.join(missing)} (or use --auto-params)"
        )
    return GaParams(args.p, args.c, args.lambda_m, args.lambda_c), None


def _config_json(
    command: str,
    problem: JumpProblem,
    params: Optional[GaParams],
    args,
    start: str,
    budget: int,
    extra: Optional[dict] = None,
) -> dict:
    cfg = {
        "command": command,
        "n": problem.n,
        "k": problem.k,
        "trials": args.trials,
        "seed": args.seed,
        "budget": budget,
        "start": start,
    }
    if params is not None:
        cfg.update(
            p=params.p,
            c=params.c,
            lambda_m=params.lambda_m,
            lambda_c=params.lambda_c,
        )
    if extra:
        cfg.update(extra)
    return cfg


def _load_config(args) -> None:
    """Overlay an echoed summary.json config onto the parsed args."""
    data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    cfg = data["config"]
    for key in ("n", "k", "p", "c", "lambda_m", "lambda_c", "trials", "seed", "budget"):
        if key in cfg:
            setattr(args, key, cfg[key])
    if cfg.get("start") in ("local", "local_optimum"):
        args.start = "local"
    elif cfg.get("start") == "random":
        args.start = "random"
    args.auto_params = None  # config carries resolved numeric values


def _require_problem(args) -> JumpProblem:
    if args.n is None or args.k is None:
        raise ValueError("--n and --k are required")
    return JumpProblem(args.n, args.k)


def _cmd_theory(args) -> int:
    problem = _require_problem(args)
    params, auto = _params_from_args(args, problem)
    report = make_bound_report(problem, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_summary(
        out / "summary.json",
        {
            "command": "theory",
            "config": {
                "command": "theory",
                "n": problem.n,
                "k": problem.k,
                "p": params.p,
                "c": params.c,
                "lambda_m": params.lambda_m,
                "lambda_c": params.lambda_c,
                "auto_params": auto,
            },
            "bounds": _bounds_json(report),
        },
    )
    return 0


def _run_experiment_command(args, command: str) -> int:
    if args.config:
        _load_config(args)
    problem = _require_problem(args)
    if command == "reach-local":
        if args.auto_params is None and args.p is None:
            # default reach-local setting: p = c = sqrt(k/n), lambda >= n/k
            pc = math.sqrt(problem.k / problem.n)
            lam = args.lambda_m or math.ceil(problem.n / problem.k)
            args.p = args.p if args.p is not None else pc
            args.c = args.c if args.c is not None else pc
            args.lambda_m = lam
            args.lambda_c = args.lambda_c or lam
    params, auto = _params_from_args(args, problem)
    default_start = "local_optimum" if command == "escape" else "random"
    start = default_start
    if getattr(args, "start", None):
        start = "local_optimum" if args.start == "local" else "random"
    config = ExperimentConfig(
        problem=problem,
        params=params,
        start=start,
        trials=args.trials,
        base_seed=args.seed,
        budget=args.budget,
    )
    budget = args.budget if args.budget is not None else default_budget(config, params)
    config = ExperimentConfig(
        problem=problem,
        params=params,
        start=start,
        trials=args.trials,
        base_seed=args.seed,
        budget=budget,
    )
    runner = {
        "escape": run_escape_experiment,
        "run": run_full_experiment,
        "reach-local": run_reach_local_experiment,
    }[command]
    result = runner(config)
    report = make_bound_report(problem, params) if 4 * problem.k <= problem.n else None

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(result.records, out / "records.csv")
    emit_plotdata([_plot_row(problem.n, result, report)], out / "plotdata.csv")
    summary = {
        "command": command,
        "config": _config_json(command, problem, params, args, start, budget),
        "stats": _stats_json(result),
    }
    if report is not None:
        summary["bounds"] = _bounds_json(report)
    _write_summary(out / "summary.json", summary)
    return 0


def _cmd_sweep(args) -> int:
    if args.config:
        _load_config(args)
    problem = _require_problem(args)
    values = [
        int(v) if args.axis in ("n", "lambda", "k") else float(v)
        for v in args.values.split(",")
    ]
    if not values:
        raise ValueError("--values must be non-empty")
    params_spec = (
        "auto_escape"
        if args.auto_params == "escape"
        else "auto_full"
        if args.auto_params == "full"
        else None
    )
    if params_spec is None:
        params, _ = _params_from_args(args, problem)
        params_spec = params
    start = "local_optimum" if args.start == "local" else "random"
    template = ExperimentConfig(
        problem=problem,
        params=params_spec,
        start=start,
        trials=args.trials,
        base_seed=args.seed,
        budget=args.budget,
    )
    cells = sweep({args.axis: values}, template)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    cell_summaries = []
    for cell in sorted(cells, key=lambda c: c.coords[args.axis]):
        entry: dict = {"coords": cell.coords}
        if cell.error is not None:
            entry["error"] = cell.error
        else:
            print(f"sweep cell {cell.coords}: done", file=sys.stderr)
            rows.append(_plot_row(cell.coords[args.axis], cell.result, cell.report))
            entry["stats"] = _stats_json(cell.result)
            if cell.report is not None:
                entry["bounds"] = _bounds_json(cell.report)
        cell_summaries.append(entry)
    emit_plotdata(rows, out / "plotdata.csv")
    _write_summary(
        out / "summary.json",
        {
            "command": "sweep",
            "config": {
                "command": "sweep",
                "n": problem.n,
                "k": problem.k,
                "axis": args.axis,
                "values": values,
                "trials": args.trials,
                "seed": args.seed,
                "budget": args.budget,
                "start": args.start,
            },
            "cells": cell_summaries,
        },
    )
    return 0


def _cmd_compare(args) -> int:
    problem = _require_problem(args)
    from .theory import optimal_params

    params = optimal_params(problem, "escape")
    config_ga = ExperimentConfig(
        problem=problem,
        params=params,
        start="local_optimum",
        trials=args.trials,
        base_seed=args.seed,
        budget=args.budget,
    )
    config_ea = ExperimentConfig(
        problem=problem,
        params="auto_escape",
        start="local_optimum",
        trials=args.trials,
        base_seed=args.seed,
        budget=args.budget,
        algorithm="opoea",
        opoea_rate=args.ea_rate,
    )
    comparison = compare_baseline(config_ga, config_ea)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(comparison.ga.records, out / "records_ga.csv")
    emit_csv(comparison.ea.records, out / "records_ea.csv")
    _write_summary(
        out / "summary.json",
        {
            "command": "compare",
            "config": {
                "command": "compare",
                "n": problem.n,
                "k": problem.k,
                "trials": args.trials,
                "seed": args.seed,
                "budget": args.budget,
                "ea_rate": args.ea_rate,
                "ga_params": asdict(params),
            },
            "ga_stats": _stats_json(comparison.ga),
            "ea_stats": _stats_json(comparison.ea),
            "ratio_ea_over_ga": comparison.ratio,
            "ratio_se": comparison.ratio_se,
            "reliable": comparison.reliable,
        },
    )
    return 0


def execute(argv: list[str]) -> int:
    """Run one CLI invocation. Exit code 0 on success, 2 on usage or
    domain errors (one-line diagnostic on stderr)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command in ("escape", "run", "reach-local"):
            return _run_experiment_command(args, args.command)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "compare":
            return _cmd_compare(args)
        raise ValueError(f"unknown command: {args.command!r}")
    except (ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
