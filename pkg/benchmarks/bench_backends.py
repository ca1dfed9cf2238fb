#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-Python fallback.

Runs the same seeded escape campaign in two subprocesses, one with
OLLGA_PURE_PYTHON=1, and reports wall time per backend plus a checksum of
the per-trial outcomes so the bit-for-bit agreement of the two lanes is
visible, not just asserted in the test suite.

Usage:
    python benchmarks/bench_backends.py [--n 16] [--k 3] [--trials 200]
"""

import argparse
import json
import os
import subprocess
import sys

_INNER = """
import hashlib, json, time
from ollga import BACKEND, JumpProblem, optimal_params
from ollga.experiments import ExperimentConfig, run_escape_experiment

cfg = json.loads({cfg!r})
problem = JumpProblem(cfg["n"], cfg["k"])
config = ExperimentConfig(
    problem, optimal_params(problem, "escape"), "local_optimum",
    cfg["trials"], cfg["seed"],
)
t0 = time.perf_counter()
result = run_escape_experiment(config)
elapsed = time.perf_counter() - t0
digest = hashlib.sha256(
    repr([(r.trial, r.seed, r.outcome) for r in result.records]).encode()
).hexdigest()
print(json.dumps({{
    "backend": BACKEND,
    "seconds": elapsed,
    "mean_evals": result.evaluations.mean,
    "sha256": digest,
}}))
"""


def run_lane(cfg: dict, pure_python: bool) -> dict:
    env = dict(os.environ)
    if pure_python:
        env["OLLGA_PURE_PYTHON"] = "1"
    else:
        env.pop("OLLGA_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", _INNER.format(cfg=json.dumps(cfg))],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    cfg = {"n": args.n, "k": args.k, "trials": args.trials, "seed": args.seed}

    compiled = run_lane(cfg, pure_python=False)
    pure = run_lane(cfg, pure_python=True)
    print(f"workload: escape, n={args.n} k={args.k} trials={args.trials}")
    for lane in (compiled, pure):
        print(
            f"  {lane['backend']:>7}: {lane['seconds']:.3f}s  "
            f"mean evals {lane['mean_evals']:.1f}  sha256 {lane['sha256'][:16]}"
        )
    if compiled["sha256"] != pure["sha256"]:
        print("MISMATCH: backends disagree on per-trial outcomes")
        return 1
    if compiled["backend"] == pure["backend"]:
        print("note: compiled extension unavailable, both lanes pure Python")
        return 0
    speedup = pure["seconds"] / compiled["seconds"]
    print(f"identical outcomes; compiled speedup {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
