import json
import math
import subprocess
import sys

import pytest

from ollga import JumpProblem, GaParams, escape_probability_exact
from ollga.cli import execute

CSV_HEADER = (
    "trial,seed,iterations,evaluations,hit_optimum,first_hit_evaluation,final_fitness"
)


def _read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestTheoryCommand:
    def test_writes_summary_with_exact_p(self, tmp_path):
        out = tmp_path / "t"
        code = execute(
            ["theory", "--n", "16", "--k", "2", "--p", "0.35", "--c", "0.35",
             "--lambda-m", "8", "--lambda-c", "8", "--out", str(out)]
        )
        assert code == 0
        summary = _read_json(out / "summary.json")
        assert summary["command"] == "theory"
        assert summary["backend"] in ("cython", "python")
        want = escape_probability_exact(
            JumpProblem(16, 2), GaParams(0.35, 0.35, 8, 8)
        ).log_value
        assert summary["bounds"]["exact_p"] == pytest.approx(want, rel=1e-12)
        assert summary["bounds"]["exact_p_is_log"] is True

    def test_auto_params_echoed(self, tmp_path):
        out = tmp_path / "t"
        assert execute(
            ["theory", "--n", "12", "--k", "2", "--auto-params", "escape",
             "--out", str(out)]
        ) == 0
        cfg = _read_json(out / "summary.json")["config"]
        assert cfg["auto_params"] == "escape"
        assert cfg["lambda_m"] == 6
        assert cfg["p"] == pytest.approx(math.sqrt(2 / 12))

    def test_out_of_domain_bound_is_null_not_error(self, tmp_path):
        out = tmp_path / "t"
        code = execute(
            ["theory", "--n", "16", "--k", "2", "--p", "0.1", "--c", "0.5",
             "--lambda-m", "4", "--lambda-c", "4", "--out", str(out)]
        )
        assert code == 0
        bounds = _read_json(out / "summary.json")["bounds"]
        assert bounds["thm_runtime_bound_iters"] is None
        assert not bounds["in_validity_domain"]["runtime_bound"]

    def test_huge_bound_emitted_in_log_space(self, tmp_path):
        out = tmp_path / "t"
        code = execute(
            ["theory", "--n", "4000", "--k", "16", "--p", "0.008", "--c", "0.06",
             "--lambda-m", "2", "--lambda-c", "2", "--out", str(out)]
        )
        assert code == 0
        bounds = _read_json(out / "summary.json")["bounds"]
        assert bounds["exact_iters_is_log"] is True
        assert float(bounds["exact_iters"]) > math.log(2.0**53)

    def test_missing_flags(self, capsys, tmp_path):
        assert execute(["theory", "--n", "12", "--out", str(tmp_path)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_params(self, capsys, tmp_path):
        assert execute(
            ["theory", "--n", "12", "--k", "2", "--out", str(tmp_path)]
        ) == 2
        assert "--auto-params" in capsys.readouterr().err

    def test_theory_domain_violation(self, tmp_path):
        assert execute(
            ["theory", "--n", "10", "--k", "3", "--auto-params", "escape",
             "--out", str(tmp_path)]
        ) == 2

    def test_lambda_overflow(self, capsys, tmp_path):
        assert execute(
            ["theory", "--n", "1600", "--k", "8", "--auto-params", "escape",
             "--out", str(tmp_path)]
        ) == 2
        assert "exceeds cap" in capsys.readouterr().err

    def test_auto_params_override_warns(self, capsys, tmp_path):
        out = tmp_path / "t"
        assert execute(
            ["theory", "--n", "12", "--k", "2", "--p", "0.9",
             "--auto-params", "escape", "--out", str(out)]
        ) == 0
        assert "overrides" in capsys.readouterr().err
        assert _read_json(out / "summary.json")["config"]["p"] != 0.9


class TestEscapeCommand:
    def _run(self, out, extra=()):
        return execute(
            ["escape", "--n", "10", "--k", "2", "--auto-params", "escape",
             "--trials", "50", "--seed", "9", "--out", str(out), *extra]
        )

    def test_artifacts_written(self, tmp_path):
        out = tmp_path / "e"
        assert self._run(out) == 0
        records = (out / "records.csv").read_text(encoding="utf-8")
        lines = records.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 51
        assert records.endswith("\n") and "\r" not in records
        plot = (out / "plotdata.csv").read_text(encoding="utf-8").splitlines()
        assert plot[0] == "x,mean_evals,se_evals,exact_evals,bound_evals"
        assert len(plot) == 2
        summary = _read_json(out / "summary.json")
        assert summary["config"]["trials"] == 50
        assert summary["stats"]["evaluations"]["count"] == 50

    def test_invocation_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert self._run(a) == 0
        assert self._run(b) == 0
        assert (a / "records.csv").read_bytes() == (b / "records.csv").read_bytes()

    def test_config_roundtrip_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert self._run(a) == 0
        code = execute(
            ["escape", "--config", str(a / "summary.json"), "--out", str(b)]
        )
        assert code == 0
        assert (a / "records.csv").read_bytes() == (b / "records.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()

    def test_invalid_problem(self, tmp_path):
        assert execute(
            ["escape", "--n", "4", "--k", "9", "--auto-params", "escape",
             "--out", str(tmp_path)]
        ) == 2


class TestRunAndReachLocalCommands:
    def test_full_run_defaults_to_random_start(self, tmp_path):
        out = tmp_path / "r"
        code = execute(
            ["run", "--n", "12", "--k", "2", "--auto-params", "escape",
             "--trials", "20", "--seed", "4", "--out", str(out)]
        )
        assert code == 0
        assert _read_json(out / "summary.json")["config"]["start"] == "random"

    def test_reach_local_default_params(self, tmp_path):
        out = tmp_path / "rl"
        code = execute(
            ["reach-local", "--n", "32", "--k", "2", "--trials", "30",
             "--seed", "2", "--out", str(out)]
        )
        assert code == 0
        cfg = _read_json(out / "summary.json")["config"]
        assert cfg["p"] == pytest.approx(math.sqrt(2 / 32))
        assert cfg["lambda_m"] == 16
        stats = _read_json(out / "summary.json")["stats"]
        assert stats["metric"] == "to_plateau"
        assert stats["iterations"]["censored_count"] == 0


class TestSweepCommand:
    def test_rows_sorted_and_errored_cells_skipped(self, tmp_path):
        out = tmp_path / "s"
        code = execute(
            ["sweep", "--n", "12", "--k", "2", "--p", "0.4", "--c", "0.4",
             "--lambda-m", "4", "--lambda-c", "4", "--axis", "lambda",
             "--values", "4,2,0", "--trials", "10", "--seed", "3",
             "--out", str(out)]
        )
        assert code == 0
        plot = (out / "plotdata.csv").read_text(encoding="utf-8").splitlines()
        assert [row.split(",")[0] for row in plot[1:]] == ["2", "4"]
        cells = _read_json(out / "summary.json")["cells"]
        assert len(cells) == 3
        errored = [c for c in cells if "error" in c]
        assert len(errored) == 1 and errored[0]["coords"]["lambda"] == 0

    def test_requires_axis(self, tmp_path):
        assert execute(
            ["sweep", "--n", "12", "--k", "2", "--auto-params", "escape",
             "--values", "2,4", "--out", str(tmp_path)]
        ) == 2


class TestCompareCommand:
    def test_artifacts_and_ratio(self, tmp_path):
        out = tmp_path / "c"
        code = execute(
            ["compare", "--n", "12", "--k", "2", "--trials", "100",
             "--seed", "8", "--out", str(out)]
        )
        assert code == 0
        summary = _read_json(out / "summary.json")
        assert summary["reliable"] is True
        assert summary["ratio_ea_over_ga"] > 0
        for name in ("records_ga.csv", "records_ea.csv"):
            lines = (out / name).read_text(encoding="utf-8").splitlines()
            assert lines[0] == CSV_HEADER
            assert len(lines) == 101


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "m"
        result = subprocess.run(
            [sys.executable, "-m", "ollga.cli", "theory", "--n", "12", "--k", "2",
             "--auto-params", "escape", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert (out / "summary.json").exists()

    def test_usage_error_exit_code(self):
        result = subprocess.run(
            [sys.executable, "-m", "ollga.cli", "bogus-command"],
            capture_output=True, text=True,
        )
        assert result.returncode == 2
