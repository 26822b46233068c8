"""
Integration tests for the admmq command line
"""

import csv
import json

import pytest
from click.testing import CliRunner

from admm_quant import __version__
from admm_quant.cases import CASES_DIR, instance_path
from admm_quant.cli import EXIT_DIVERGED, EXIT_INFEASIBLE, EXIT_USAGE, main


def invoke(*args):
    # -q keeps INFO logs off stderr so stdout parses cleanly
    return CliRunner().invoke(main, ["-q", *map(str, args)])


def invoke_json(*args):
    result = invoke(*args)
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


class TestGenerateAndPresets:
    """Test cases for instance generation commands"""

    @pytest.mark.integration
    def test_version(self):
        result = invoke("--version")
        assert result.exit_code == 0
        assert __version__ in result.output

    @pytest.mark.integration
    def test_generate_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            result = invoke("generate", "--d", 2, "--v", 8, "--sigma-q-sq", 30, "--seed", 1, "--out", out)
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()
        data = json.loads(first.read_text())
        assert len(data["Q"]) == 2 and data["set"]["coords"][0]["v"] == 8.0

    @pytest.mark.integration
    def test_generate_from_preset(self, tmp_path):
        out = tmp_path / "p.json"
        assert invoke("generate", "--preset", "v8-d8-s30", "--out", out).exit_code == 0
        assert json.loads(out.read_text())["spec"]["d"] == 8

    @pytest.mark.integration
    def test_generate_errors(self, tmp_path):
        assert invoke("generate", "--out", tmp_path / "x.json").exit_code == EXIT_USAGE
        assert invoke("generate", "--d", 0, "--out", tmp_path / "x.json").exit_code == EXIT_USAGE
        assert invoke("generate", "--d", 2, "--out", tmp_path / "no" / "x.json").exit_code == EXIT_USAGE

    @pytest.mark.integration
    def test_presets_table(self):
        result = invoke("presets")
        assert result.exit_code == 0
        assert "v8-d16-s30" in result.stdout


class TestSolve:
    """Test cases for the solve command"""

    def setup_method(self):
        self.demo = instance_path("demo_1d")

    @pytest.mark.integration
    def test_one_dimensional_example(self):
        data = invoke_json("solve", "--instance", self.demo, "--algorithm", "admm-q", "--rho", 2)
        assert data["best_window_objective"] == pytest.approx(0.08)
        assert data["stationary"] is True
        assert data["converged"] is True
        assert data["iterations"] == 1000
        assert data["y"] == [0.0]

    @pytest.mark.integration
    def test_every_algorithm_runs(self):
        extra = {"iadmm-q": ["--gamma", 0.1], "admm-r": ["--p", 0.5], "admm-s": ["--beta", 0.5]}
        for algorithm in ("admm-q", "iadmm-q", "admm-r", "admm-s", "pgd", "gd-proj"):
            data = invoke_json(
                "solve", "--instance", self.demo, "--algorithm", algorithm, "--rho", 3, "--iters", 200,
                *extra.get(algorithm, []),
            )
            assert data["algorithm"] == algorithm
            assert data["best_window_objective"] == pytest.approx(0.08)

    @pytest.mark.integration
    def test_decrease_condition_gate(self):
        result = invoke("solve", "--instance", self.demo, "--rho", 1)
        assert result.exit_code == EXIT_INFEASIBLE
        assert invoke("solve", "--instance", self.demo, "--rho", 1, "--force").exit_code == 0
        # baselines are not gated
        assert invoke("solve", "--instance", self.demo, "--algorithm", "pgd", "--rho", 1).exit_code == 0

    @pytest.mark.integration
    def test_divergence_exit_code(self):
        result = invoke("solve", "--instance", self.demo, "--algorithm", "pgd", "--rho", "1e-9", "--x0", 3)
        assert result.exit_code == EXIT_DIVERGED

    @pytest.mark.integration
    def test_usage_errors(self):
        assert invoke("solve", "--instance", self.demo, "--gamma", 0.1, "--rho", 2).exit_code == EXIT_USAGE
        assert invoke("solve", "--instance", "missing.json").exit_code == EXIT_USAGE
        assert invoke("solve", "--instance", self.demo, "--rho", 2, "--x0", "1,2").exit_code == EXIT_USAGE
        assert invoke("solve", "--instance", self.demo, "--rho", 2, "--x0", "a").exit_code == EXIT_USAGE

    @pytest.mark.integration
    def test_trace_and_csv_output(self, tmp_path):
        trace = tmp_path / "run.csv"
        result = invoke(
            "solve", "--instance", self.demo, "--rho", 2, "--iters", 20, "--trace", trace,
            "--trace-stride", 5, "--format", "csv",
        )
        assert result.exit_code == 0, result.output
        rows = list(csv.reader(result.stdout.splitlines()))
        assert rows[0][:3] == ["algorithm", "rho", "iterations"]
        assert rows[1][0] == "admm-q"
        lines = trace.read_text().splitlines()
        assert lines[0] == "r,lagrangian,f_y,residual,inner_iters"
        assert [line.split(",")[0] for line in lines[1:]] == ["0", "5", "10", "15", "20"]


class TestOracleCommands:
    """Test cases for check-stationary, bruteforce and verify-conditions"""

    @pytest.mark.integration
    def test_check_stationary(self):
        path = instance_path("nonexistence_1d")
        assert invoke_json("check-stationary", "--instance", path, "--point", 0, "--rho", 0.5)["is_stationary"] is False
        data = invoke_json("check-stationary", "--instance", path, "--point", 1, "--rho", 1)
        assert data["is_stationary"] is True and data["point"] == [1.0]
        result = invoke("check-stationary", "--instance", path, "--point", 0.5, "--rho", 1)
        assert result.exit_code == EXIT_USAGE

    @pytest.mark.integration
    def test_bruteforce(self):
        data = invoke_json("bruteforce", "--instance", instance_path("grid49"), "--bounds=-3,3")
        assert data["argmin"] == [1.0, -1.0]
        assert data["value"] == pytest.approx(-1.8)
        assert data["cardinality"] == 49

    @pytest.mark.integration
    def test_bruteforce_refuses_unbounded_and_large_sets(self):
        path = instance_path("grid49")
        assert invoke("bruteforce", "--instance", path).exit_code == EXIT_USAGE
        assert invoke("bruteforce", "--instance", path, "--bounds=-3,3", "--limit", 10).exit_code == EXIT_USAGE
        assert invoke("bruteforce", "--instance", path, "--bounds=3").exit_code == EXIT_USAGE

    @pytest.mark.integration
    def test_verify_conditions(self):
        data = invoke_json("verify-conditions", "--Lf", 1, "--mu", 0, "--rho", 1.5)
        assert data["decrease"] is True and data["decrease_value"] < 0
        data = invoke_json("verify-conditions", "--Lf", 1, "--mu", 1, "--rho", 6, "--gamma", 0.1)
        assert data["iadmm"] is True
        data = invoke_json("verify-conditions", "--Lf", 1, "--mu", 1, "--rho", 6, "--gamma", 0.5)
        assert data["iadmm"] is False
        assert invoke("verify-conditions", "--Lf", 1, "--rho", 0).exit_code == EXIT_USAGE


class TestSweepCommand:
    """Test cases for the sweep command"""

    @pytest.mark.integration
    def test_sweep_over_instance_file(self, tmp_path):
        out = tmp_path / "results"
        result = invoke(
            "sweep", "--instances", instance_path("grid49"), "--protocol", CASES_DIR / "protocol_tiny.toml",
            "--out", out,
        )
        assert result.exit_code == 0, result.output
        with open(out / "sweep.csv") as handle:
            rows = list(csv.reader(handle))
        # (2 admm-q + 2 pgd + 1 gd-proj) grid points x 2 inits
        assert len(rows) == 11
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["instances"]["grid49"]) == {"admm-q", "pgd", "gd-proj"}
        assert (out / "hist_pgd_vs_admm-q.csv").exists()

    @pytest.mark.integration
    def test_sweep_over_generated_instances(self, tmp_path):
        out = tmp_path / "gen"
        result = invoke(
            "sweep", "--generate", 2, "--preset", "v8-d8-s30", "--protocol", CASES_DIR / "protocol_tiny.toml",
            "--algorithms", "admm-q,pgd", "--compare", "pgd:admm-q,admm-q:gd-proj", "--out", out,
        )
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "summary.json").read_text())
        assert sorted(summary["instances"]) == ["v8-d8-s30-0", "v8-d8-s30-1"]
        # gd-proj was not swept, so only one histogram is written
        assert sorted(p.name for p in out.glob("hist_*.csv")) == ["hist_pgd_vs_admm-q.csv"]

    @pytest.mark.integration
    def test_sweep_source_is_required_once(self, tmp_path):
        assert invoke("sweep", "--out", tmp_path / "r").exit_code == EXIT_USAGE
        result = invoke("sweep", "--instances", instance_path("grid49"), "--generate", 1, "--out", tmp_path / "r")
        assert result.exit_code == EXIT_USAGE
        result = invoke("sweep", "--generate", 1, "--algorithms", "admm-z", "--out", tmp_path / "r")
        assert result.exit_code == EXIT_USAGE

    @pytest.mark.integration
    def test_invalid_sweep_leaves_no_output_directory(self, tmp_path):
        out = tmp_path / "results"
        assert invoke("sweep", "--generate", 1, "--workers", 0, "--out", out).exit_code == EXIT_USAGE
        assert invoke("sweep", "--generate", 1, "--bins", 0, "--out", out).exit_code == EXIT_USAGE
        result = invoke("sweep", "--instances", tmp_path, "--out", out)
        assert result.exit_code == EXIT_USAGE
        assert not out.exists()


class TestLogisticDemoCommand:
    """Test cases for the logistic-demo command"""

    @pytest.mark.integration
    def test_small_demo(self):
        data = invoke_json("logistic-demo", "--d", 5, "--n", 60, "--iters", 50)
        assert data["gamma"] == 0.1
        assert data["rho"] == pytest.approx(6 * data["lipschitz_L"], rel=1e-9)
        assert data["iadmm_loss"] > 0 and data["gdproj_loss"] > 0
        assert "check_lower_bound" in data
