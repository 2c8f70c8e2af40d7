import pytest
from typer.testing import CliRunner

from omv_tools.reports import VerifyReport
from omv_tools.ui.typer.main import app

runner = CliRunner()


@pytest.fixture
def invoke(tmp_path):
    def run(*args):
        return runner.invoke(app, ["--settings-dir", str(tmp_path / "settings"), *args])
    return run


def test_version(invoke):
    result = invoke("--version")
    assert result.exit_code == 0


def test_verify_writes_report(invoke, tmp_path):
    out = tmp_path / "report.yaml"
    result = invoke("verify", "--engine", "omv", "--n", "16", "--q", "10", "--no-progress", "--out", str(out))
    assert result.exit_code == 0, result.output
    report = VerifyReport.from_yaml(out)
    assert report.engine == "omv"
    assert report.mismatches == []


def test_verify_invalid_constant_is_usage_error(invoke):
    result = invoke("verify", "--engine", "omv", "--n", "16", "--epsilon", "2", "--no-progress")
    assert result.exit_code == 2


@pytest.mark.parametrize("n", ["16", "20"])
def test_verify_cell_grid_beyond_direct_limit(invoke, tmp_path, n):
    out = tmp_path / "report.yaml"
    result = invoke("verify", "--engine", "cellprobe", "--n", n, "--q", "2", "--density", "0.2", "--no-progress",
                    "--out", str(out))
    assert result.exit_code == 0, result.output
    assert VerifyReport.from_yaml(out).statistics["direct"] is False


def test_verify_from_generated_fixtures(invoke, tmp_path):
    fixtures = tmp_path / "fixtures"
    out = tmp_path / "report.yaml"
    result = invoke("gen", "--n", "10", "--q", "4", "--density", "0.2", "--out", str(fixtures), "--no-progress")
    assert result.exit_code == 0, result.output
    result = invoke("verify", "--engine", "vmv", "--fixtures", str(fixtures), "--no-progress", "--out", str(out))
    assert result.exit_code == 0, result.output
    report = VerifyReport.from_yaml(out)
    assert report.config["n"] == 10
    assert report.queries == 4


def test_verify_missing_fixture_directory_is_usage_error(invoke, tmp_path):
    result = invoke("verify", "--engine", "omv", "--fixtures", str(tmp_path / "absent"), "--no-progress")
    assert result.exit_code == 2


def test_verify_fixture_without_main_input_is_usage_error(invoke, tmp_path):
    (tmp_path / "empty").mkdir()
    result = invoke("verify", "--engine", "cnf", "--fixtures", str(tmp_path / "empty"), "--no-progress")
    assert result.exit_code == 2


def test_gen(invoke, tmp_path):
    out = tmp_path / "fixtures"
    result = invoke("gen", "--n", "8", "--q", "3", "--out", str(out), "--no-progress")
    assert result.exit_code == 0, result.output
    assert (out / "matrix.txt").exists()
    assert (out / "formula.cnf").exists()


def test_bench(invoke, tmp_path):
    out = tmp_path / "bench.csv"
    result = invoke("bench", "--n", "9", "--q", "4", "--repetitions", "1", "--out", str(out), "--no-progress")
    assert result.exit_code == 0, result.output
    assert out.read_text(encoding="utf-8").startswith("# omv-tools bench schema v1")


def test_bench_rejects_non_matvec_engine(invoke):
    result = invoke("bench", "--engine", "pm", "--n", "9", "--q", "4", "--no-progress")
    assert result.exit_code == 2


def test_cell_sweep_command(invoke, tmp_path):
    out = tmp_path / "cp.csv"
    result = invoke("cellprobe-sweep", "--n", "4", "--word-size", "2", "--matrices", "1", "--q", "5",
                    "--out", str(out), "--no-progress")
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_config_set_and_get(invoke):
    assert invoke("config", "init").exit_code == 0
    assert invoke("config", "set", "ENGINE.delta", "1.5").exit_code == 0
    result = invoke("config", "get", "ENGINE.delta")
    assert result.exit_code == 0
    assert "ENGINE.delta = 1.5" in result.output
    assert invoke("config", "set", "ENGINE.epsilon", "3").exit_code == 1
    assert "default" in invoke("config", "list").output
