"""CLI commands through Typer's test runner."""

import pytest
from typer.testing import CliRunner

from sel.cli import app

runner = CliRunner()


@pytest.fixture
def fx(fixtures_dir, lab_dir):
    return lambda name: str(fixtures_dir / name)


def test_version(lab_dir):
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "sel 0.1.0" in result.output


def test_entropy_bell(fx):
    result = runner.invoke(app, ["entropy", "--state", fx("bell.json"), "--a", "A", "--b", "B"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("-1.000000")
    assert "gap:" in result.output


def test_entropy_bernoulli_max(fx):
    result = runner.invoke(app, ["entropy", "--state", fx("bernoulli02.json"), "--kind", "max"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("0.847997")


def test_entropy_input_errors(fx, lab_dir):
    result = runner.invoke(app, ["entropy", "--state", fx("bell.json"), "--kind", "renyi"])
    assert result.exit_code == 2
    assert "error:" in result.output
    result = runner.invoke(app, ["entropy", "--state", str(lab_dir / "missing.json")])
    assert result.exit_code == 2


def test_distance(fx):
    result = runner.invoke(
        app, ["distance", "--state", fx("bell.json"), "--state2", fx("bell.json"), "--kind", "trace"]
    )
    assert result.exit_code == 0, result.output
    assert result.output.startswith("TraceDistance: 0")
    result = runner.invoke(
        app, ["distance", "--state", fx("bell.json"), "--state2", fx("bernoulli02.json")]
    )
    assert result.exit_code == 2


def test_smooth(fx):
    result = runner.invoke(
        app, ["smooth", "--state", fx("bernoulli02.json"), "--kind", "min", "--eps", "0.1"]
    )
    assert result.exit_code == 0, result.output
    assert "distance:" in result.output
    result = runner.invoke(
        app, ["smooth", "--state", fx("bernoulli02.json"), "--kind", "relmin", "--eps", "0.1"]
    )
    assert result.exit_code == 2


def test_aep_validity_exit_code(lab_dir):
    args = ["aep", "--eps", "0.1", "--eps2", "0.1", "--h", "0.5", "--v", "3.5"]
    result = runner.invoke(app, [*args, "--n", "5"])
    assert result.exit_code == 4
    assert "threshold 13" in result.output
    result = runner.invoke(app, [*args, "--n", "5", "--no-strict"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(app, [*args, "--n", "100,1000"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("n,min_lower,max_upper,min_upper,max_lower\n")


def test_aep_from_state_to_file(fx, lab_dir):
    out = lab_dir / "aep.csv"
    result = runner.invoke(
        app,
        [
            "aep", "--state", fx("bernoulli02.json"),
            "--eps", "0.1", "--eps2", "0.1", "--n", "1e4", "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert out.read_text().count("\n") == 2
    assert "Wrote 1 rows" in result.output


def test_ucr(fx):
    result = runner.invoke(app, ["ucr", "--state", fx("bb84_ucr.json"), "--eps", "0"])
    assert result.exit_code == 0, result.output
    assert "residual: 0.41" in result.output


def test_qkd(lab_dir):
    result = runner.invoke(
        app, ["qkd", "--q", "0.05", "--eps", "1e-6", "--eps2", "1e-6", "--n", "1e6,1e8"]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0] == "n,ell,rate,asymptotic"
    assert lines[2].startswith("100000000,")
    result = runner.invoke(app, ["qkd", "--q", "0.6", "--eps", "1e-6", "--eps2", "1e-6"])
    assert result.exit_code == 2


def test_sdp_solve(fx):
    result = runner.invoke(app, ["sdp-solve", "--state", fx("sdp_min_trace.json")])
    assert result.exit_code == 0, result.output
    assert "alpha: 0.8" in result.output
    assert "status: Optimal" in result.output


def test_sdp_solve_iteration_limit(fx, monkeypatch):
    monkeypatch.setenv("SEL_MAX_ITER", "1")
    result = runner.invoke(app, ["sdp-solve", "--state", fx("sdp_min_trace.json")])
    assert result.exit_code == 3


def test_compress_sim(fx):
    result = runner.invoke(
        app,
        [
            "compress-sim", "--state", fx("bernoulli02_source.json"),
            "--n", "4", "--m", "4", "--trials", "100", "--seed", "1",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "p_err: 0 (0/100)" in result.output


def test_extract_sim(fx):
    result = runner.invoke(app, ["extract-sim", "--state", fx("joint_parity.json"), "--ell", "1"])
    assert result.exit_code == 0, result.output
    assert "avg_delta: 0.125" in result.output
    result = runner.invoke(
        app, ["extract-sim", "--state", fx("joint_parity.json"), "--ell", "1", "--samples", "4"]
    )
    assert result.exit_code == 2


def test_tables(lab_dir):
    result = runner.invoke(app, ["figure61", "--n", "1,5"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("n,surprisal,cumulative_probability,h,h_min,h_max\n")
    result = runner.invoke(app, ["penalty", "--grid", "0.1"])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[1].startswith("0.1,7.64")


def test_runs_are_recorded(fx, lab_dir):
    runner.invoke(app, ["entropy", "--state", fx("bell.json"), "--b", "B"])
    listing = runner.invoke(app, ["runs", "list"])
    assert listing.exit_code == 0
    assert "entropy" in listing.output
    run_id = listing.output.split()[0]
    shown = runner.invoke(app, ["runs", "show", run_id])
    assert '"subcommand": "entropy"' in shown.output
    report = runner.invoke(app, ["runs", "report", run_id])
    assert "**Command:** entropy" in report.output
    assert (lab_dir / ".sel" / f"sel-report-{run_id}.md").exists()


def test_runs_show_unknown_exits_1(lab_dir):
    assert runner.invoke(app, ["runs", "show", "nope"]).exit_code == 1
    assert runner.invoke(app, ["runs", "report"]).exit_code == 1


def test_config_option(fx, lab_dir):
    cfg = lab_dir / "custom.yaml"
    cfg.write_text("output_dir: elsewhere\n")
    result = runner.invoke(
        app, ["--config", str(cfg), "entropy", "--state", fx("bell.json"), "--b", "B"]
    )
    assert result.exit_code == 0, result.output
    assert any((lab_dir / "elsewhere" / "runs").iterdir())
    result = runner.invoke(app, ["--config", str(lab_dir / "none.yaml"), "version"])
    assert result.exit_code == 2
