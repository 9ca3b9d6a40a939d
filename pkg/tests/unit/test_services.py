"""Lab service wiring between configuration and the library."""

import math

import pytest

import sel.services
from sel.errors import ArgumentError
from sel.models import DistanceKind, LabConfig, RunConfig
from sel.services import EntropyKind, Lab, SmoothKind
from sel.statefile import load_distribution, load_problem, load_ucr


@pytest.fixture
def lab(lab_dir) -> Lab:
    return Lab(LabConfig(output_dir=str(lab_dir / ".sel")))


def test_settings_follow_config(lab_dir):
    lab = Lab(LabConfig(gap_tol=1e-6, max_iter=40))
    assert lab.settings.gap_tol == 1e-6
    assert lab.settings.max_iter == 40


def test_entropy_kinds(lab, bell):
    result = lab.entropy(bell, EntropyKind.MIN, ["A"], ["B"])
    assert result.value.bits == pytest.approx(-1.0, abs=1e-6)
    assert result.gap is not None
    result = lab.entropy(bell, "max", ["A"], ["B"])
    assert result.value.bits == pytest.approx(-1.0, abs=1e-6)
    assert lab.entropy(bell, "vn", ["A"], ["B"]).gap is None
    assert lab.entropy(bell, "renyi", ["A"], ["B"], alpha=2.0).value.bits == pytest.approx(-1.0)


def test_smooth_entropy_through_eps(lab, bernoulli02):
    plain = lab.entropy(bernoulli02, "min", ["A"]).value
    smoothed = lab.entropy(bernoulli02, "min", ["A"], eps=0.1).value
    assert smoothed.bits > plain.bits


def test_renyi_needs_alpha(lab, bell):
    with pytest.raises(ArgumentError):
        lab.entropy(bell, "renyi", ["A"], ["B"])


def test_distance(lab, bell):
    value = lab.distance(bell, bell, DistanceKind.FIDELITY)
    assert value.value == pytest.approx(1.0)


def test_smooth_kinds(lab, bernoulli02):
    result = lab.smooth(bernoulli02, SmoothKind.MAX, ["A"], eps=0.1)
    assert result.value.bits < math.log2(1.8)
    assert result.distance <= 0.1 + 1e-7
    with pytest.raises(ArgumentError):
        lab.smooth(bernoulli02, "relmin", ["A"], eps=0.1)
    rel = lab.smooth(bernoulli02, "relmin", ["A"], eps=0.0, sigma=bernoulli02)
    assert rel.value.bits == pytest.approx(0.0, abs=1e-9)
    assert rel.distance is None


def test_aep_inputs(lab, bernoulli02):
    table = lab.aep(0.1, 0.1, [100, 1000], rho=bernoulli02, a=["A"])
    assert len(table.rows) == 2
    assert len(lab.aep(0.1, 0.1, [100], h=0.5, v=3.5).rows) == 1
    with pytest.raises(ArgumentError):
        lab.aep(0.1, 0.1, [100])
    with pytest.raises(ArgumentError):
        lab.aep(0.1, 0.1, [], h=0.5, v=3.5)


def test_ucr(lab, fixtures_dir):
    result = lab.ucr(load_ucr(fixtures_dir / "bb84_ucr.json"))
    assert result.slack == pytest.approx(0.415, abs=1e-3)


def test_qkd_default_grid(lab):
    table = lab.qkd(0.05, 1e-6, 1e-6)
    assert table.column("n") == [1e4, 1e5, 1e6, 1e7, 1e8]


def test_simulators(lab, fixtures_dir):
    source = load_distribution(fixtures_dir / "bernoulli02_source.json")
    assert lab.compress_sim(source, 3, 3, 50, seed=2).errors == 0
    joint = load_distribution(fixtures_dir / "joint_parity.json")
    assert lab.extract_sim(joint, 1) == pytest.approx(0.125)


def test_sdp_solve(lab, fixtures_dir):
    sol = lab.sdp_solve(load_problem(fixtures_dir / "sdp_min_trace.json"))
    assert sol.primal_value == pytest.approx(0.8, abs=1e-7)


def test_tables(lab):
    assert lab.figure61(0.2, [1]).columns[0] == "n"
    assert len(lab.penalty([0.1, 0.2]).rows) == 2


def test_record_respects_config(lab_dir):
    lab = Lab(LabConfig(output_dir=str(lab_dir / ".sel")))
    rec = lab.record(RunConfig(subcommand="qkd"), {"rows": 5})
    assert rec is not None
    assert (lab_dir / ".sel" / "runs" / f"{rec.run_id}.json").exists()
    quiet = Lab(LabConfig(output_dir=str(lab_dir / ".quiet"), record_runs=False))
    assert quiet.record(RunConfig(subcommand="qkd"), {}) is None
    assert not (lab_dir / ".quiet" / "runs").exists()


def test_extraction_sampling_follows_config(lab_dir, fixtures_dir, mocker):
    spy = mocker.spy(sel.services, "extract_simulate")
    lab = Lab(LabConfig(output_dir=str(lab_dir / ".sel"), extract_samples=32, extract_seed=7))
    joint = load_distribution(fixtures_dir / "joint_parity.json")
    lab.extract_sim(joint, 1)
    assert spy.call_args.kwargs["default_samples"] == 32
    assert spy.call_args.kwargs["default_seed"] == 7
