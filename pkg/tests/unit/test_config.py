"""Config loading: YAML files + environment overrides."""

import pytest
from pydantic import ValidationError

from sel.config import apply_env, load_config
from sel.errors import ArgumentError
from sel.models import LabConfig


def test_defaults(lab_dir):
    cfg = load_config()
    assert cfg.gap_tol == 1e-8
    assert cfg.max_iter == 200
    assert cfg.workers == 1
    assert cfg.output_dir == ".sel"


def test_apply_env_gap_tol_override(monkeypatch):
    monkeypatch.setenv("SEL_GAP_TOL", "1e-6")
    assert apply_env(LabConfig()).gap_tol == 1e-6


def test_apply_env_workers_and_iterations(monkeypatch):
    monkeypatch.setenv("SEL_WORKERS", "4")
    monkeypatch.setenv("SEL_MAX_ITER", "50")
    cfg = apply_env(LabConfig())
    assert (cfg.workers, cfg.max_iter) == (4, 50)


def test_apply_env_extraction_sampling(monkeypatch):
    monkeypatch.setenv("SEL_EXTRACT_SAMPLES", "256")
    monkeypatch.setenv("SEL_EXTRACT_SEED", "11")
    cfg = apply_env(LabConfig())
    assert (cfg.extract_samples, cfg.extract_seed) == (256, 11)


def test_apply_env_verbose(monkeypatch):
    monkeypatch.setenv("SEL_VERBOSE", "1")
    assert apply_env(LabConfig()).verbose is True


def test_apply_env_noop_when_unset(lab_dir):
    assert apply_env(LabConfig()) == LabConfig()


@pytest.mark.parametrize(
    "var,value", [("SEL_GAP_TOL", "tight"), ("SEL_WORKERS", "0"), ("SEL_EXTRACT_SAMPLES", "0")]
)
def test_apply_env_rejects_bad_values(monkeypatch, var, value):
    monkeypatch.setenv(var, value)
    with pytest.raises(ArgumentError):
        apply_env(LabConfig())


def test_load_config_yaml(lab_dir):
    (lab_dir / ".sel.yaml").write_text("gap_tol: 1.0e-7\noutput_dir: results\n")
    cfg = load_config()
    assert cfg.gap_tol == 1e-7
    assert cfg.output_dir == "results"


def test_load_config_explicit_path(tmp_path):
    p = tmp_path / "custom.yaml"
    p.write_text("workers: 3\n")
    assert load_config(str(p)).workers == 3


def test_load_config_home_fallback(lab_dir, tmp_path_factory, monkeypatch):
    home = tmp_path_factory.mktemp("home")
    (home / ".sel.yaml").write_text("max_iter: 75\n")
    monkeypatch.setenv("HOME", str(home))
    assert load_config().max_iter == 75


def test_load_config_missing_explicit_path(tmp_path):
    with pytest.raises(ArgumentError):
        load_config(str(tmp_path / "nope.yaml"))


def test_load_config_rejects_non_mapping(lab_dir):
    (lab_dir / ".sel.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ArgumentError):
        load_config()


def test_load_config_validates_fields(lab_dir):
    (lab_dir / ".sel.yaml").write_text("gap_tol: -1\n")
    with pytest.raises(ValidationError):
        load_config()
