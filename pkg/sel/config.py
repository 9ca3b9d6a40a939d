"""Configuration loading: YAML file, then environment overrides."""

from __future__ import annotations

import os
from pathlib import Path

import yaml
from pydantic import ValidationError

from sel.errors import ArgumentError
from sel.models import LabConfig

_ENV_FIELDS = {
    "SEL_GAP_TOL": ("gap_tol", float),
    "SEL_FEAS_TOL": ("feas_tol", float),
    "SEL_MAX_ITER": ("max_iter", int),
    "SEL_WORKERS": ("workers", int),
    "SEL_EXTRACT_SAMPLES": ("extract_samples", int),
    "SEL_EXTRACT_SEED": ("extract_seed", int),
}


def load_config(config_path: str | None = None) -> LabConfig:
    cfg = LabConfig()
    paths = (
        [Path(config_path)]
        if config_path
        else [Path(".sel.yaml"), Path.home() / ".sel.yaml"]
    )
    for p in paths:
        if p.exists():
            data = yaml.safe_load(p.read_text()) or {}
            if not isinstance(data, dict):
                raise ArgumentError(f"config file {p} must hold a mapping")
            return LabConfig.model_validate({**cfg.model_dump(), **data})
    if config_path:
        raise ArgumentError(f"config file not found: {config_path}")
    return cfg


def apply_env(cfg: LabConfig) -> LabConfig:
    updates: dict[str, object] = {}
    for var, (name, kind) in _ENV_FIELDS.items():
        if (raw := os.environ.get(var)) is None or not raw.strip():
            continue
        try:
            updates[name] = kind(raw)
        except ValueError as e:
            raise ArgumentError(f"{var}={raw!r} is not a valid {kind.__name__}") from e
    if os.environ.get("SEL_VERBOSE", "").lower() in ("1", "true"):
        updates["verbose"] = True
    if not updates:
        return cfg
    try:
        return LabConfig.model_validate({**cfg.model_dump(), **updates})
    except ValidationError as e:
        raise ArgumentError(f"invalid environment override: {e}") from e
