"""Pytest fixtures."""

import os
from pathlib import Path

import numpy as np
import pytest

from sel.operators import MultipartiteState, SystemLayout, maximally_entangled

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

FULL_ACCEPTANCE = os.environ.get("SEL_FULL_ACCEPTANCE", "") in ("1", "true")


def scaled(full: int, reduced: int) -> int:
    """Instance count for an acceptance suite: full size only under SEL_FULL_ACCEPTANCE."""
    return full if FULL_ACCEPTANCE else reduced


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def bell() -> MultipartiteState:
    return maximally_entangled(2, ("A", "B"))


@pytest.fixture
def bernoulli02() -> MultipartiteState:
    return MultipartiteState.from_diagonal([0.8, 0.2], SystemLayout.of(("A", 2)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def lab_dir(tmp_path: Path, monkeypatch) -> Path:
    """Run inside an empty directory with no user config and no SEL_* overrides."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    for key in (
        "SEL_GAP_TOL",
        "SEL_FEAS_TOL",
        "SEL_MAX_ITER",
        "SEL_WORKERS",
        "SEL_VERBOSE",
        "SEL_EXTRACT_SAMPLES",
        "SEL_EXTRACT_SEED",
    ):
        monkeypatch.delenv(key, raising=False)
    return tmp_path
