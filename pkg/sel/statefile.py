"""JSON files for states, measurements, distributions and SDP problems.

Matrices are stored row-major as separate real and imaginary parts; floats are written with
Python's shortest round-trip repr, so a write/read cycle reproduces every entry exactly.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from sel.entropy import ClassicalDist
from sel.errors import SelError, StateFileError
from sel.models import (
    DistributionFile,
    MatrixEntry,
    MeasurementFile,
    ProblemFile,
    StateFile,
    SystemEntry,
    UcrFile,
)
from sel.operators import (
    HermitianOp,
    MultipartiteState,
    Povm,
    ProjectiveMeasurement,
    SystemLayout,
    is_classical_on,
)
from sel.sdp import SdpProblem

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _read_model(path: str | Path, model: type[M]) -> M:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError as e:
        raise StateFileError(f"{p}: file not found") from e
    except (OSError, json.JSONDecodeError) as e:
        raise StateFileError(f"{p}: cannot parse JSON: {e}") from e
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise StateFileError(f"{p}: {e}") from e


def _write_model(obj: BaseModel, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(obj.model_dump(mode="json", exclude_none=True), indent=2) + "\n")
    logger.debug(f"wrote {type(obj).__name__} to {p}")
    return p


def matrix_from_entry(entry: MatrixEntry) -> np.ndarray:
    re = np.asarray(entry.re, dtype=float)
    if re.ndim != 2:
        raise StateFileError(f"matrix must be two-dimensional, got shape {re.shape}")
    if entry.im is None:
        return re.astype(complex)
    im = np.asarray(entry.im, dtype=float)
    if im.shape != re.shape:
        raise StateFileError(f"real part {re.shape} and imaginary part {im.shape} differ")
    return re + 1j * im


def matrix_to_entry(matrix: np.ndarray) -> MatrixEntry:
    m = np.asarray(matrix)
    im = m.imag.tolist() if np.iscomplexobj(m) and np.any(m.imag) else None
    return MatrixEntry(re=m.real.tolist(), im=im)


def _wrap(what: str, fn, *args):
    try:
        return fn(*args)
    except SelError as e:
        if isinstance(e, StateFileError):
            raise
        raise StateFileError(f"invalid {what}: {e}") from e


def state_from_file(sf: StateFile) -> MultipartiteState:
    layout = _wrap("layout", SystemLayout, tuple((s.label, s.dim) for s in sf.systems))
    matrix = matrix_from_entry(sf.matrix)
    if matrix.shape != (layout.total, layout.total):
        raise StateFileError(f"matrix shape {matrix.shape} does not match layout {layout}")
    state = _wrap("state", MultipartiteState.from_matrix, matrix, layout)
    for label in sf.classical:
        if label not in layout.labels:
            raise StateFileError(f"classical flag on unknown system {label!r}")
        if not is_classical_on(state, label):
            raise StateFileError(f"system {label!r} is flagged classical but is not")
    return state


def state_to_file(state: MultipartiteState, classical: list[str] | None = None) -> StateFile:
    return StateFile(
        systems=[SystemEntry(label=lbl, dim=d) for lbl, d in zip(state.labels, state.dims, strict=True)],
        matrix=matrix_to_entry(state.matrix),
        classical=list(classical or []),
    )


def load_state(path: str | Path) -> MultipartiteState:
    return state_from_file(_read_model(path, StateFile))


def write_state(state: MultipartiteState, path: str | Path, classical: list[str] | None = None) -> Path:
    return _write_model(state_to_file(state, classical), path)


def measurement_from_file(mf: MeasurementFile) -> Povm:
    """A ProjectiveMeasurement when every element is a projector, else a general POVM."""
    mats = [matrix_from_entry(e) for e in mf.elements]
    try:
        return ProjectiveMeasurement.from_matrices(mats, mf.labels, mf.system)
    except SelError:
        pass
    return _wrap("measurement", Povm.from_matrices, mats, mf.labels, mf.system)


def load_measurement(path: str | Path) -> Povm:
    return measurement_from_file(_read_model(path, MeasurementFile))


def load_distribution(path: str | Path) -> ClassicalDist:
    df = _read_model(path, DistributionFile)
    return _wrap("distribution", ClassicalDist, np.asarray(df.probabilities, dtype=float))


def problem_from_file(pf: ProblemFile) -> SdpProblem:
    return _wrap(
        "SDP problem",
        SdpProblem,
        HermitianOp(matrix_from_entry(pf.objective)),
        HermitianOp(matrix_from_entry(pf.offset)),
        HermitianOp(matrix_from_entry(pf.choi)),
        pf.name,
    )


def load_problem(path: str | Path) -> SdpProblem:
    return problem_from_file(_read_model(path, ProblemFile))


@dataclass(frozen=True, eq=False)
class UcrInput:
    state: MultipartiteState
    x: Povm
    y: Povm
    a: str
    b: list[str]
    c: list[str]
    candidates: list[ProjectiveMeasurement]


def load_ucr(path: str | Path) -> UcrInput:
    uf = _read_model(path, UcrFile)
    candidates = []
    for mf in uf.candidates:
        k = measurement_from_file(mf)
        if not isinstance(k, ProjectiveMeasurement):
            raise StateFileError("coarse-graining candidates must be projective")
        candidates.append(k)
    return UcrInput(
        state=state_from_file(uf.state),
        x=measurement_from_file(uf.x),
        y=measurement_from_file(uf.y),
        a=uf.a,
        b=list(uf.b),
        c=list(uf.c),
        candidates=candidates,
    )
