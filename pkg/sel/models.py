"""Data models for sel."""

from __future__ import annotations

import math
from datetime import datetime
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from sel.errors import DomainError


class EntropyValue(BaseModel):
    """A value in bits with a certified absolute tolerance.

    Diverging quantities carry `infinite` = -1 or +1 instead of a float sentinel; they
    compare correctly but refuse arithmetic.
    """

    model_config = ConfigDict(frozen=True)

    bits: float = 0.0
    tol: float = 0.0
    infinite: int = 0

    @field_validator("tol")
    @classmethod
    def _tol_non_negative(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("tolerance must be non-negative")
        return v

    @model_validator(mode="after")
    def _finite_or_flagged(self) -> EntropyValue:
        if self.infinite not in (-1, 0, 1):
            raise ValueError("infinite flag must be -1, 0 or 1")
        if not self.infinite and not math.isfinite(self.bits):
            raise ValueError("finite entropy values need finite bits")
        return self

    @classmethod
    def neg_inf(cls) -> EntropyValue:
        return cls(infinite=-1)

    @classmethod
    def pos_inf(cls) -> EntropyValue:
        return cls(infinite=1)

    @property
    def is_finite(self) -> bool:
        return self.infinite == 0

    def _key(self) -> tuple[int, float]:
        return (self.infinite, self.bits if self.is_finite else 0.0)

    def _require_finite(self, other: Any = None) -> None:
        if not self.is_finite or (isinstance(other, EntropyValue) and not other.is_finite):
            raise DomainError("arithmetic on an infinite entropy value")

    def __float__(self) -> float:
        self._require_finite()
        return self.bits

    def __neg__(self) -> EntropyValue:
        if not self.is_finite:
            return EntropyValue(infinite=-self.infinite)
        return EntropyValue(bits=-self.bits, tol=self.tol)

    def __add__(self, other: EntropyValue | float) -> EntropyValue:
        self._require_finite(other)
        if isinstance(other, EntropyValue):
            return EntropyValue(bits=self.bits + other.bits, tol=self.tol + other.tol)
        return EntropyValue(bits=self.bits + float(other), tol=self.tol)

    __radd__ = __add__

    def __sub__(self, other: EntropyValue | float) -> EntropyValue:
        return self + (-other)

    def __rsub__(self, other: float) -> EntropyValue:
        return (-self) + other

    def __mul__(self, factor: float) -> EntropyValue:
        self._require_finite()
        return EntropyValue(bits=self.bits * factor, tol=self.tol * abs(factor))

    __rmul__ = __mul__

    def __truediv__(self, factor: float) -> EntropyValue:
        return self * (1.0 / factor)

    def __lt__(self, other: EntropyValue | float) -> bool:
        return self._key() < _as_entropy(other)._key()

    def __le__(self, other: EntropyValue | float) -> bool:
        return self._key() <= _as_entropy(other)._key()

    def __gt__(self, other: EntropyValue | float) -> bool:
        return self._key() > _as_entropy(other)._key()

    def __ge__(self, other: EntropyValue | float) -> bool:
        return self._key() >= _as_entropy(other)._key()

    def __str__(self) -> str:
        if not self.is_finite:
            return "-inf" if self.infinite < 0 else "inf"
        return f"{self.bits:.6f} ± {self.tol:.1e}"


def _as_entropy(v: EntropyValue | float) -> EntropyValue:
    if isinstance(v, EntropyValue):
        return v
    if math.isinf(v):
        return EntropyValue(infinite=1 if v > 0 else -1)
    return EntropyValue(bits=float(v))


class DistanceKind(StrEnum):
    TRACE_DISTANCE = "TraceDistance"
    FIDELITY = "Fidelity"
    PURIFIED_DISTANCE = "PurifiedDistance"


class DistanceValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    kind: DistanceKind

    @field_validator("value")
    @classmethod
    def _clip(cls, v: float) -> float:
        if not math.isfinite(v) or v < -1e-9 or v > 1 + 1e-9:
            raise ValueError(f"distance value {v} outside [0, 1]")
        return min(max(v, 0.0), 1.0)

    def __float__(self) -> float:
        return self.value


class BoundTable(BaseModel):
    """Rows of parameter points and named bound values, ready for CSV."""

    columns: list[str]
    rows: list[list[float]] = Field(default_factory=list)
    title: str = ""

    @model_validator(mode="after")
    def _schema(self) -> BoundTable:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row} does not match columns {self.columns}")
            if not all(math.isfinite(v) for v in row):
                raise ValueError(f"row {row} has non-finite values")
        return self

    def add_row(self, *values: float) -> None:
        row = [float(v) for v in values]
        if len(row) != len(self.columns) or not all(math.isfinite(v) for v in row):
            raise ValueError(f"row {row} does not fit columns {self.columns}")
        self.rows.append(row)

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


class SystemEntry(BaseModel):
    label: str
    dim: int = Field(ge=1)


class MatrixEntry(BaseModel):
    re: list[list[float]]
    im: list[list[float]] | None = None


class StateFile(BaseModel):
    systems: list[SystemEntry]
    matrix: MatrixEntry
    classical: list[str] = Field(default_factory=list)


class MeasurementFile(BaseModel):
    system: str = "A"
    labels: list[str] = Field(default_factory=list)
    elements: list[MatrixEntry]


class DistributionFile(BaseModel):
    """Joint distribution P_XY as a matrix indexed [x][y]; a flat list means trivial Y."""

    probabilities: list[list[float]] | list[float]


class ProblemFile(BaseModel):
    objective: MatrixEntry
    offset: MatrixEntry
    choi: MatrixEntry
    name: str = ""


class UcrFile(BaseModel):
    state: StateFile
    x: MeasurementFile
    y: MeasurementFile
    a: str = "A"
    b: list[str] = Field(default_factory=lambda: ["B"])
    c: list[str] = Field(default_factory=lambda: ["C"])
    candidates: list[MeasurementFile] = Field(default_factory=list)


class RunConfig(BaseModel):
    subcommand: str
    inputs: list[str] = Field(default_factory=list)
    eps: dict[str, float] = Field(default_factory=dict)
    params: dict[str, Any] = Field(default_factory=dict)
    output: str | None = None
    seed: int | None = None
    gap_tol: float | None = None

    @field_validator("eps")
    @classmethod
    def _eps_range(cls, v: dict[str, float]) -> dict[str, float]:
        for name, eps in v.items():
            if not 0 <= eps < 1:
                raise ValueError(f"{name} = {eps} outside [0, 1)")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, v: int | None) -> int | None:
        if v is not None and not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v


class RunRecord(BaseModel):
    run_id: str
    config: RunConfig
    summary: dict[str, Any] = Field(default_factory=dict)
    output_path: str | None = None
    created_at: datetime = Field(default_factory=datetime.now)


class LabConfig(BaseModel):
    gap_tol: float = Field(default=1e-8, gt=0)
    feas_tol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=200, ge=1)
    workers: int = Field(default=1, ge=1)
    output_dir: str = ".sel"
    verbose: bool = False
    record_runs: bool = True
    extract_samples: int = Field(default=4096, ge=1)
    extract_seed: int = Field(default=0, ge=0)
