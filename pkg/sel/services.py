"""Application services: wires configuration and solver settings into the library."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any

from sel.apps.compression import SimulationResult, compress_simulate
from sel.apps.extraction import extract_simulate
from sel.apps.figures import penalty_table, surprisal_table
from sel.apps.qkd import log_grid, qkd_rate_curve
from sel.bounds.aep import AepParams, aep_table
from sel.bounds.ucr import UcrVariant, ucr_residual
from sel.config import apply_env, load_config
from sel.entropy import (
    ClassicalDist,
    Labels,
    conditional_renyi,
    h_min_solution,
    h_vn,
    restrict,
)
from sel.errors import ArgumentError
from sel.metrics import fidelity, purified_distance, trace_distance
from sel.models import (
    BoundTable,
    DistanceKind,
    DistanceValue,
    EntropyValue,
    LabConfig,
    RunConfig,
    RunRecord,
)
from sel.operators import MultipartiteState, purification
from sel.reporter import Reporter
from sel.runs import RunStore
from sel.sdp import SdpProblem, SdpSolution, SolverSettings
from sel.smooth import Inequality, smooth_h_max, smooth_h_min, smooth_relative_min
from sel.statefile import UcrInput

logger = logging.getLogger(__name__)

DEFAULT_QKD_GRID = (1e4, 1e8)


class EntropyKind(StrEnum):
    MIN = "min"
    MAX = "max"
    VN = "vn"
    RENYI = "renyi"


class SmoothKind(StrEnum):
    MIN = "min"
    MAX = "max"
    RELMIN = "relmin"


@dataclass(frozen=True)
class EntropyResult:
    value: EntropyValue
    gap: float | None = None


@dataclass(frozen=True)
class SmoothResult:
    value: EntropyValue
    distance: float | None = None


class Lab:
    def __init__(self, cfg: LabConfig | None = None):
        self.cfg = cfg or apply_env(load_config())
        self.settings = SolverSettings(
            gap_tol=self.cfg.gap_tol, feas_tol=self.cfg.feas_tol, max_iter=self.cfg.max_iter
        )
        self.reporter = Reporter(self.cfg)
        self._runs: RunStore | None = None

    @property
    def runs(self) -> RunStore:
        if self._runs is None:
            self._runs = RunStore(storage_dir=str(Path(self.cfg.output_dir) / "runs"))
        return self._runs

    def entropy(
        self,
        rho: MultipartiteState,
        kind: EntropyKind | str,
        a: Labels,
        b: Labels = (),
        eps: float = 0.0,
        alpha: float | None = None,
    ) -> EntropyResult:
        kind = EntropyKind(kind)
        if kind is EntropyKind.VN:
            return EntropyResult(h_vn(rho, a, b))
        if kind is EntropyKind.RENYI:
            if alpha is None:
                raise ArgumentError("the Rényi entropy needs --alpha")
            return EntropyResult(conditional_renyi(alpha, rho, a, b))
        if eps > 0:
            fn = smooth_h_min if kind is EntropyKind.MIN else smooth_h_max
            return EntropyResult(fn(rho, a, b, eps, self.settings)[0])
        if kind is EntropyKind.MIN:
            value, sol = h_min_solution(rho, a, b, self.settings)
            return EntropyResult(value, sol.gap)
        state, _, _ = restrict(rho, a, b)
        psi = purification(state, "C")
        value, sol = h_min_solution(psi, a, [psi.labels[-1]], self.settings)
        return EntropyResult(-value, sol.gap)

    def distance(
        self, rho: MultipartiteState, tau: MultipartiteState, kind: DistanceKind | str
    ) -> DistanceValue:
        fn = {
            DistanceKind.TRACE_DISTANCE: trace_distance,
            DistanceKind.FIDELITY: fidelity,
            DistanceKind.PURIFIED_DISTANCE: purified_distance,
        }[DistanceKind(kind)]
        return fn(rho, tau)

    def smooth(
        self,
        rho: MultipartiteState,
        kind: SmoothKind | str,
        a: Labels,
        b: Labels = (),
        eps: float = 0.0,
        sigma: MultipartiteState | None = None,
    ) -> SmoothResult:
        kind = SmoothKind(kind)
        if kind is SmoothKind.RELMIN:
            if sigma is None:
                raise ArgumentError("the smooth relative min-entropy needs a second state")
            return SmoothResult(smooth_relative_min(rho, sigma.op, eps, self.settings))
        fn = smooth_h_min if kind is SmoothKind.MIN else smooth_h_max
        value, smoothed = fn(rho, a, b, eps, self.settings)
        return SmoothResult(value, smoothed.distance_to_original)

    def aep(
        self,
        eps: float,
        eps1: float,
        n_grid: list[int],
        rho: MultipartiteState | None = None,
        a: Labels = (),
        b: Labels = (),
        h: float | None = None,
        v: float | None = None,
        strict: bool = True,
    ) -> BoundTable:
        """Per-copy AEP bounds from a single-copy state, or from explicit (h, v)."""
        if not n_grid:
            raise ArgumentError("need at least one block length")
        if rho is not None:
            params = AepParams.from_state(rho, a, b, n_grid[0], eps)
            h, v = params.h, params.v
        elif h is None or v is None:
            raise ArgumentError("pass a state or both h and v")
        logger.debug(f"AEP inputs h = {h:.12g}, v = {v:.12g}")
        return aep_table(h, v, eps, eps1, n_grid, strict)

    def ucr(
        self,
        setup: UcrInput,
        eps: float = 0.0,
        variant: UcrVariant | str = UcrVariant.OVERLAP,
        eps_bar: float | None = None,
    ) -> Inequality:
        return ucr_residual(
            setup.state,
            setup.x,
            setup.y,
            setup.a,
            setup.b,
            setup.c,
            eps,
            variant,
            candidates=setup.candidates,
            eps_bar=eps_bar,
            settings=self.settings,
        )

    def qkd(
        self, q: float, eps_c: float, eps_s: float, n_grid: list[int] | None = None
    ) -> BoundTable:
        return qkd_rate_curve(q, eps_c, eps_s, n_grid or log_grid(*DEFAULT_QKD_GRID))

    def compress_sim(
        self, dist: ClassicalDist, n: int, m: int, trials: int, seed: int
    ) -> SimulationResult:
        return compress_simulate(dist, n, m, trials, seed, workers=self.cfg.workers)

    def extract_sim(
        self,
        dist: ClassicalDist,
        ell: int,
        samples: int | None = None,
        seed: int | None = None,
        exact: bool = False,
    ) -> float:
        return extract_simulate(
            dist,
            ell,
            samples,
            seed,
            exact,
            default_samples=self.cfg.extract_samples,
            default_seed=self.cfg.extract_seed,
        )

    def sdp_solve(self, problem: SdpProblem) -> SdpSolution:
        return self.settings.solve(problem)

    def figure61(self, p: float, n_list: list[int], eps: float | None = None) -> BoundTable:
        return surprisal_table(p, n_list, eps)

    def penalty(self, eps_grid: list[float]) -> BoundTable:
        return penalty_table(eps_grid)

    def record(
        self, config: RunConfig, summary: dict[str, Any], output_path: str | None = None
    ) -> RunRecord | None:
        if not self.cfg.record_runs:
            return None
        return self.runs.record(config, summary, output_path)
