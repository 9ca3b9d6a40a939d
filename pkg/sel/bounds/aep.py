"""Finite-n corrections for the smooth-entropy asymptotic equipartition property."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from sel.entropy import Labels, h_vn, relative_renyi, restrict
from sel.errors import ArgumentError, ValidityError
from sel.models import BoundTable
from sel.operators import HermitianOp, MultipartiteState, partial_trace_matrix

logger = logging.getLogger(__name__)

UPSILON_FLOOR = 3.0
UPSILON_SLACK = 1e-9
VALIDITY_FACTOR = 8 / 5


def g_of_eps(eps: float) -> float:
    """-log(1 - sqrt(1 - eps^2)), the smoothing penalty of the Rényi-to-min bound."""
    if not 0 < eps <= 1:
        raise ArgumentError(f"g(eps) needs eps in (0, 1], got {eps}")
    return -math.log2(1 - math.sqrt(1 - eps * eps))


def aep_delta(eps: float, v: float) -> float:
    if not v > 1:
        raise ArgumentError(f"convergence parameter must exceed 1, got {v}")
    return 4 * math.log2(v) * math.sqrt(g_of_eps(eps))


def _matrix(x: MultipartiteState | HermitianOp | np.ndarray) -> np.ndarray:
    return x.matrix if isinstance(x, MultipartiteState | HermitianOp) else np.asarray(x)


def upsilon(
    rho: MultipartiteState | HermitianOp | np.ndarray, sigma: HermitianOp | np.ndarray
) -> float:
    """2^(-S_3/2 / 2) + 2^(S_1/2 / 2) + 1; infinite when supp rho is not inside supp sigma."""
    rm, sm = _matrix(rho), _matrix(sigma)
    s32 = relative_renyi(1.5, rm, sm)
    s12 = relative_renyi(0.5, rm, sm)
    if not s32.is_finite or not s12.is_finite:
        return math.inf
    return 2 ** (-s32.bits / 2) + 2 ** (s12.bits / 2) + 1


def conditional_upsilon(rho: MultipartiteState, a: Labels, b: Labels = ()) -> float:
    """Upsilon(rho_AB || 1_A ⊗ rho_B)."""
    state, d_a, d_b = restrict(rho, a, b)
    rho_b = partial_trace_matrix(state.matrix, [d_a, d_b], [1])
    return upsilon(state.matrix, np.kron(np.eye(d_a), rho_b))


@dataclass(frozen=True)
class AepParams:
    n: int
    eps: float
    h: float
    v: float

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"block length must be at least 1, got {self.n}")
        if not 0 < self.eps < 1:
            raise ArgumentError(f"eps must lie in (0, 1), got {self.eps}")
        if not math.isfinite(self.h):
            raise ArgumentError("per-copy entropy must be finite")
        if not self.v >= UPSILON_FLOOR - UPSILON_SLACK:
            raise ArgumentError(f"convergence parameter must be at least 3, got {self.v}")

    @classmethod
    def from_state(cls, rho: MultipartiteState, a: Labels, b: Labels, n: int, eps: float) -> AepParams:
        """Per-copy conditional entropy and convergence parameter of a single copy rho_AB."""
        return cls(n=n, eps=eps, h=h_vn(rho, a, b).bits, v=conditional_upsilon(rho, a, b))


def validity_threshold(eps: float) -> int:
    return math.ceil(VALIDITY_FACTOR * g_of_eps(eps))


def _check_validity(n: int, eps: float, strict: bool) -> None:
    threshold = validity_threshold(eps)
    if n < threshold:
        logger.debug(f"n = {n} below the validity threshold {threshold} at eps = {eps}")
        if strict:
            raise ValidityError(
                f"n = {n} is below the validity threshold {threshold} for eps = {eps}", threshold
            )


def aep_direct(params: AepParams, strict: bool = True) -> tuple[float, float]:
    """Per-copy bounds (lower on H_min^eps, upper on H_max^eps) of the n-fold product state."""
    _check_validity(params.n, params.eps, strict)
    shift = aep_delta(params.eps, params.v) / math.sqrt(params.n)
    return params.h - shift, params.h + shift


def aep_converse(params: AepParams, eps1: float, strict: bool = True) -> tuple[float, float]:
    """Per-copy bounds (upper on H_min^eps, lower on H_max^eps) using a second parameter eps1."""
    if not 0 < eps1 < 1:
        raise ArgumentError(f"eps1 must lie in (0, 1), got {eps1}")
    if params.eps + eps1 >= 1:
        raise ArgumentError(f"eps + eps1 = {params.eps + eps1} must be below 1")
    _check_validity(params.n, eps1, strict)
    gap = math.log2(1 / (1 - (params.eps + eps1) ** 2)) / params.n
    shift = gap + aep_delta(eps1, params.v) / math.sqrt(params.n)
    return params.h + shift, params.h - shift


def renyi_window(v: float) -> float:
    """Upper end of the alpha range in which the Rényi/von Neumann gap bound applies."""
    if not v > 1:
        raise ArgumentError(f"convergence parameter must exceed 1, got {v}")
    return 1 + math.log2(3) / (4 * math.log2(v))


def renyi_vn_gap_bound(alpha: float, v: float) -> float:
    """4 (alpha - 1) (log v)^2, bounding S(rho||sigma) - S_alpha(rho||sigma) inside the window."""
    upper = renyi_window(v)
    if not 1 < alpha < upper:
        raise ArgumentError(f"alpha = {alpha} outside the window (1, {upper:.6g})")
    return 4 * (alpha - 1) * math.log2(v) ** 2


def aep_table(
    h: float, v: float, eps: float, eps1: float, n_grid: Iterable[int], strict: bool = True
) -> BoundTable:
    table = BoundTable(
        columns=["n", "min_lower", "max_upper", "min_upper", "max_lower"],
        title=f"AEP bounds, h = {h:.6g}, v = {v:.6g}, eps = {eps:g}, eps1 = {eps1:g}",
    )
    for n in n_grid:
        params = AepParams(n=int(n), eps=eps, h=h, v=v)
        min_lower, max_upper = aep_direct(params, strict)
        min_upper, max_lower = aep_converse(params, eps1, strict)
        table.add_row(n, min_lower, max_upper, min_upper, max_lower)
    return table
