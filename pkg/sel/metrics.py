"""Distance measures on sub-normalized states."""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from sel.errors import ArgumentError, DomainError, LayoutError, SupportError
from sel.models import DistanceKind, DistanceValue
from sel.operators import (
    HermitianOp,
    MultipartiteState,
    hermitize,
    lift,
    partial_trace,
    psd_power,
    psd_sqrt,
    rank_tol,
    support_projector,
    trace_norm,
)

FIDELITY_OVERSHOOT = 1e-8


def _check_dims(rho: MultipartiteState, tau: MultipartiteState) -> None:
    if rho.op.dim != tau.op.dim:
        raise LayoutError(f"dimension mismatch: {rho.op.dim} vs {tau.op.dim}")


def trace_distance_matrices(a: np.ndarray, b: np.ndarray) -> float:
    w = linalg.eigvalsh(hermitize(a - b))
    return float(max(w[w > 0].sum(), -w[w < 0].sum()))


def fidelity_matrices(a: np.ndarray, b: np.ndarray) -> float:
    """Generalized fidelity of PSD matrices with trace at most one."""
    overlap = trace_norm(psd_sqrt(a) @ psd_sqrt(b))
    deficit = max(0.0, 1 - np.trace(a).real) * max(0.0, 1 - np.trace(b).real)
    f = overlap + math.sqrt(deficit)
    if f > 1 + FIDELITY_OVERSHOOT:
        raise DomainError(f"fidelity {f} exceeds one")
    return min(f, 1.0)


def purified_distance_matrices(a: np.ndarray, b: np.ndarray) -> float:
    return math.sqrt(max(0.0, 1 - fidelity_matrices(a, b) ** 2))


def trace_distance(rho: MultipartiteState, tau: MultipartiteState) -> DistanceValue:
    _check_dims(rho, tau)
    return DistanceValue(
        value=trace_distance_matrices(rho.matrix, tau.matrix), kind=DistanceKind.TRACE_DISTANCE
    )


def fidelity(rho: MultipartiteState, tau: MultipartiteState) -> DistanceValue:
    _check_dims(rho, tau)
    return DistanceValue(value=fidelity_matrices(rho.matrix, tau.matrix), kind=DistanceKind.FIDELITY)


def purified_distance(rho: MultipartiteState, tau: MultipartiteState) -> DistanceValue:
    _check_dims(rho, tau)
    return DistanceValue(
        value=purified_distance_matrices(rho.matrix, tau.matrix),
        kind=DistanceKind.PURIFIED_DISTANCE,
    )


def uhlmann_operator(rho: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """X = tau^(1/2) V rho^(-1/2), with V aligning the singular vectors of sqrt(rho) sqrt(tau)."""
    sr, st = psd_sqrt(rho), psd_sqrt(tau)
    u, _, vh = linalg.svd(sr @ st)
    v = vh.conj().T @ u.conj().T
    return st @ v @ psd_power(rho, -0.5)


def _aux_labels(rho: MultipartiteState, phi: MultipartiteState) -> list[str]:
    missing = [label for label in rho.labels if label not in phi.labels]
    if missing:
        raise ArgumentError(f"purification lacks subsystems {missing}")
    return [label for label in phi.labels if label not in rho.labels]


def uhlmann_partner(
    rho: MultipartiteState, tau: MultipartiteState, phi: MultipartiteState
) -> MultipartiteState:
    """A purification of tau at the same purified distance from phi as tau from rho."""
    _check_dims(rho, tau)
    aux = _aux_labels(rho, phi)
    if not phi.is_pure or np.abs(partial_trace(phi, rho.labels).matrix - rho.matrix).max() > 1e-9:
        raise ArgumentError("phi is not a purification of rho")
    x = uhlmann_operator(rho.matrix, tau.matrix)
    full = lift(x, rho.labels, phi.layout)
    out = MultipartiteState(HermitianOp(full @ phi.matrix @ full.conj().T), phi.layout)
    reduced = partial_trace(out, rho.labels).matrix
    if np.abs(reduced - tau.matrix).max() > 1e-8:
        raise ArgumentError(f"purifying system {aux} is too small to purify the target state")
    return out


def min_distance_extension(
    rho_ab: MultipartiteState, sigma_a: MultipartiteState
) -> MultipartiteState:
    """Extension sigma_AB = X rho_AB X† of sigma_A with P(sigma_AB, rho_AB) = P(sigma_A, rho_A)."""
    a = list(sigma_a.labels)
    rho_a = partial_trace(rho_ab, a)
    if rho_a.layout != sigma_a.layout:
        raise LayoutError(f"sigma lives on {sigma_a.layout}, rho_ab marginal on {rho_a.layout}")
    proj = support_projector(rho_a.matrix)
    s = sigma_a.matrix
    if np.abs(s - proj @ s @ proj).max() > rank_tol(s):
        raise SupportError("support of sigma_A is not contained in the support of rho_A")
    x = lift(uhlmann_operator(rho_a.matrix, s), a, rho_ab.layout)
    return MultipartiteState(HermitianOp(x @ rho_ab.matrix @ x.conj().T), rho_ab.layout)
