"""Uncertainty relations with quantum side information.

Overlaps of measurement pairs, post-measurement classical-quantum states and the
residuals lhs - rhs of the smooth, effective-overlap, basis-choice, von Neumann and
bipartite uncertainty relations.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from sel.entropy import Labels, as_labels, h_vn
from sel.errors import ArgumentError, CommutationError, LayoutError
from sel.models import EntropyValue
from sel.operators import (
    HermitianOp,
    MultipartiteState,
    Povm,
    ProjectiveMeasurement,
    SystemLayout,
    partial_trace,
    partial_trace_matrix,
    spectral_norm,
    trivial_measurement,
)
from sel.sdp import DEFAULT_SETTINGS, SolverSettings
from sel.smooth import Inequality, check_eps, smooth_h_max, smooth_h_min

logger = logging.getLogger(__name__)

COMMUTATION_TOL = 1e-9


class UcrVariant(StrEnum):
    OVERLAP = "overlap"
    EFFECTIVE = "effective"
    BASIS = "basis"
    VON_NEUMANN = "von_neumann"


def _check_same_dim(*povms: Povm) -> int:
    dims = {p.dim for p in povms}
    if len(dims) != 1:
        raise LayoutError(f"measurements act on different dimensions: {sorted(dims)}")
    return dims.pop()


def overlap(x: Povm, y: Povm) -> float:
    """c(X, Y) = max_xy ||sqrt(M_x) sqrt(N_y)||^2."""
    _check_same_dim(x, y)
    return max(spectral_norm(m @ n) ** 2 for m in x.sqrt_elements for n in y.sqrt_elements)


def k_overlap(x: Povm, y: Povm, k: ProjectiveMeasurement) -> float:
    """c_K = max_kxy ||sqrt(M_x) P^k sqrt(N_y)||, unsquared."""
    _check_same_dim(x, y, k)
    return max(
        spectral_norm(m @ p.matrix @ n)
        for p in k.elements
        for m in x.sqrt_elements
        for n in y.sqrt_elements
    )


def check_commutes(k: ProjectiveMeasurement, *povms: Povm) -> None:
    for povm in povms:
        for p in k.elements:
            for label, e in zip(povm.labels, povm.elements, strict=True):
                if np.abs(p.matrix @ e.matrix - e.matrix @ p.matrix).max() > COMMUTATION_TOL:
                    raise CommutationError(
                        f"projective measurement does not commute with element {label}"
                    )


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    rho_a: MultipartiteState
    x: Povm
    y: Povm
    k: ProjectiveMeasurement | None = None

    def __post_init__(self):
        d = _check_same_dim(self.x, self.y)
        if self.rho_a.op.dim != d:
            raise LayoutError(
                f"state dimension {self.rho_a.op.dim} does not match measurements ({d})"
            )
        if self.k is not None:
            _check_same_dim(self.x, self.k)
            check_commutes(self.k, self.x, self.y)


def k_effective_overlap(setup: MeasurementSetup, form: str = "projected") -> float:
    """Effective overlap of a setup for its K (identity when unset).

    form "plain" weights max_x ||P^k sum_y N_y M_x N_y||; form "projected" uses
    max_x ||sum_y P^k N_y P^k M_x P^k N_y P^k||. The two agree for commuting K.
    """
    k = setup.k or trivial_measurement(setup.x.dim)
    rho = setup.rho_a.matrix
    total = 0.0
    for p in (e.matrix for e in k.elements):
        weight = float(np.trace(p @ rho).real)
        if form == "plain":
            worst = max(
                spectral_norm(p @ sum(n.matrix @ m.matrix @ n.matrix for n in setup.y.elements))
                for m in setup.x.elements
            )
        elif form == "projected":
            worst = max(
                spectral_norm(
                    sum(p @ n.matrix @ p @ m.matrix @ p @ n.matrix @ p for n in setup.y.elements)
                )
                for m in setup.x.elements
            )
        else:
            raise ArgumentError(f"unknown effective overlap form {form!r}")
        total += weight * worst
    return total


def effective_overlap(
    setup: MeasurementSetup,
    candidates: Sequence[ProjectiveMeasurement] = (),
    form: str = "plain",
) -> tuple[float, ProjectiveMeasurement]:
    """Minimum of the effective overlap over the candidates and the identity measurement."""
    best: tuple[float, ProjectiveMeasurement] | None = None
    for k in [*candidates, trivial_measurement(setup.x.dim)]:
        value = k_effective_overlap(MeasurementSetup(setup.rho_a, setup.x, setup.y, k), form)
        logger.debug(f"effective overlap {value:.12g} for a {len(k)}-outcome candidate")
        if best is None or value < best[0]:
            best = (value, k)
    return best


def tensor_measurement(*povms: Povm) -> Povm:
    """Product measurement with outcomes in lexicographic order of the factors."""
    if not povms:
        raise ArgumentError("tensor_measurement needs at least one factor")
    elements, labels = [], []
    for combo in itertools.product(*(list(zip(p.labels, p.elements, strict=True)) for p in povms)):
        m = np.ones((1, 1), dtype=complex)
        for _, e in combo:
            m = np.kron(m, e.matrix)
        elements.append(HermitianOp(m))
        labels.append(",".join(label for label, _ in combo))
    projective = all(isinstance(p, ProjectiveMeasurement) for p in povms)
    cls = ProjectiveMeasurement if projective else Povm
    return cls(tuple(elements), tuple(labels), povms[0].system)


# -- post-measurement states --------------------------------------------------------------------


def _measured_blocks(
    rho: MultipartiteState, ops: Sequence[np.ndarray], a: list[str], keep: list[str]
) -> tuple[list[np.ndarray], SystemLayout]:
    """tr_rest(O rho O†) for each operator O on A, keeping `keep` (which may contain all of A)."""
    keep_a = bool(set(a) & set(keep))
    if keep_a and not set(a) <= set(keep):
        raise LayoutError("either all or none of the measured systems can be kept")
    kept = [label for label in keep if label not in a]
    others = [label for label in rho.labels if label not in a and label not in kept]
    order = a + kept + others
    state = rho.permuted(order)
    d_a = rho.layout.dim_of(a)
    d_rest = state.layout.total // d_a
    keep_idx = (list(range(len(a))) if keep_a else []) + [len(a) + i for i in range(len(kept))]
    blocks = []
    for op in ops:
        if op.shape != (d_a, d_a):
            raise LayoutError(f"operator of shape {op.shape} does not act on {a} (dim {d_a})")
        full = np.kron(op, np.eye(d_rest))
        out = full @ state.matrix @ full.conj().T
        blocks.append(partial_trace_matrix(out, state.dims, keep_idx))
    kept_layout = state.layout.subset((a if keep_a else []) + kept)
    return blocks, kept_layout


def _cq_state(
    blocks: Sequence[np.ndarray], registers: Sequence[tuple[str, int]], rest: SystemLayout
) -> MultipartiteState:
    """sum |r><r| ⊗ blocks[r] with the registers first, r running lexicographically."""
    d = rest.total
    total = len(blocks) * d
    m = np.zeros((total, total), dtype=complex)
    for i, b in enumerate(blocks):
        m[i * d : (i + 1) * d, i * d : (i + 1) * d] = b
    return MultipartiteState(HermitianOp(m), SystemLayout((*registers, *rest.factors)))


def _register_labels(rest: SystemLayout, *bases: str) -> list[str]:
    labels = []
    layout = rest
    for base in bases:
        label = layout.fresh_label(base)
        labels.append(label)
        layout = layout.extended(label, 1)
    return labels


def measure(
    rho: MultipartiteState,
    povm: Povm,
    a: Labels,
    keep: Labels,
    k: ProjectiveMeasurement | None = None,
    register: str = "X",
) -> MultipartiteState:
    """Post-measurement state sum |x,k><x,k| ⊗ tr_rest(sqrt(M_x) P^k rho P^k sqrt(M_x)).

    The K register follows the outcome register when K is given. Keeping the measured
    systems themselves yields the state with the post-measurement system A'.
    """
    a, keep = as_labels(a), as_labels(keep)
    projectors = [np.eye(povm.dim)] if k is None else [p.matrix for p in k.elements]
    if k is not None:
        _check_same_dim(povm, k)
    ops = [m @ p for m in povm.sqrt_elements for p in projectors]
    blocks, rest = _measured_blocks(rho, ops, a, keep)
    if k is None:
        (x_label,) = _register_labels(rest, register)
        return _cq_state(blocks, [(x_label, len(povm))], rest)
    x_label, k_label = _register_labels(rest, register, "K")
    return _cq_state(blocks, [(x_label, len(povm)), (k_label, len(k))], rest)


def measured_states(
    rho_abc: MultipartiteState,
    x: Povm,
    y: Povm,
    k: ProjectiveMeasurement | None = None,
    a: Labels = "A",
    b: Labels = ("B",),
    c: Labels = ("C",),
) -> tuple[MultipartiteState, MultipartiteState]:
    """(rho_XKB, rho_YKC), or (rho_XB, rho_YC) without K; registers are labelled X, Y and K."""
    return measure(rho_abc, x, a, b, k, "X"), measure(rho_abc, y, a, c, k, "Y")


# -- residuals -------------------------------------------------------------------------------------


def _split(state: MultipartiteState, at: int = 0) -> tuple[str, list[str]]:
    """The register at position `at` and every other system of a post-measurement state."""
    labels = list(state.labels)
    return labels.pop(at), labels


def _h_min(state, a, b, eps, settings) -> EntropyValue:
    return smooth_h_min(state, a, b, eps, settings)[0]


def _h_max(state, a, b, eps, settings) -> EntropyValue:
    return smooth_h_max(state, a, b, eps, settings)[0]


def _log_inv(c: float) -> float:
    if not c > 0:
        raise ArgumentError(f"overlap must be positive, got {c}")
    return -math.log2(c)


def _const(bits: float) -> EntropyValue:
    return EntropyValue(bits=bits)


def ucr_residual(
    rho_abc: MultipartiteState,
    x: Povm,
    y: Povm,
    a: Labels = "A",
    b: Labels = ("B",),
    c: Labels = ("C",),
    eps: float = 0.0,
    variant: UcrVariant | str = UcrVariant.OVERLAP,
    *,
    k: ProjectiveMeasurement | None = None,
    candidates: Sequence[ProjectiveMeasurement] = (),
    eps_bar: float | None = None,
    keep_k: bool = False,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Inequality:
    """Evaluate one tripartite uncertainty relation; `slack` of the result is lhs - rhs.

    overlap:      H^eps_min(X|B) + H^eps_max(Y|C) >= log 1/c(X, Y); with K given the
                  K-conditioned entropies are bounded by log 1/c_K.
    effective:    H^(2eps+eps_bar)_min(X|B) + H^eps_max(Y|C) >= log 1/c* - log 2/eps_bar^2,
                  with K chosen among the candidates; keep_k conditions both sides on K.
    basis:        X and Y are the two bases of a uniformly chosen basis register.
    von_neumann:  H(X|B) + H(Y|C) >= log 1/c*, or the K-conditioned form with keep_k.
    """
    variant = UcrVariant(variant)
    eps = check_eps(eps)
    a, b, c = as_labels(a), as_labels(b), as_labels(c)
    if variant is UcrVariant.BASIS:
        return basis_ucr_residual(rho_abc, [x, y], a, b, c, eps, settings=settings)

    if variant is UcrVariant.OVERLAP:
        rho_x, rho_y = measured_states(rho_abc, x, y, k, a, b, c)
        lhs = _h_min(rho_x, *_split(rho_x), eps, settings) + _h_max(
            rho_y, *_split(rho_y), eps, settings
        )
        bound = overlap(x, y) if k is None else k_overlap(x, y, k)
        return Inequality("uncertainty relation (overlap)", lhs, _const(_log_inv(bound)), ">=")

    rho_a = partial_trace(rho_abc, a).permuted(a)
    c_star, chosen = effective_overlap(MeasurementSetup(rho_a, x, y), candidates, form="projected")
    logger.debug(f"effective overlap {c_star:.12g} with a {len(chosen)}-outcome K")
    rho_x, rho_y = measured_states(rho_abc, x, y, chosen if keep_k else None, a, b, c)

    if variant is UcrVariant.VON_NEUMANN:
        lhs = h_vn(rho_x, *_split(rho_x)) + h_vn(rho_y, *_split(rho_y))
        return Inequality("uncertainty relation (von Neumann)", lhs, _const(_log_inv(c_star)), ">=")

    if eps_bar is None or not 0 < eps_bar < 1:
        raise ArgumentError(f"effective-overlap relation needs eps_bar in (0, 1), not {eps_bar}")
    eps_min = check_eps(2 * eps + eps_bar, "2 eps + eps_bar")
    lhs = _h_min(rho_x, *_split(rho_x), eps_min, settings) + _h_max(
        rho_y, *_split(rho_y), eps, settings
    )
    rhs = _log_inv(c_star) - math.log2(2 / eps_bar**2)
    return Inequality("uncertainty relation (effective overlap)", lhs, _const(rhs), ">=")


def iid_basis_family(z0: Povm, z1: Povm, n: int) -> list[Povm]:
    """Measurements on A^n for every basis string theta in {0,1}^n, lexicographic in theta."""
    if n < 1:
        raise ArgumentError("basis family needs n >= 1")
    _check_same_dim(z0, z1)
    thetas = itertools.product((0, 1), repeat=n)
    return [tensor_measurement(*((z0, z1)[t] for t in theta)) for theta in thetas]


def complement(count: int) -> list[int]:
    """Bit flip on every basis choice, for families of size 2^n in lexicographic order."""
    if count < 1 or count & (count - 1):
        raise ArgumentError(f"bit flip needs a power-of-two family size, got {count}")
    return [i ^ (count - 1) for i in range(count)]


def basis_state(
    rho: MultipartiteState,
    family: Sequence[Povm],
    a: Labels,
    keep: Labels,
    weights: Sequence[float] | None = None,
) -> MultipartiteState:
    """rho_ThetaZ(keep) for a basis register Theta independent of rho, measured on A."""
    a, keep = as_labels(a), as_labels(keep)
    outcomes = {len(z) for z in family}
    if len(outcomes) != 1:
        raise ArgumentError("all basis measurements must share the outcome alphabet")
    n = len(family)
    w = np.full(n, 1 / n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(family),) or w.min() < 0 or abs(w.sum() - 1) > 1e-12:
        raise ArgumentError("basis weights must be a probability vector over the family")
    blocks, rest = [], None
    for weight, z in zip(w, family, strict=True):
        zb, rest = _measured_blocks(rho, z.sqrt_elements, a, keep)
        blocks.extend(weight * blk for blk in zb)
    theta, z_label = _register_labels(rest, "Theta", "Z")
    return _cq_state(blocks, [(theta, len(family)), (z_label, outcomes.pop())], rest)


def basis_ucr_residual(
    rho_abc: MultipartiteState,
    family: Sequence[Povm],
    a: Labels = "A",
    b: Labels = ("B",),
    c: Labels = ("C",),
    eps: float = 0.0,
    f: Sequence[int] | None = None,
    weights: Sequence[float] | None = None,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Inequality:
    """H^eps_min(Z|Theta B) + H^eps_max(Z|Theta C) >= log 1/c_f, c_f = max c(Z^t, Z^f(t))."""
    eps = check_eps(eps)
    f = list(f) if f is not None else complement(len(family))
    if sorted(f) != list(range(len(family))):
        raise ArgumentError(f"{f} is not a permutation of the basis choices")
    if weights is not None and any(abs(weights[t] - weights[f[t]]) > 1e-12 for t in range(len(f))):
        raise ArgumentError("basis weights must be invariant under f")
    c_f = max(overlap(family[t], family[f[t]]) for t in range(len(family)))
    rho_b = basis_state(rho_abc, family, a, b, weights)
    rho_c = basis_state(rho_abc, family, a, c, weights)
    lhs = _h_min(rho_b, *_split(rho_b, 1), eps, settings) + _h_max(
        rho_c, *_split(rho_c, 1), eps, settings
    )
    return Inequality("uncertainty relation (basis choice)", lhs, _const(_log_inv(c_f)), ">=")


def composite_eps(eps: float, eps_bar: float, eps_tilde: float, eps_tilde1: float) -> float:
    return 7 * eps_bar + 6 * eps_tilde + 4 * eps_tilde1 + 8 * eps


def bipartite_ucr_residual(
    rho_ab: MultipartiteState,
    x: Povm,
    y: Povm,
    a: Labels = "A",
    b: Labels = ("B",),
    eps: float = 0.0,
    eps_bar: float = 0.0,
    eps_tilde: float = 0.0,
    eps_tilde1: float = 0.0,
    *,
    candidates: Sequence[ProjectiveMeasurement] = (),
    von_neumann: bool = False,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Inequality:
    """Uncertainty with a single observer B, paying for the entanglement between A and B.

    H^hat_min(X|B) + H^eps_max(Y|B) >= H^eps_tilde_min(A|B) - H^eps_tilde1_max(A'|YB)
    + log 1/c* - 4 log 2/eps_bar^2, with hat = 7 eps_bar + 6 eps_tilde + 4 eps_tilde1 + 8 eps.
    The von Neumann form drops the smoothing and the eps_bar penalty.
    """
    a, b = as_labels(a), as_labels(b)
    rho_a = partial_trace(rho_ab, a).permuted(a)
    c_star, _ = effective_overlap(MeasurementSetup(rho_a, x, y), candidates)
    rho_xb = measure(rho_ab, x, a, b, register="X")
    rho_yb = measure(rho_ab, y, a, b, register="Y")
    rho_yab = measure(rho_ab, y, a, a + b, register="Y")
    y_reg = rho_yab.labels[0]
    if von_neumann:
        lhs = h_vn(rho_xb, *_split(rho_xb)) + h_vn(rho_yb, *_split(rho_yb))
        rhs = h_vn(rho_ab, a, b) - h_vn(rho_yab, a, [y_reg, *b]) + _log_inv(c_star)
        return Inequality("bipartite uncertainty relation (von Neumann)", lhs, rhs, ">=")

    for name, value in (("eps", eps), ("eps_tilde", eps_tilde), ("eps_tilde1", eps_tilde1)):
        check_eps(value, name)
    if not 0 < eps_bar < 1:
        raise ArgumentError(f"eps_bar must lie in (0, 1), got {eps_bar}")
    hat = composite_eps(eps, eps_bar, eps_tilde, eps_tilde1)
    if hat >= 1:
        raise ArgumentError(f"composite smoothing parameter {hat:.6g} must be below 1")
    lhs = _h_min(rho_xb, *_split(rho_xb), hat, settings) + _h_max(
        rho_yb, *_split(rho_yb), eps, settings
    )
    rhs = (
        _h_min(rho_ab, a, b, eps_tilde, settings)
        - _h_max(rho_yab, a, [y_reg, *b], eps_tilde1, settings)
        + _log_inv(c_star)
        - 4 * math.log2(2 / eps_bar**2)
    )
    return Inequality("bipartite uncertainty relation", lhs, rhs, ">=")
