"""Smooth min- and max-entropies over the purified-distance ball.

The smooth min-entropy is one SDP on the canonical purification of rho_AB; the smooth
max-entropy follows by duality. Diagonal states without side information take an exact
classical route instead, which keeps i.i.d. products of a few dozen symbols cheap.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cache

import numpy as np
from scipy import linalg, optimize

from sel.bounds.aep import g_of_eps
from sel.entropy import (
    Labels,
    as_labels,
    conditional_renyi,
    h_max,
    h_min,
    log_ratio_tol,
    relative_min,
    relative_renyi,
    restrict,
)
from sel.errors import ArgumentError, ChannelError, LayoutError, SolverError, SupportError
from sel.metrics import purified_distance_matrices
from sel.models import EntropyValue
from sel.operators import (
    HermitianOp,
    MultipartiteState,
    SystemLayout,
    apply_channel,
    classical_blocks,
    classical_quantum,
    hermitize,
    kraus_sum,
    partial_trace,
    partial_trace_matrix,
    positive_part,
    psd_power,
    purification_vector,
    spectral_norm,
    support_projector,
)
from sel.sdp import DEFAULT_SETTINGS, SdpProblem, SolverSettings, choi_from_map

logger = logging.getLogger(__name__)

BALL_SLACK = 1e-7
BISECTION_WIDTH = 1e-4
BRACKET_SPAN = 64.0
MAX_BRACKET_WIDENINGS = 4
FEASIBILITY_SLACK = 1e-9
CLASSICAL_TOL = 1e-10
DIAGONAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SmoothedState:
    """A state in the eps-ball around the original, witnessing a smooth entropy.

    `mixing` is the fraction t of the original state blended into the solver's optimizer to
    bring it inside the ball (0 when no blending was needed). The reported entropy is the
    optimum of the solver and belongs to the unblended optimizer; for t > 0 it can differ from
    the non-smooth entropy of `state`.
    """

    state: MultipartiteState
    distance_to_original: float
    mixing: float = 0.0


@dataclass(frozen=True)
class Inequality:
    """One evaluated inequality `lhs relation rhs` between entropy expressions."""

    name: str
    lhs: EntropyValue
    rhs: EntropyValue
    relation: str

    @property
    def slack(self) -> float:
        diff = float(self.lhs) - float(self.rhs)
        return diff if self.relation == ">=" else -diff

    @property
    def tol(self) -> float:
        return self.lhs.tol + self.rhs.tol

    def holds(self, extra: float = 0.0) -> bool:
        return self.slack >= -(self.tol + extra)


def check_eps(eps: float, name: str = "eps") -> float:
    if not 0 <= eps < 1:
        raise ArgumentError(f"{name} = {eps} outside [0, 1)")
    return float(eps)


def _require_normalized(state: MultipartiteState) -> None:
    if not state.is_normalized:
        raise ArgumentError(
            f"smoothing needs a normalized state, got trace {state.trace:.12g}"
        )


def _is_diagonal(matrix: np.ndarray) -> bool:
    off = matrix - np.diag(np.diag(matrix))
    return float(np.abs(off).max(initial=0.0)) <= DIAGONAL_TOL * max(1.0, spectral_norm(matrix))


def _classical_route(state: MultipartiteState, b: list[str], method: str) -> bool:
    if method not in ("auto", "sdp", "classical"):
        raise ArgumentError(f"unknown smoothing method {method!r}")
    eligible = not b and _is_diagonal(state.matrix)
    if method == "classical" and not eligible:
        raise ArgumentError("classical smoothing needs a diagonal state without side information")
    return method == "classical" or (method == "auto" and eligible)


def _into_ball(
    tilde: np.ndarray, rho: np.ndarray, eps: float
) -> tuple[np.ndarray, float, float]:
    """Pull an approximate optimizer toward rho until it sits inside the eps-ball.

    Fidelity is concave along the segment to rho, so mixing in a fraction t of rho lifts it
    to at least (1-t) F + t. Returns the state, its distance to rho and t.
    """
    tilde = positive_part(hermitize(tilde))
    tr = float(np.trace(tilde).real)
    if tr > 1:
        tilde = tilde / tr
    dist = purified_distance_matrices(tilde, rho)
    if dist <= eps:
        return tilde, dist, 0.0
    target = math.sqrt(1 - eps**2)
    f0 = math.sqrt(max(0.0, 1 - dist**2))
    t = min(1.0, (target - f0) / (1 - f0) * (1 + 1e-9))
    mixed = (1 - t) * tilde + t * rho
    dist = purified_distance_matrices(mixed, rho)
    logger.debug(f"smoothed state pulled into the ball with t = {t:.3e}")
    if dist > eps + BALL_SLACK:
        raise SolverError(f"smoothed state at distance {dist:.9f} exceeds eps = {eps}")
    return mixed, dist, t


# -- classical smoothing ------------------------------------------------------------------------


def _probability_vector(p: Sequence[float] | np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or p.min() < -DIAGONAL_TOL or abs(p.sum() - 1) > 1e-9:
        raise ArgumentError("classical smoothing needs a normalized probability vector")
    return np.clip(p, 0.0, None)


def _capped_candidate(p: np.ndarray, t: float) -> np.ndarray:
    """argmax of sum sqrt(p q) over q <= t, sum q <= 1: q = min(t, c p) with sum q = 1."""
    support = p > 0
    m = int(support.sum())
    q = np.zeros_like(p)
    if t * m <= 1:
        q[support] = t
        return q
    order = np.argsort(-p)
    ps = p[order]
    tail = np.cumsum(ps[::-1])[::-1]
    for k in range(m):
        c = (1 - k * t) / tail[k]
        if c * ps[k] <= t and (k == 0 or c * ps[k - 1] >= t):
            q[order[:k]] = t
            q[order[k:]] = c * ps[k:]
            return q
    q[support] = t
    return q


def classical_smooth_h_min(
    p: Sequence[float] | np.ndarray, eps: float
) -> tuple[EntropyValue, np.ndarray]:
    """Exact smooth min-entropy of a distribution with trivial side information."""
    p = _probability_vector(p)
    eps = check_eps(eps)
    top = float(p.max())
    if eps == 0:
        return EntropyValue(bits=-math.log2(top), tol=CLASSICAL_TOL), p.copy()
    target = math.sqrt(1 - eps**2)

    def shortfall(t: float) -> float:
        return float(np.sqrt(p * _capped_candidate(p, t)).sum()) - target

    t = optimize.brentq(shortfall, 0.0, top, xtol=1e-15, rtol=1e-13)
    q = _capped_candidate(p, t)
    return EntropyValue(bits=-math.log2(t), tol=CLASSICAL_TOL), q


def classical_smooth_h_max(
    p: Sequence[float] | np.ndarray, eps: float
) -> tuple[EntropyValue, np.ndarray]:
    """Exact smooth max-entropy: minimize sum sqrt(q) over the eps-ball.

    Optimizers have the form sqrt(q_x) = s (sqrt(p_x) - k)_+ with the fidelity constraint
    tight; k runs over [0, max sqrt(p)) and the norm constraint sum q <= 1 cuts it off.
    """
    p = _probability_vector(p)
    eps = check_eps(eps)
    sp = np.sqrt(p)
    if eps == 0:
        return EntropyValue(bits=2 * math.log2(float(sp.sum())), tol=CLASSICAL_TOL), p.copy()
    f = math.sqrt(1 - eps**2)

    def amplitudes(kappa: float) -> np.ndarray:
        w = np.clip(sp - kappa, 0.0, None)
        return w * (f / float(np.dot(sp, w)))

    def excess(kappa: float) -> float:
        return float(np.sum(amplitudes(kappa) ** 2)) - 1.0

    top = float(sp.max())
    peak = np.isclose(sp, top, rtol=0, atol=1e-15)
    limit = np.where(peak, f / (top * peak.sum()), 0.0)
    candidates = [amplitudes(0.0)]
    if float(np.sum(limit**2)) <= 1:
        candidates.append(limit)
    grid = np.unique(np.concatenate([np.linspace(0.0, top, 2049)[:-1], sp[sp < top]]))
    values = [excess(k) for k in grid]
    for k0, k1, v0, v1 in zip(grid[:-1], grid[1:], values[:-1], values[1:], strict=True):
        if v0 <= 0 < v1:
            root = optimize.brentq(excess, k0, k1, xtol=1e-15)
            r = amplitudes(root)
            r = r / max(1.0, math.sqrt(float(np.sum(r**2))))
            candidates.append(r)
    best = min(candidates, key=lambda r: float(r.sum()))
    value = EntropyValue(bits=2 * math.log2(float(best.sum())), tol=CLASSICAL_TOL)
    return value, best**2


def _classical_smoothed(state: MultipartiteState, q: np.ndarray) -> SmoothedState:
    tilde = MultipartiteState.from_diagonal(q, state.layout)
    return SmoothedState(tilde, purified_distance_matrices(tilde.matrix, state.matrix))


# -- smooth min-entropy SDP ----------------------------------------------------------------------


def smooth_min_problem(
    psi: np.ndarray, d_a: int, d_b: int, d_c: int, eps: float
) -> SdpProblem:
    """min tr(sigma_B) over sigma_B ⊕ R_ABC subject to

    1_A ⊗ sigma_B >= tr_C R,   tr R <= 1,   <psi|R|psi> >= 1 - eps^2.
    """
    n = d_a * d_b * d_c
    objective = linalg.block_diag(np.eye(d_b), np.zeros((n, n)))
    offset = linalg.block_diag(np.zeros((d_a * d_b, d_a * d_b)), [[-1.0]], [[1.0 - eps**2]])

    def psi_map(x: np.ndarray) -> np.ndarray:
        sigma, r = x[:d_b, :d_b], x[d_b:, d_b:]
        tr_c = partial_trace_matrix(r, [d_a * d_b, d_c], [0])
        return linalg.block_diag(
            np.kron(np.eye(d_a), sigma) - tr_c,
            [[-np.trace(r)]],
            [[psi.conj() @ r @ psi]],
        )

    return SdpProblem(
        HermitianOp(objective),
        HermitianOp(offset),
        choi_from_map(psi_map, d_b + n, d_a * d_b + 2),
        name="smooth-min-entropy",
    )


def _smooth_min_sdp(
    state: MultipartiteState, d_a: int, d_b: int, eps: float, settings: SolverSettings
) -> tuple[EntropyValue, np.ndarray, np.ndarray]:
    """Value, optimizer R on AB ⊗ C, and purification amplitudes of `state` (A first)."""
    amp = purification_vector(state)
    d_c = amp.shape[1]
    sol = settings.solve(smooth_min_problem(amp.reshape(-1), d_a, d_b, d_c, eps))
    alpha = sol.primal_value
    if alpha <= 0:
        raise SolverError(f"smooth min-entropy SDP returned non-positive optimum {alpha}", sol)
    r = sol.x.matrix[d_b:, d_b:]
    return EntropyValue(bits=-math.log2(alpha), tol=log_ratio_tol(alpha, sol.gap)), r, amp


def smooth_h_min(
    rho: MultipartiteState,
    a: Labels,
    b: Labels = (),
    eps: float = 0.0,
    settings: SolverSettings = DEFAULT_SETTINGS,
    method: str = "auto",
) -> tuple[EntropyValue, SmoothedState]:
    eps = check_eps(eps)
    state, d_a, d_b = restrict(rho, a, b)
    _require_normalized(state)
    if _classical_route(state, as_labels(b), method):
        value, q = classical_smooth_h_min(np.diag(state.matrix).real, eps)
        return value, _classical_smoothed(state, q)
    if eps == 0:
        return h_min(state, as_labels(a), as_labels(b), settings), SmoothedState(state, 0.0)
    value, r, amp = _smooth_min_sdp(state, d_a, d_b, eps, settings)
    tilde = partial_trace_matrix(r, [d_a * d_b, amp.shape[1]], [0])
    tilde, dist, t = _into_ball(tilde, state.matrix, eps)
    return value, SmoothedState(MultipartiteState(HermitianOp(tilde), state.layout), dist, t)


def smooth_h_max(
    rho: MultipartiteState,
    a: Labels,
    b: Labels = (),
    eps: float = 0.0,
    settings: SolverSettings = DEFAULT_SETTINGS,
    method: str = "auto",
) -> tuple[EntropyValue, SmoothedState]:
    """H_max^eps(A|B) = -H_min^eps(A|C) on the canonical purification of rho_AB."""
    eps = check_eps(eps)
    a, b = as_labels(a), as_labels(b)
    state, d_a, d_b = restrict(rho, a, b)
    _require_normalized(state)
    if _classical_route(state, b, method):
        value, q = classical_smooth_h_max(np.diag(state.matrix).real, eps)
        return value, _classical_smoothed(state, q)
    if eps == 0:
        return h_max(state, a, b, settings), SmoothedState(state, 0.0)
    psi = purification_vector(state)
    d_c = psi.shape[1]
    # rho_AC of the purification, with A first and C last
    m = psi.reshape(d_a, d_b, d_c).transpose(0, 2, 1).reshape(d_a * d_c, d_b)
    rho_ac = MultipartiteState(
        HermitianOp(m @ m.conj().T), SystemLayout.of(("A", d_a), ("C", d_c))
    )
    value, r, amp = _smooth_min_sdp(rho_ac, d_a, d_c, eps, settings)
    # isometry D -> B carrying the canonical purification of rho_AC onto psi_ACB
    lam = np.sum(np.abs(amp) ** 2, axis=0)
    v = ((amp.conj().T @ m) / lam[:, None]).T
    d_d = amp.shape[1]
    lift_v = np.kron(np.eye(d_a * d_c), v)
    r_acb = lift_v @ r @ lift_v.conj().T
    tilde = partial_trace_matrix(r_acb, [d_a, d_c, d_b], [0, 2])
    logger.debug(f"smooth max-entropy optimizer mapped through a {d_b}x{d_d} isometry")
    tilde, dist, t = _into_ball(tilde, state.matrix, eps)
    smoothed = SmoothedState(MultipartiteState(HermitianOp(tilde), state.layout), dist, t)
    return -value, smoothed


# -- smooth relative min-entropy -----------------------------------------------------------------


def _support_contained(rho: np.ndarray, sigma: np.ndarray) -> bool:
    outside = np.eye(sigma.shape[0]) - support_projector(sigma)
    return spectral_norm(outside @ rho @ outside) <= 1e-10 * max(1.0, spectral_norm(rho))


def relative_ball_problem(psi: np.ndarray, sigma: np.ndarray, d: int, r: int, lam: float) -> SdpProblem:
    """max <psi|R|psi> s.t. tr_P R <= 2^-lam sigma, tr R <= 1 (written as a minimization)."""
    n = d * r
    offset = linalg.block_diag(-(2.0**-lam) * sigma, [[-1.0]])

    def psi_map(x: np.ndarray) -> np.ndarray:
        return linalg.block_diag(-partial_trace_matrix(x, [d, r], [0]), [[-np.trace(x)]])

    return SdpProblem(
        HermitianOp(-np.outer(psi, psi.conj())),
        HermitianOp(offset),
        choi_from_map(psi_map, n, d + 1),
        name="relative-ball",
    )


def smooth_relative_min(
    rho: MultipartiteState,
    sigma: HermitianOp | np.ndarray,
    eps: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> EntropyValue:
    """max over the eps-ball of S_min(rho~ || sigma), bisected to BISECTION_WIDTH bits."""
    eps = check_eps(eps)
    _require_normalized(rho)
    sm = sigma.matrix if isinstance(sigma, HermitianOp) else np.asarray(sigma, dtype=complex)
    if sm.shape != rho.matrix.shape:
        raise LayoutError(f"sigma has shape {sm.shape}, rho {rho.matrix.shape}")
    base = relative_min(rho.matrix, sm)
    if eps == 0 or not base.is_finite:
        return base
    amp = purification_vector(rho)
    d, r = amp.shape
    psi = amp.reshape(-1)
    threshold = 1 - eps**2 - FEASIBILITY_SLACK

    def feasible(lam: float) -> bool:
        sol = settings.solve(relative_ball_problem(psi, sm, d, r, lam))
        return -sol.primal_value >= threshold

    lo = base.bits
    hi = lo + BRACKET_SPAN
    for _ in range(MAX_BRACKET_WIDENINGS):
        if not feasible(hi):
            break
        lo, hi = hi, hi + BRACKET_SPAN
    else:
        raise SolverError(f"smooth relative min-entropy bracket did not close below {hi}")
    while hi - lo > BISECTION_WIDTH:
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
        logger.debug(f"relative min-entropy bracket [{lo:.6f}, {hi:.6f}]")
    return EntropyValue(bits=lo, tol=hi - lo)


def explicit_smoothing(
    rho: MultipartiteState, sigma: HermitianOp | np.ndarray, lam: float
) -> tuple[SmoothedState, float]:
    """Explicit smoothing rho~ = G rho G† with S_min(rho~||sigma) >= lam.

    Delta = {rho - 2^-lam sigma}_+, G = L^1/2 (L + Delta)^-1/2 with L = 2^-lam sigma; the
    returned eps = sqrt(2 tr Delta - (tr Delta)^2) bounds the purified distance.
    """
    sm = sigma.matrix if isinstance(sigma, HermitianOp) else np.asarray(sigma, dtype=complex)
    if not _support_contained(rho.matrix, sm):
        raise SupportError("support of rho is not contained in the support of sigma")
    big_l = (2.0**-lam) * sm
    delta = positive_part(rho.matrix - big_l)
    g = psd_power(big_l, 0.5) @ psd_power(big_l + delta, -0.5)
    tilde = MultipartiteState(HermitianOp(g @ rho.matrix @ g.conj().T), rho.layout)
    tr_delta = float(np.trace(delta).real)
    achieved = math.sqrt(max(0.0, 2 * tr_delta - tr_delta**2))
    dist = purified_distance_matrices(tilde.matrix, rho.matrix)
    return SmoothedState(tilde, dist), achieved


# -- evaluators for smooth-entropy inequalities ---------------------------------------------------


def _entropy_cache(rho: MultipartiteState, settings: SolverSettings):
    @cache
    def h(kind: str, a: tuple[str, ...], b: tuple[str, ...], eps: float) -> EntropyValue:
        fn = smooth_h_min if kind == "min" else smooth_h_max
        return fn(rho, list(a), list(b), eps, settings)[0]

    return h


def chain_rule_eval(
    rho: MultipartiteState,
    a: Labels,
    b: Labels,
    c: Labels,
    eps: float,
    eps1: float = 0.0,
    eps2: float = 0.0,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> list[Inequality]:
    """Both sides of the six chain rules for smooth entropies of rho_ABC."""
    if not 0 < eps < 1:
        raise ArgumentError(f"chain rules need eps in (0, 1), got {eps}")
    check_eps(eps1, "eps1")
    check_eps(eps2, "eps2")
    composite = {
        "min AB|C": eps + 2 * eps1 + eps2,
        "max AB|C": eps + eps1 + 2 * eps2,
        "min A|BC": eps + 3 * eps1 + 2 * eps2,
        "max A|BC": 2 * eps + eps1 + 2 * eps2,
        "min B|C": 2 * eps + eps1 + 2 * eps2,
        "max B|C": eps + 3 * eps1 + 2 * eps2,
    }
    for name, value in composite.items():
        if value >= 1:
            raise ArgumentError(f"composite smoothing parameter for {name} is {value} >= 1")
    a, b, c = tuple(as_labels(a)), tuple(as_labels(b)), tuple(as_labels(c))
    h = _entropy_cache(rho, settings)
    log_term = math.log2(2 / eps**2)
    ab, bc = a + b, b + c
    return [
        Inequality(
            "min AB|C",
            h("min", ab, c, composite["min AB|C"]),
            h("min", a, bc, eps1) + h("min", b, c, eps2) - log_term,
            ">=",
        ),
        Inequality(
            "max AB|C",
            h("max", ab, c, composite["max AB|C"]),
            h("max", a, bc, eps1) + h("max", b, c, eps2) + log_term,
            "<=",
        ),
        Inequality(
            "min A|BC",
            h("min", a, bc, composite["min A|BC"]),
            h("min", ab, c, eps1) - h("max", b, c, eps2) - 2 * log_term,
            ">=",
        ),
        Inequality(
            "max A|BC",
            h("max", a, bc, composite["max A|BC"]),
            h("max", ab, c, eps1) - h("min", b, c, eps2) + 3 * log_term,
            "<=",
        ),
        Inequality(
            "min B|C",
            h("min", b, c, composite["min B|C"]),
            h("min", ab, c, eps1) - h("max", a, bc, eps2) - 3 * log_term,
            ">=",
        ),
        Inequality(
            "max B|C",
            h("max", b, c, composite["max B|C"]),
            h("max", ab, c, eps1) - h("min", a, bc, eps2) + 2 * log_term,
            "<=",
        ),
    ]


def data_processing_check(
    rho: MultipartiteState,
    a: Labels,
    b: Labels,
    eps: float,
    kraus: Sequence[np.ndarray] | None = None,
    on: str | None = None,
    b_after: Labels | None = None,
    kind: str = "min",
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> tuple[EntropyValue, EntropyValue]:
    """H^eps(A|B) of rho and of its image; the image is rho itself when no channel is given.

    Channels on A must be sub-unital; the max-entropy statement needs trace preservation.
    `b_after` names the conditioning systems after processing (default: b).
    """
    if kind not in ("min", "max"):
        raise ArgumentError(f"kind must be 'min' or 'max', got {kind!r}")
    a, b = as_labels(a), as_labels(b)
    fn = smooth_h_min if kind == "min" else smooth_h_max
    tau = rho
    if kraus is not None:
        if on is None or (on not in a and on not in b):
            raise LayoutError(f"channel must act on one of {a + b}")
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        if on in a:
            unital = sum(k @ k.conj().T for k in ks)
            if float(linalg.eigvalsh(hermitize(unital)).max()) > 1 + 1e-9:
                raise ChannelError("channel on A is not sub-unital")
        if kind == "max":
            dev = spectral_norm(kraus_sum(ks) - np.eye(ks[0].shape[1]))
            if dev > 1e-9:
                raise ChannelError("max-entropy data processing needs a trace-preserving channel")
        tau = apply_channel(rho, ks, on, ks[0].shape[0])
    after_b = b if b_after is None else as_labels(b_after)
    before = fn(rho, a, b, eps, settings)[0]
    after = fn(tau, a, after_b, eps, settings)[0]
    return before, after


def classical_register_bounds_check(
    rho: MultipartiteState,
    x: str,
    a: Labels,
    b: Labels = (),
    eps: float = 0.0,
    f: Sequence[int] | None = None,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> list[Inequality]:
    """Entropy bounds for a classical register X: adding it to A, to B, and coarse-graining it."""
    a, b = as_labels(a), as_labels(b)
    if x in a or x in b:
        raise LayoutError(f"register {x} must be distinct from A and B")
    state = partial_trace(rho, [x, *a, *b]).permuted([x, *a, *b])
    blocks = classical_blocks(state, x)
    log_dx = math.log2(len(blocks))
    h = _entropy_cache(state, settings)
    xa, ta, tb, tbx = (x, *a), tuple(a), tuple(b), (*b, x)
    out: list[Inequality] = []
    for kind in ("min", "max"):
        base = h(kind, ta, tb, eps)
        joint = h(kind, xa, tb, eps)
        conditioned = h(kind, ta, tbx, eps)
        out += [
            Inequality(f"{kind} XA|B lower", joint, base, ">="),
            Inequality(f"{kind} XA|B upper", joint, base + log_dx, "<="),
            Inequality(f"{kind} A|BX upper", conditioned, base, "<="),
            Inequality(f"{kind} A|BX lower", conditioned, base - log_dx, ">="),
        ]
    if f is not None:
        if len(f) != len(blocks) or min(f) < 0:
            raise ArgumentError(f"function table {list(f)} does not match register of size {len(blocks)}")
        z_label = state.layout.fresh_label("Z")
        z_blocks = [np.zeros_like(blocks[0]) for _ in range(max(f) + 1)]
        for xv, zv in enumerate(f):
            z_blocks[zv] = z_blocks[zv] + blocks[xv]
        tau = classical_quantum(z_blocks, z_label, SystemLayout(state.layout.factors[1:]))
        h_tau = _entropy_cache(tau, settings)
        for kind in ("min", "max"):
            out.append(
                Inequality(
                    f"{kind} coarse-grained",
                    h_tau(kind, (z_label, *a), tb, eps),
                    h(kind, xa, tb, eps),
                    "<=",
                )
            )
    return out


def min_max_gap_check(
    rho: MultipartiteState,
    a: Labels,
    b: Labels,
    eps: float,
    eps1: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> Inequality:
    """H_min^eps(A|B) <= H_max^eps1(A|B) + log 1/(1 - (eps + eps1)^2)."""
    if eps + eps1 >= 1:
        raise ArgumentError(f"eps + eps1 = {eps + eps1} must be below 1")
    lhs = smooth_h_min(rho, a, b, eps, settings)[0]
    rhs = smooth_h_max(rho, a, b, eps1, settings)[0] + math.log2(1 / (1 - (eps + eps1) ** 2))
    return Inequality("min-max gap", lhs, rhs, "<=")


def renyi_min_bound(
    rho: MultipartiteState | HermitianOp | np.ndarray,
    sigma: HermitianOp | np.ndarray,
    eps: float,
    alpha: float,
    form: str = "g",
) -> EntropyValue:
    """Lower bound S_alpha(rho||sigma) - penalty/(alpha-1) on the smooth relative min-entropy."""
    if not alpha > 1:
        raise ArgumentError(f"the Rényi lower bound needs alpha > 1, got {alpha}")
    if not 0 < eps < 1:
        raise ArgumentError(f"eps must lie in (0, 1), got {eps}")
    if form == "g":
        penalty = g_of_eps(eps)
    elif form == "log2":
        penalty = math.log2(2 / eps**2)
    else:
        raise ArgumentError(f"unknown bound form {form!r}")
    rm = rho.matrix if isinstance(rho, MultipartiteState | HermitianOp) else rho
    s = relative_renyi(alpha, rm, sigma)
    return s if not s.is_finite else s - penalty / (alpha - 1)


def max_side_renyi_bound(
    rho: MultipartiteState, a: Labels, b: Labels, eps: float, alpha: float
) -> EntropyValue:
    """Upper bound H_alpha(A|B) + g(eps)/(1-alpha) on H_max^eps(A|B), for alpha in [0, 1)."""
    if not 0 <= alpha < 1:
        raise ArgumentError(f"the max-side bound needs alpha in [0, 1), got {alpha}")
    if not 0 < eps < 1:
        raise ArgumentError(f"eps must lie in (0, 1), got {eps}")
    s = conditional_renyi(alpha, rho, a, b)
    return s if not s.is_finite else s + g_of_eps(eps) / (1 - alpha)
