"""Non-smooth entropies: conditional min/max via SDP, von Neumann, Rényi and relative forms."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from sel.errors import ArgumentError, LayoutError, SolverError
from sel.models import EntropyValue
from sel.operators import (
    HermitianOp,
    MultipartiteState,
    SystemLayout,
    classical_blocks,
    hermitize,
    partial_trace,
    partial_trace_matrix,
    psd_power,
    purification,
    spectral_norm,
    support_projector,
    trace_norm,
)
from sel.sdp import DEFAULT_SETTINGS, SdpProblem, SdpSolution, SolverSettings, choi_from_map

logger = logging.getLogger(__name__)

LN2 = math.log(2)
EIGEN_TOL = 1e-10
CROSS_CHECK_SLACK = 1e-6
DIST_TOL = 1e-12
OVERLAP_TOL = 1e-12

Labels = str | Sequence[str]


def as_labels(labels: Labels) -> list[str]:
    return [labels] if isinstance(labels, str) else list(labels)


def restrict(rho: MultipartiteState, a: Labels, b: Labels) -> tuple[MultipartiteState, int, int]:
    """rho traced down to A ∪ B and ordered A first; returns (state, d_A, d_B)."""
    a, b = as_labels(a), as_labels(b)
    if not a:
        raise LayoutError("conditional entropy needs a non-empty system A")
    if set(a) & set(b) or len(set(a)) != len(a) or len(set(b)) != len(b):
        raise LayoutError(f"systems {a} and {b} overlap")
    state = partial_trace(rho, a + b).permuted(a + b)
    return state, rho.layout.dim_of(a), rho.layout.dim_of(b)


def log_ratio_tol(alpha: float, gap: float) -> float:
    return math.log2(1 + abs(gap) / alpha)


# -- min-entropy ---------------------------------------------------------------------------


def min_entropy_problem(rho_ab: np.ndarray, d_a: int, d_b: int) -> SdpProblem:
    """min tr(sigma_B) s.t. 1_A ⊗ sigma_B >= rho_AB."""
    return SdpProblem(
        HermitianOp.identity(d_b),
        HermitianOp(rho_ab),
        choi_from_map(lambda x: np.kron(np.eye(d_a), x), d_b, d_a * d_b),
        name="min-entropy",
    )


def h_min_solution(
    rho: MultipartiteState, a: Labels, b: Labels, settings: SolverSettings = DEFAULT_SETTINGS
) -> tuple[EntropyValue, SdpSolution]:
    state, d_a, d_b = restrict(rho, a, b)
    sol = settings.solve(min_entropy_problem(state.matrix, d_a, d_b))
    alpha = sol.primal_value
    if alpha <= 0:
        raise SolverError(f"min-entropy SDP returned non-positive optimum {alpha}", sol)
    value = EntropyValue(bits=-math.log2(alpha), tol=log_ratio_tol(alpha, sol.gap))
    return value, sol


def h_min(
    rho: MultipartiteState, a: Labels, b: Labels = (), settings: SolverSettings = DEFAULT_SETTINGS
) -> EntropyValue:
    return h_min_solution(rho, a, b, settings)[0]


# -- max-entropy ---------------------------------------------------------------------------


def max_entropy_problem(psi_abc: np.ndarray, d_a: int, d_b: int, d_c: int) -> SdpProblem:
    """min mu s.t. mu 1_B >= tr_A Z_AB, Z_AB ⊗ 1_C >= psi_ABC, over the variable mu ⊕ Z."""
    n = d_a * d_b
    objective = np.zeros((n + 1, n + 1))
    objective[0, 0] = 1.0
    offset = linalg.block_diag(np.zeros((d_b, d_b)), psi_abc)

    def psi(x: np.ndarray) -> np.ndarray:
        mu, z = x[0, 0], x[1:, 1:]
        tr_a = np.einsum("ibic->bc", z.reshape(d_a, d_b, d_a, d_b))
        return linalg.block_diag(mu * np.eye(d_b) - tr_a, np.kron(z, np.eye(d_c)))

    return SdpProblem(
        HermitianOp(objective),
        HermitianOp(offset),
        choi_from_map(psi, n + 1, d_b + n * d_c),
        name="max-entropy",
    )


def h_max_direct(
    rho: MultipartiteState, a: Labels, b: Labels = (), settings: SolverSettings = DEFAULT_SETTINGS
) -> EntropyValue:
    state, d_a, d_b = restrict(rho, a, b)
    psi = purification(state, "C")
    d_c = psi.layout.dims[-1]
    sol = settings.solve(max_entropy_problem(psi.matrix, d_a, d_b, d_c))
    alpha = sol.primal_value
    return EntropyValue(bits=math.log2(alpha), tol=log_ratio_tol(alpha, sol.gap))


def h_max(
    rho: MultipartiteState,
    a: Labels,
    b: Labels = (),
    settings: SolverSettings = DEFAULT_SETTINGS,
    cross_check: bool = False,
) -> EntropyValue:
    """H_max(A|B) = -H_min(A|C) on the canonical purification of rho_AB."""
    state, _, _ = restrict(rho, a, b)
    a = as_labels(a)
    psi = purification(state, "C")
    c = psi.layout.labels[-1]
    value = -h_min(psi, a, [c], settings)
    if cross_check:
        direct = h_max_direct(rho, a, b, settings)
        if abs(direct.bits - value.bits) > direct.tol + value.tol + CROSS_CHECK_SLACK:
            raise SolverError(
                f"max-entropy routes disagree: duality {value.bits:.9f}, direct {direct.bits:.9f}"
            )
        logger.debug(f"max-entropy cross-check passed: {value.bits:.9f} vs {direct.bits:.9f}")
    return value


# -- von Neumann -----------------------------------------------------------------------------


def _vn(matrix: np.ndarray) -> float:
    w = np.clip(linalg.eigvalsh(hermitize(matrix)), 0.0, None)
    return float(-np.sum(xlogy(w, w)) / LN2)


def h_vn(rho: MultipartiteState, a: Labels, b: Labels = ()) -> EntropyValue:
    state, d_a, d_b = restrict(rho, a, b)
    rho_b = partial_trace_matrix(state.matrix, [d_a, d_b], [1])
    return EntropyValue(bits=_vn(state.matrix) - _vn(rho_b), tol=EIGEN_TOL)


def binary_entropy(q: float) -> float:
    if not 0 <= q <= 1:
        raise ArgumentError(f"binary entropy needs q in [0, 1], got {q}")
    return float(-(xlogy(q, q) + xlogy(1 - q, 1 - q)) / LN2)


# -- classical closed forms ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassicalDist:
    """Joint distribution P_XY as a (d_X, d_Y) array; a vector is read as trivial Y."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2 or p.size == 0:
            raise ArgumentError(f"distribution must be a vector or matrix, got shape {p.shape}")
        if p.min() < -DIST_TOL or abs(p.sum() - 1.0) > DIST_TOL * max(1, p.size):
            raise ArgumentError(f"not a probability distribution (sum {p.sum():.15g})")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.probabilities.shape

    def to_state(self, x: str = "X", y: str = "Y") -> MultipartiteState:
        """Diagonal state sum_xy P(x,y) |x><x| ⊗ |y><y|; Y is dropped when trivial."""
        dx, dy = self.shape
        if dy == 1:
            return MultipartiteState.from_diagonal(self.probabilities[:, 0], SystemLayout.of((x, dx)))
        return MultipartiteState.from_diagonal(
            self.probabilities.reshape(-1), SystemLayout.of((x, dx), (y, dy))
        )


def _dist(p: ClassicalDist | np.ndarray | Sequence) -> ClassicalDist:
    return p if isinstance(p, ClassicalDist) else ClassicalDist(np.asarray(p, dtype=float))


def classical_h_min(p: ClassicalDist | np.ndarray | Sequence) -> EntropyValue:
    pxy = _dist(p).probabilities
    return EntropyValue(bits=-math.log2(pxy.max(axis=0).sum()), tol=DIST_TOL)


def classical_h_max(p: ClassicalDist | np.ndarray | Sequence) -> EntropyValue:
    pxy = _dist(p).probabilities
    return EntropyValue(bits=math.log2(float((np.sqrt(pxy).sum(axis=0) ** 2).sum())), tol=DIST_TOL)


def guessing_probability(
    rho: MultipartiteState, x: str, b: Labels = (), settings: SolverSettings = DEFAULT_SETTINGS
) -> float:
    """Optimal probability of guessing the classical register X from B."""
    state, _, _ = restrict(rho, [x], b)
    classical_blocks(state, x)
    return 2.0 ** (-h_min(state, [x], b, settings).bits)


# -- quasi-entropies and relative entropies ---------------------------------------------------


def _pairs(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues of a and b and the overlap matrix |<e_i|f_j>|^2."""
    if a.shape != b.shape:
        raise LayoutError(f"operator shapes differ: {a.shape} vs {b.shape}")
    lam, e = linalg.eigh(hermitize(a))
    mu, f = linalg.eigh(hermitize(b))
    tol_a = 1e-10 * max(1.0, float(np.abs(lam).max()))
    tol_b = 1e-10 * max(1.0, float(np.abs(mu).max()))
    if lam.min() < -tol_a or mu.min() < -tol_b:
        raise ArgumentError("quasi-entropies need positive semi-definite arguments")
    lam = np.where(lam > tol_a, lam, 0.0)
    mu = np.where(mu > tol_b, mu, 0.0)
    overlaps = np.abs(e.conj().T @ f) ** 2
    return lam, mu, overlaps


def _slope_at_infinity(f: Callable[[float], float]) -> float:
    """lim f(t)/t for t -> inf, read off three widely spaced samples; +-inf when diverging."""
    s = [f(t) / t for t in (1e8, 1e16, 1e32)]
    if abs(s[2]) >= 1.5 * abs(s[1]) >= 1.5**2 * abs(s[0]) > 0:
        return math.copysign(math.inf, s[2])
    if abs(s[2]) <= 0.5 * abs(s[1]) or abs(s[2]) < 1e-12:
        return 0.0
    return s[2]


def quasi_entropy(
    f: Callable[[float], float],
    a: HermitianOp | np.ndarray,
    b: HermitianOp | np.ndarray,
    slope_at_infinity: float | None = None,
) -> EntropyValue:
    """sum_ij mu_j f(lam_i / mu_j) |<e_i|f_j>|^2 with kernel-of-b terms taken in the limit.

    Pairs with mu_j = 0 contribute lam_i * lim_{t->inf} f(t)/t; pass `slope_at_infinity`
    when that limit is known, otherwise it is estimated from samples of f.
    """
    am = a.matrix if isinstance(a, HermitianOp) else np.asarray(a)
    bm = b.matrix if isinstance(b, HermitianOp) else np.asarray(b)
    lam, mu, overlaps = _pairs(am, bm)
    total = 0.0
    kernel_weight = 0.0
    for j, m in enumerate(mu):
        col = overlaps[:, j]
        if m > 0:
            total += sum(m * f(li / m) * o for li, o in zip(lam, col, strict=True) if o > OVERLAP_TOL)
        else:
            kernel_weight += float(np.dot(lam, np.where(col > OVERLAP_TOL, col, 0.0)))
    if kernel_weight > 0:
        slope = _slope_at_infinity(f) if slope_at_infinity is None else slope_at_infinity
        if math.isinf(slope):
            return EntropyValue(infinite=1 if slope > 0 else -1)
        total += kernel_weight * slope
    return EntropyValue(bits=float(total), tol=EIGEN_TOL * max(1.0, abs(total)))


def _support_contained(a: np.ndarray, b: np.ndarray) -> bool:
    outside = np.eye(b.shape[0]) - support_projector(b)
    return spectral_norm(outside @ a @ outside) <= 1e-10 * max(1.0, spectral_norm(a))


def relative_renyi(
    alpha: float, a: HermitianOp | np.ndarray, b: HermitianOp | np.ndarray
) -> EntropyValue:
    """S_alpha(A||B) = 1/(1-alpha) log tr(A^alpha B^(1-alpha)), extended to alpha in {0, 1, inf}."""
    if not alpha >= 0:
        raise ArgumentError(f"Rényi order must be non-negative, got {alpha}")
    am = a.matrix if isinstance(a, HermitianOp) else np.asarray(a)
    bm = b.matrix if isinstance(b, HermitianOp) else np.asarray(b)
    lam, mu, overlaps = _pairs(am, bm)
    contained = _support_contained(am, bm)
    mask = (lam[:, None] > 0) & (mu[None, :] > 0) & (overlaps > OVERLAP_TOL)
    if alpha >= 1 and not contained:
        return EntropyValue.neg_inf()
    if alpha == 1:
        tr_a = float(lam.sum())
        if abs(tr_a - 1) > 1e-9:
            raise ArgumentError("the alpha = 1 limit needs tr(A) = 1")
        li, mj = np.broadcast_arrays(lam[:, None], mu[None, :])
        log_ratio = np.log2(np.where(mask, mj, 1.0)) - np.log2(np.where(mask, li, 1.0))
        terms = np.where(mask, li * overlaps * log_ratio, 0.0)
        return EntropyValue(bits=float(terms.sum()), tol=EIGEN_TOL)
    if math.isinf(alpha):
        ratios = np.where(mask, lam[:, None] / np.where(mask, mu[None, :], 1.0), 0.0)
        return EntropyValue(bits=-math.log2(float(ratios.max())), tol=EIGEN_TOL)
    li, mj = np.broadcast_arrays(lam[:, None], mu[None, :])
    safe_l, safe_m = np.where(mask, li, 1.0), np.where(mask, mj, 1.0)
    q = float(np.where(mask, safe_l**alpha * safe_m ** (1 - alpha) * overlaps, 0.0).sum())
    if q <= 0:
        return EntropyValue.neg_inf() if alpha < 1 else EntropyValue.pos_inf()
    return EntropyValue(bits=math.log2(q) / (1 - alpha), tol=EIGEN_TOL / abs(1 - alpha))


def relative_min(a: HermitianOp | np.ndarray, b: HermitianOp | np.ndarray) -> EntropyValue:
    """sup {lam : A <= 2^-lam B}."""
    am = a.matrix if isinstance(a, HermitianOp) else np.asarray(a)
    bm = b.matrix if isinstance(b, HermitianOp) else np.asarray(b)
    if not _support_contained(am, bm):
        return EntropyValue.neg_inf()
    inv = psd_power(bm, -0.5)
    norm = spectral_norm(inv @ am @ inv)
    if norm <= 0:
        return EntropyValue.pos_inf()
    return EntropyValue(bits=-math.log2(norm), tol=EIGEN_TOL)


def relative_max(a: HermitianOp | np.ndarray, b: HermitianOp | np.ndarray) -> EntropyValue:
    """log ||sqrt(A) sqrt(B)||_1^2."""
    am = a.matrix if isinstance(a, HermitianOp) else np.asarray(a)
    bm = b.matrix if isinstance(b, HermitianOp) else np.asarray(b)
    overlap = trace_norm(psd_power(am, 0.5) @ psd_power(bm, 0.5))
    if overlap <= 0:
        return EntropyValue.neg_inf()
    return EntropyValue(bits=2 * math.log2(overlap), tol=EIGEN_TOL)


def conditional_renyi(alpha: float, rho: MultipartiteState, a: Labels, b: Labels = ()) -> EntropyValue:
    """H_alpha(A|B) = S_alpha(rho_AB || 1_A ⊗ rho_B)."""
    state, d_a, d_b = restrict(rho, a, b)
    rho_b = partial_trace_matrix(state.matrix, [d_a, d_b], [1])
    return relative_renyi(alpha, state.matrix, np.kron(np.eye(d_a), rho_b))


# -- plug-in bounds -----------------------------------------------------------------------------


def h_min_hat(rho: MultipartiteState, a: Labels, b: Labels = ()) -> EntropyValue:
    """-log ||rho_B^-1/2 rho_AB rho_B^-1/2||, a lower bound on H_min(A|B)."""
    state, d_a, d_b = restrict(rho, a, b)
    rho_b = partial_trace_matrix(state.matrix, [d_a, d_b], [1])
    inv = np.kron(np.eye(d_a), psd_power(rho_b, -0.5))
    return EntropyValue(bits=-math.log2(spectral_norm(inv @ state.matrix @ inv)), tol=EIGEN_TOL)


def h_max_hat(rho: MultipartiteState, a: Labels, b: Labels = ()) -> EntropyValue:
    """log ||tr_A Pi^rho_AB||, an upper bound on H_max(A|B)."""
    state, d_a, d_b = restrict(rho, a, b)
    proj_b = partial_trace_matrix(support_projector(state.matrix), [d_a, d_b], [1])
    return EntropyValue(bits=math.log2(spectral_norm(proj_b)), tol=EIGEN_TOL)


# -- classical mixtures -------------------------------------------------------------------------


@dataclass(frozen=True)
class MixtureCheck:
    """Both sides of the block decomposition for a state classical on K."""

    min_lhs: EntropyValue
    min_rhs: EntropyValue
    max_lhs: EntropyValue
    max_rhs: EntropyValue


def mixture_decomposition_check(
    rho: MultipartiteState,
    k: str,
    a: Labels,
    b: Labels = (),
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> MixtureCheck:
    """H_min(A|BK) against -log sum_k p_k 2^-H_min(A|B)_k, and the max-entropy analog."""
    a, b = as_labels(a), as_labels(b)
    if k in a or k in b:
        raise LayoutError(f"register {k} must be distinct from A and B")
    state = partial_trace(rho, [k, *a, *b]).permuted([k, *a, *b])
    blocks = classical_blocks(state, k)
    rest = SystemLayout(state.layout.factors[1:])
    min_sum, max_sum, tol_min, tol_max = 0.0, 0.0, 0.0, 0.0
    for block in blocks:
        p = float(np.trace(block).real)
        if p <= DIST_TOL:
            continue
        tau = MultipartiteState(HermitianOp(block / p), rest)
        lo, hi = h_min(tau, a, b, settings), h_max(tau, a, b, settings)
        min_sum += p * 2.0 ** (-lo.bits)
        max_sum += p * 2.0**hi.bits
        tol_min, tol_max = tol_min + lo.tol, tol_max + hi.tol
    return MixtureCheck(
        min_lhs=h_min(state, a, [*b, k], settings),
        min_rhs=EntropyValue(bits=-math.log2(min_sum), tol=tol_min),
        max_lhs=h_max(state, a, [*b, k], settings),
        max_rhs=EntropyValue(bits=math.log2(max_sum), tol=tol_max),
    )
