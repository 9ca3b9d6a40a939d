"""Dense primal-dual interior-point solver for Hermitian semi-definite programs.

Problems are triples {A, B, Ψ}:

    primal:  minimize  <A, X>  subject to  Ψ[X] >= B,  X >= 0
    dual:    maximize  <B, Y>  subject to  Ψ†[Y] <= A,  Y >= 0

Ψ is given by its Choi matrix J on dual ⊗ primal, J = sum_ij Ψ(|i><j|) ⊗ |i><j|, so that
Ψ[X] = tr_primal(J (1 ⊗ Xᵀ)). Internally the problem is rewritten with a slack S = Ψ[X] - B,
embedded into real symmetric matrices and solved with Nesterov-Todd scaled Mehrotra
predictor-corrector steps from an infeasible start.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy import linalg

from sel.errors import LayoutError, SolverError
from sel.operators import HermitianOp

logger = logging.getLogger(__name__)

SCHUR_REGULARIZATION = 1e-12
STEP_FRACTION = 0.98
WEAK_DUALITY_SLACK = 1e-9


class SdpStatus(StrEnum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True, eq=False)
class SdpProblem:
    objective: HermitianOp
    offset: HermitianOp
    choi: HermitianOp
    name: str = ""

    def __post_init__(self):
        n, m = self.objective.dim, self.offset.dim
        if self.choi.dim != n * m:
            raise LayoutError(
                f"Choi matrix has dimension {self.choi.dim}, expected {m}*{n} = {n * m}"
            )

    @property
    def primal_dim(self) -> int:
        return self.objective.dim

    @property
    def dual_dim(self) -> int:
        return self.offset.dim

    def swapped(self) -> SdpProblem:
        """The dual program written as a primal: {-B, -A, -Ψ†}."""
        m, n = self.dual_dim, self.primal_dim
        j4 = self.choi.matrix.reshape(m, n, m, n).transpose(3, 2, 1, 0)
        return SdpProblem(
            HermitianOp(-self.offset.matrix),
            HermitianOp(-self.objective.matrix),
            HermitianOp(-j4.reshape(n * m, n * m)),
            name=f"{self.name} (swapped)" if self.name else "",
        )


@dataclass(frozen=True, eq=False)
class SdpSolution:
    x: HermitianOp
    y: HermitianOp
    primal_value: float
    dual_value: float
    status: SdpStatus
    iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    max_weak_duality_violation: float = 0.0
    history: list[dict] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.primal_value - self.dual_value

    @property
    def relative_gap(self) -> float:
        return abs(self.gap) / (1.0 + abs(self.primal_value))

    @property
    def ok(self) -> bool:
        return self.status is SdpStatus.OPTIMAL


def _apply(choi: np.ndarray, x: np.ndarray, m: int, n: int) -> np.ndarray:
    return np.einsum("aibj,ij->ab", choi.reshape(m, n, m, n), x)


def _apply_adjoint(choi: np.ndarray, y: np.ndarray, m: int, n: int) -> np.ndarray:
    return np.einsum("aibj,ba->ji", choi.reshape(m, n, m, n), y)


def apply_choi(choi: HermitianOp, x: HermitianOp) -> HermitianOp:
    """Ψ[X] = tr_primal(J (1 ⊗ Xᵀ)) for the map with Choi matrix J on dual ⊗ primal."""
    n = x.dim
    if choi.dim % n:
        raise LayoutError(f"Choi dimension {choi.dim} is not a multiple of {n}")
    return HermitianOp(_apply(choi.matrix, x.matrix, choi.dim // n, n))


def apply_choi_adjoint(choi: HermitianOp, y: HermitianOp) -> HermitianOp:
    m = y.dim
    if choi.dim % m:
        raise LayoutError(f"Choi dimension {choi.dim} is not a multiple of {m}")
    return HermitianOp(_apply_adjoint(choi.matrix, y.matrix, m, choi.dim // m))


def choi_from_map(fn: Callable[[np.ndarray], np.ndarray], n_primal: int, n_dual: int) -> HermitianOp:
    """Choi matrix of a linear map given as a function on n_primal x n_primal matrices."""
    j = np.zeros((n_dual, n_primal, n_dual, n_primal), dtype=complex)
    unit = np.zeros((n_primal, n_primal), dtype=complex)
    for i in range(n_primal):
        for k in range(n_primal):
            unit[i, k] = 1.0
            j[:, i, :, k] = fn(unit)
            unit[i, k] = 0.0
    return HermitianOp(j.reshape(n_dual * n_primal, n_dual * n_primal))


def identity_choi(n: int) -> HermitianOp:
    v = np.eye(n).reshape(-1)
    return HermitianOp(np.outer(v, v))


def partial_trace_choi(d_a: int, d_b: int) -> HermitianOp:
    """Choi matrix of X_AB -> tr_B(X_AB)."""
    return choi_from_map(lambda x: np.einsum("ajbj->ab", x.reshape(d_a, d_b, d_a, d_b)), d_a * d_b, d_a)


def hermitian_basis(m: int) -> np.ndarray:
    """Orthonormal basis of m x m Hermitian matrices under tr(E_i E_j)."""
    basis = np.zeros((m * m, m, m), dtype=complex)
    k = 0
    for i in range(m):
        basis[k, i, i] = 1.0
        k += 1
    s = 1 / np.sqrt(2)
    for i in range(m):
        for j in range(i + 1, m):
            basis[k, i, j] = basis[k, j, i] = s
            basis[k + 1, i, j] = 1j * s
            basis[k + 1, j, i] = -1j * s
            k += 2
    return basis


def embed(h: np.ndarray) -> np.ndarray:
    """Hermitian n x n (batched) -> real symmetric 2n x 2n [[Re, -Im], [Im, Re]]."""
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def deembed(x: np.ndarray) -> np.ndarray:
    n = x.shape[0] // 2
    x11, x12, x21, x22 = x[:n, :n], x[:n, n:], x[n:, :n], x[n:, n:]
    return (x11 + x22) / 2 + 1j * (x21 - x12) / 2


class _RealProblem:
    """Standard form  min <C,X> s.t. <A_i,X> = b_i, X >= 0  over the blocks (X, S)."""

    def __init__(self, p: SdpProblem):
        m = p.dual_dim
        self.basis = hermitian_basis(m)
        psi_adj = np.einsum(
            "aibj,kba->kji", p.choi.matrix.reshape(m, p.primal_dim, m, p.primal_dim), self.basis
        )
        self.f = [0.5 * embed(psi_adj), -0.5 * embed(self.basis)]
        self.c = [0.5 * embed(p.objective.matrix), np.zeros((2 * m, 2 * m))]
        self.b = np.einsum("kab,ba->k", self.basis, p.offset.matrix).real
        self.k = self.b.size
        self.flat = [f.reshape(self.k, -1) for f in self.f]

    def op(self, xs: list[np.ndarray]) -> np.ndarray:
        return sum(fl @ x.reshape(-1) for fl, x in zip(self.flat, xs, strict=True))

    def adj(self, y: np.ndarray) -> list[np.ndarray]:
        return [np.tensordot(y, f, axes=1) for f in self.f]


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2


def _inner(a: list[np.ndarray], b: list[np.ndarray]) -> float:
    return float(sum(np.vdot(x, y).real for x, y in zip(a, b, strict=True)))


def _norm(a: list[np.ndarray]) -> float:
    return float(np.sqrt(sum(np.sum(x * x) for x in a)))


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    lower = linalg.cholesky(x, lower=True)
    li = linalg.solve_triangular(lower, np.eye(x.shape[0]), lower=True)
    w = linalg.eigvalsh(_sym(li @ dx @ li.T))
    return np.inf if w[0] >= 0 else -1.0 / w[0]


class _Scaling:
    def __init__(self, x: np.ndarray, z: np.ndarray):
        lx = linalg.cholesky(x, lower=True)
        lz = linalg.cholesky(z, lower=True)
        u, s, vt = linalg.svd(lz.T @ lx)
        self.lam = s
        self.g = (lx @ vt.T) / np.sqrt(s)
        self.ginv = np.sqrt(s)[:, None] * (vt @ linalg.solve_triangular(lx, np.eye(x.shape[0]), lower=True))
        self.w = self.g @ self.g.T
        self.inv_lyap = 2.0 / (s[:, None] + s[None, :])

    def unscale(self, rc: np.ndarray) -> np.ndarray:
        return self.g @ (rc * self.inv_lyap) @ self.g.T


def _solve_real(
    rp_: _RealProblem, mu0: float, gap_tol: float, feas_tol: float, max_iter: int
) -> tuple[list[np.ndarray], np.ndarray, SdpStatus, int, float, float, float, list[dict]]:
    sizes = [c.shape[0] for c in rp_.c]
    xs = [mu0 * np.eye(s) for s in sizes]
    zs = [mu0 * np.eye(s) for s in sizes]
    y = np.zeros(rp_.k)
    big_n = sum(sizes)
    norm_b = float(np.linalg.norm(rp_.b))
    norm_c = _norm(rp_.c)
    status = SdpStatus.MAX_ITERATIONS
    worst_violation = 0.0
    history: list[dict] = []
    pinf = dinf = np.inf
    it = 0
    for it in range(max_iter + 1):
        rp = rp_.b - rp_.op(xs)
        aty = rp_.adj(y)
        rd = [c - z - a for c, z, a in zip(rp_.c, zs, aty, strict=True)]
        pobj = _inner(rp_.c, xs)
        dobj = float(rp_.b @ y)
        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = _norm(rd) / (1.0 + norm_c)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj))
        mu = _inner(xs, zs) / big_n
        history.append(
            {"iter": it, "pobj": pobj, "dobj": dobj, "pinf": pinf, "dinf": dinf, "mu": mu}
        )
        logger.debug(
            f"sdp it={it} pobj={pobj:.10e} dobj={dobj:.10e} gap={rel_gap:.2e} "
            f"pinf={pinf:.2e} dinf={dinf:.2e} mu={mu:.2e}"
        )
        if pinf <= feas_tol and dinf <= feas_tol:
            violation = dobj - pobj
            worst_violation = max(worst_violation, violation)
            if violation > WEAK_DUALITY_SLACK:
                logger.warning(f"sdp iterate {it} violates weak duality by {violation:.3e}")
        if rel_gap <= gap_tol and pinf <= feas_tol and dinf <= feas_tol:
            status = SdpStatus.OPTIMAL
            break
        if dobj > 0 and _norm([z + a for z, a in zip(zs, aty, strict=True)]) / dobj <= feas_tol:
            status = SdpStatus.PRIMAL_INFEASIBLE
            break
        if pobj < 0 and float(np.linalg.norm(rp_.op(xs))) / -pobj <= feas_tol:
            status = SdpStatus.DUAL_INFEASIBLE
            break
        if it == max_iter:
            break

        try:
            scalings = [_Scaling(x, z) for x, z in zip(xs, zs, strict=True)]
        except linalg.LinAlgError:
            logger.warning(f"sdp iterate {it} lost positive definiteness; stopping")
            break
        wf = [sc.w @ f @ sc.w for sc, f in zip(scalings, rp_.f, strict=True)]
        schur = sum(fl @ g.reshape(rp_.k, -1).T for fl, g in zip(rp_.flat, wf, strict=True))
        schur = _sym(schur) + SCHUR_REGULARIZATION * np.eye(rp_.k)
        try:
            factor = linalg.cho_factor(schur)

            def solve(rhs: np.ndarray, factor=factor) -> np.ndarray:
                return linalg.cho_solve(factor, rhs)

        except linalg.LinAlgError:
            logger.debug("sdp Schur complement not positive definite, using least squares")

            def solve(rhs: np.ndarray) -> np.ndarray:
                return linalg.lstsq(schur, rhs)[0]

        wrdw = [sc.w @ r @ sc.w for sc, r in zip(scalings, rd, strict=True)]

        def direction(rcs: list[np.ndarray]):
            rm = [sc.unscale(rc) for sc, rc in zip(scalings, rcs, strict=True)]
            rhs = rp - rp_.op([a - b for a, b in zip(rm, wrdw, strict=True)])
            dy = solve(rhs)
            atdy = rp_.adj(dy)
            dz = [_sym(r - a) for r, a in zip(rd, atdy, strict=True)]
            dx = [_sym(r - sc.w @ d @ sc.w) for r, sc, d in zip(rm, scalings, dz, strict=True)]
            return dx, dy, dz

        def steps(dx, dz) -> tuple[float, float]:
            ap = min(_max_step(x, d) for x, d in zip(xs, dx, strict=True))
            ad = min(_max_step(z, d) for z, d in zip(zs, dz, strict=True))
            return min(1.0, STEP_FRACTION * ap), min(1.0, STEP_FRACTION * ad)

        try:
            dx, dy, dz = direction([-np.diag(sc.lam**2) for sc in scalings])
            ap, ad = steps(dx, dz)
            mu_aff = (
                _inner(
                    [x + ap * d for x, d in zip(xs, dx, strict=True)],
                    [z + ad * d for z, d in zip(zs, dz, strict=True)],
                )
                / big_n
            )
            sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0))
            rcs = []
            for sc, ddx, ddz in zip(scalings, dx, dz, strict=True):
                sx = sc.ginv @ ddx @ sc.ginv.T
                sz = sc.g.T @ ddz @ sc.g
                rcs.append(sigma * mu * np.eye(sc.lam.size) - np.diag(sc.lam**2) - _sym(sx @ sz))
            dx, dy, dz = direction(rcs)
            ap, ad = steps(dx, dz)
        except linalg.LinAlgError:
            logger.warning(f"sdp step computation failed at iterate {it}; stopping")
            break
        xs = [x + ap * d for x, d in zip(xs, dx, strict=True)]
        zs = [z + ad * d for z, d in zip(zs, dz, strict=True)]
        y = y + ad * dy
    return xs, y, status, it, pinf, dinf, worst_violation, history


def solve(
    p: SdpProblem,
    gap_tol: float = 1e-8,
    feas_tol: float = 1e-8,
    max_iter: int = 200,
    orientation: str = "auto",
) -> SdpSolution:
    """Solve an SDP, certifying the primal/dual pair.

    With orientation="auto" the program with fewer equality constraints is handed to the
    interior-point loop (the original or its swapped dual); the returned solution is
    always expressed in terms of the original problem.
    """
    swap = orientation == "dual" or (
        orientation == "auto" and p.primal_dim**2 < p.dual_dim**2
    )
    work = p.swapped() if swap else p
    real = _RealProblem(work)
    xs, y, status, iterations, pinf, dinf, violation, history = _solve_real(
        real, 1.0 + work.offset.norm + work.objective.norm, gap_tol, feas_tol, max_iter
    )
    x_c = deembed(xs[0])
    y_c = np.tensordot(y, real.basis, axes=1)
    x_op, y_op = HermitianOp((x_c + x_c.conj().T) / 2), HermitianOp((y_c + y_c.conj().T) / 2)
    alpha = work.objective.inner(x_op)
    beta = work.offset.inner(y_op)
    if swap:
        x_op, y_op = y_op, x_op
        alpha, beta = -beta, -alpha
        status = {
            SdpStatus.PRIMAL_INFEASIBLE: SdpStatus.DUAL_INFEASIBLE,
            SdpStatus.DUAL_INFEASIBLE: SdpStatus.PRIMAL_INFEASIBLE,
        }.get(status, status)
        pinf, dinf = dinf, pinf
    if status is not SdpStatus.OPTIMAL:
        logger.warning(f"sdp {p.name or 'problem'} ended with status {status} after {iterations} iterations")
    else:
        logger.debug(f"sdp {p.name or 'problem'} optimal in {iterations} iterations: {alpha:.12g}")
    return SdpSolution(
        x=x_op,
        y=y_op,
        primal_value=alpha,
        dual_value=beta,
        status=status,
        iterations=iterations,
        primal_residual=pinf,
        dual_residual=dinf,
        max_weak_duality_violation=violation,
        history=history,
    )


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances handed to every SDP solve made on behalf of an entropy computation."""

    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int = 200

    def solve(self, p: SdpProblem) -> SdpSolution:
        return require_optimal(solve(p, self.gap_tol, self.feas_tol, self.max_iter))


DEFAULT_SETTINGS = SolverSettings()


def require_optimal(sol: SdpSolution) -> SdpSolution:
    if not sol.ok:
        raise SolverError(
            f"SDP ended with status {sol.status} after {sol.iterations} iterations", sol
        )
    return sol
