"""Hermitian linear algebra and multipartite state bookkeeping."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property
from math import prod

import numpy as np
from scipy import linalg

from sel.errors import (
    ArgumentError,
    ChannelError,
    ClassicalityError,
    DomainError,
    LayoutError,
    RankError,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
PSD_CLIP = 1e-9
TRACE_SLACK = 1e-9
POVM_TOL = 1e-9
CLASSICAL_TOL = 1e-9


def spectral_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def rank_tol(matrix: np.ndarray) -> float:
    """Kernel cutoff 1e-10 * max(1, ||m||) shared by every support decision."""
    return 1e-10 * max(1.0, spectral_norm(matrix))


def hermitize(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    return (m + m.conj().T) / 2


def spectral_apply(matrix: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a vectorized f to the support eigenvalues of a Hermitian matrix."""
    w, v = linalg.eigh(hermitize(matrix))
    supp = np.abs(w) > rank_tol(matrix)
    out = np.zeros_like(w)
    out[supp] = f(w[supp])
    return (v * out) @ v.conj().T


def psd_power(matrix: np.ndarray, p: float) -> np.ndarray:
    """Power of a PSD matrix on its support; negative p gives the generalized inverse power."""
    return spectral_apply(matrix, lambda w: np.clip(w, 0.0, None) ** p)


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    return psd_power(matrix, 0.5)


def support_projector(matrix: np.ndarray) -> np.ndarray:
    return spectral_apply(matrix, np.ones_like)


def trace_norm(matrix: np.ndarray) -> float:
    return float(linalg.svdvals(matrix).sum())


def positive_part(matrix: np.ndarray) -> np.ndarray:
    """{M}_+ for Hermitian M."""
    w, v = linalg.eigh(hermitize(matrix))
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


@dataclass(frozen=True, eq=False)
class HermitianOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise LayoutError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("operator has non-finite entries")
        skew = spectral_norm(m - m.conj().T)
        if skew > HERMITIAN_TOL * max(1.0, spectral_norm(m)):
            raise ArgumentError(f"operator is not Hermitian (skew norm {skew:.3e})")
        m = hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, d: int) -> HermitianOp:
        return cls(np.eye(d))

    @classmethod
    def projector(cls, vec: Sequence[complex] | np.ndarray) -> HermitianOp:
        v = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        return linalg.eigh(self.matrix)

    @property
    def norm(self) -> float:
        w = self.eig[0]
        return float(np.abs(w).max()) if w.size else 0.0

    @property
    def rank_tol(self) -> float:
        return 1e-10 * max(1.0, self.norm)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def rank(self) -> int:
        return int(np.sum(np.abs(self.eig[0]) > self.rank_tol))

    def inner(self, other: HermitianOp) -> float:
        """Hilbert-Schmidt inner product tr(self * other)."""
        return float(np.vdot(self.matrix, other.matrix).real)

    def __add__(self, other: HermitianOp) -> HermitianOp:
        return HermitianOp(self.matrix + other.matrix)

    def __sub__(self, other: HermitianOp) -> HermitianOp:
        return HermitianOp(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> HermitianOp:
        return HermitianOp(self.matrix * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class SystemLayout:
    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels: {labels}")
        for label, dim in factors:
            if dim < 1:
                raise LayoutError(f"subsystem {label} has dimension {dim}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: tuple[str, int]) -> SystemLayout:
        return cls(tuple(factors))

    @classmethod
    def parse(cls, text: str) -> SystemLayout:
        """Parse "A:2,B:3" into a layout."""
        factors = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            label, _, dim = part.partition(":")
            if not dim.strip().isdigit():
                raise LayoutError(f"bad layout factor {part!r}")
            factors.append((label.strip(), int(dim)))
        return cls(tuple(factors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total(self) -> int:
        return prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem {label!r} in layout {self}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def dim_of(self, labels: Sequence[str]) -> int:
        return prod(self.dim(label) for label in labels)

    def subset(self, labels: Sequence[str]) -> SystemLayout:
        idx = sorted(self.index(label) for label in labels)
        return SystemLayout(tuple(self.factors[i] for i in idx))

    def extended(self, label: str, dim: int) -> SystemLayout:
        return SystemLayout((*self.factors, (label, dim)))

    def replace_dim(self, label: str, dim: int) -> SystemLayout:
        i = self.index(label)
        factors = list(self.factors)
        factors[i] = (label, dim)
        return SystemLayout(tuple(factors))

    def fresh_label(self, base: str) -> str:
        if base not in self.labels:
            return base
        k = 1
        while f"{base}{k}" in self.labels:
            k += 1
        return f"{base}{k}"

    def __str__(self) -> str:
        return ",".join(f"{label}:{dim}" for label, dim in self.factors)


def partial_trace_matrix(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    drop = [i for i in range(n) if i not in keep]
    dk = prod(dims[i] for i in keep)
    dd = prod(dims[i] for i in drop)
    t = np.asarray(matrix).reshape(dims + dims)
    perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    return np.einsum("ijkj->ik", t)


def permute_matrix(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor j is old factor order[j]."""
    dims = list(dims)
    n = len(dims)
    t = np.asarray(matrix).reshape(dims + dims)
    t = t.transpose(list(order) + [n + i for i in order])
    d = prod(dims)
    return t.reshape(d, d)


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    op: HermitianOp
    layout: SystemLayout

    def __post_init__(self):
        op = self.op if isinstance(self.op, HermitianOp) else HermitianOp(self.op)
        if op.dim != self.layout.total:
            raise LayoutError(f"matrix dimension {op.dim} does not match layout {self.layout}")
        w, v = op.eig
        if w.min() < -PSD_CLIP:
            raise ArgumentError(f"state is not positive semi-definite (eigenvalue {w.min():.3e})")
        if w.min() < 0:
            op = HermitianOp((v * np.clip(w, 0.0, None)) @ v.conj().T)
        tr = op.trace
        if not 0 < tr <= 1 + TRACE_SLACK:
            raise ArgumentError(f"state trace {tr} outside (0, 1]")
        object.__setattr__(self, "op", op)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, layout: SystemLayout) -> MultipartiteState:
        return cls(HermitianOp(matrix), layout)

    @classmethod
    def from_vector(cls, vec: Sequence[complex] | np.ndarray, layout: SystemLayout) -> MultipartiteState:
        return cls(HermitianOp.projector(vec), layout)

    @classmethod
    def from_diagonal(cls, probs: Sequence[float] | np.ndarray, layout: SystemLayout) -> MultipartiteState:
        return cls(HermitianOp(np.diag(np.asarray(probs, dtype=float))), layout)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def trace(self) -> float:
        return self.op.trace

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    @property
    def is_normalized(self) -> bool:
        return abs(self.trace - 1.0) <= TRACE_SLACK

    @property
    def is_pure(self) -> bool:
        w = self.op.eig[0]
        return w.size == 1 or w[-2] <= self.op.rank_tol

    def marginal(self, keep: Sequence[str]) -> MultipartiteState:
        return partial_trace(self, keep)

    def permuted(self, order: Sequence[str]) -> MultipartiteState:
        """Reorder subsystems; `order` must list every label exactly once."""
        if sorted(order) != sorted(self.labels):
            raise LayoutError(f"permutation {list(order)} does not cover {list(self.labels)}")
        idx = [self.layout.index(label) for label in order]
        m = permute_matrix(self.matrix, self.dims, idx)
        layout = SystemLayout(tuple(self.layout.factors[i] for i in idx))
        return MultipartiteState(HermitianOp(m), layout)

    def scaled(self, factor: float) -> MultipartiteState:
        return MultipartiteState(HermitianOp(self.matrix * factor), self.layout)

    def relabeled(self, mapping: dict[str, str]) -> MultipartiteState:
        factors = tuple((mapping.get(label, label), dim) for label, dim in self.layout.factors)
        return MultipartiteState(self.op, SystemLayout(factors))


def tensor_product(a: HermitianOp, b: HermitianOp) -> HermitianOp:
    return HermitianOp(np.kron(a.matrix, b.matrix))


def tensor_states(a: MultipartiteState, b: MultipartiteState) -> MultipartiteState:
    layout = SystemLayout(a.layout.factors + b.layout.factors)
    return MultipartiteState(tensor_product(a.op, b.op), layout)


def tensor_power(state: MultipartiteState, n: int) -> MultipartiteState:
    """n copies; labels get the copy index appended (A -> A1, A2, ...)."""
    if n < 1:
        raise ArgumentError("tensor power needs n >= 1")
    out = state.relabeled({label: f"{label}1" for label in state.labels})
    for k in range(2, n + 1):
        out = tensor_states(out, state.relabeled({label: f"{label}{k}" for label in state.labels}))
    return out


def partial_trace(m: MultipartiteState, keep: Sequence[str]) -> MultipartiteState:
    keep_idx = [m.layout.index(label) for label in keep]
    reduced = partial_trace_matrix(m.matrix, m.dims, keep_idx)
    return MultipartiteState(HermitianOp(reduced), m.layout.subset(keep))


def lift(op: np.ndarray, on: Sequence[str], layout: SystemLayout) -> np.ndarray:
    """Embed an operator acting on `on` (in the given order) as op ⊗ 1 on the full layout."""
    on_idx = [layout.index(label) for label in on]
    rest = [i for i in range(len(layout.dims)) if i not in on_idx]
    d_rest = prod(layout.dims[i] for i in rest)
    full = np.kron(np.asarray(op, dtype=complex), np.eye(d_rest))
    order = on_idx + rest
    dims = [layout.dims[i] for i in order]
    inverse = [order.index(i) for i in range(len(order))]
    return permute_matrix(full, dims, inverse)


def _phase_fixed(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size == 0:
        return vec
    first = vec[nz[0]]
    return vec * (abs(first) / first)


def canonical_eigensystem(m: HermitianOp) -> tuple[np.ndarray, np.ndarray]:
    """Support eigenpairs, descending, ties broken by the phase-fixed eigenvector."""
    w, v = m.eig
    supp = np.flatnonzero(w > m.rank_tol)
    cols = [_phase_fixed(v[:, i]) for i in supp]

    def key(j: int):
        vec = cols[j]
        return (-round(float(w[supp[j]]), 12), *np.round(vec.real, 12), *np.round(vec.imag, 12))

    order = sorted(range(len(supp)), key=key)
    lam = np.array([w[supp[j]] for j in order])
    vecs = np.column_stack([cols[j] for j in order]) if order else np.zeros((m.dim, 0))
    return lam, vecs


def purification_vector(rho: MultipartiteState) -> np.ndarray:
    """Canonical purification as a (d, rank) amplitude matrix; flatten for the state vector."""
    lam, vecs = canonical_eigensystem(rho.op)
    return vecs * np.sqrt(lam)


def purification(rho: MultipartiteState, label: str = "P") -> MultipartiteState:
    """Canonical purification sum_i sqrt(l_i) |e_i> ⊗ |i> on layout + auxiliary system.

    Sub-normalized inputs yield a sub-normalized pure state with the same trace; the
    missing weight 1 - tr(rho) is the implicit extra dimension of the completed state
    and is accounted for by the generalized fidelity.
    """
    amp = purification_vector(rho)
    aux = rho.layout.fresh_label(label)
    layout = rho.layout.extended(aux, amp.shape[1])
    return MultipartiteState.from_vector(amp.reshape(-1), layout)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", self.coefficients, self.left, self.right).reshape(-1)


def pure_vector(psi: MultipartiteState) -> np.ndarray:
    if not psi.is_pure:
        raise RankError("state is not pure")
    w, v = psi.op.eig
    return _phase_fixed(v[:, -1]) * np.sqrt(max(w[-1], 0.0))


def schmidt_decompose(psi: MultipartiteState, cut: Sequence[str]) -> SchmidtDecomposition:
    vec = pure_vector(psi)
    left = [psi.layout.index(label) for label in cut]
    right = [i for i in range(len(psi.dims)) if i not in left]
    dims = list(psi.dims)
    t = vec.reshape(dims).transpose(left + right)
    dl = prod(dims[i] for i in left)
    u, s, vh = linalg.svd(t.reshape(dl, -1), full_matrices=False)
    k = max(1, int(np.sum(s**2 > psi.op.rank_tol)))
    return SchmidtDecomposition(s[:k], u[:, :k], vh[:k].T)


def operator_function(m: HermitianOp, f: Callable[[float], float]) -> HermitianOp:
    w, v = m.eig
    supp = np.abs(w) > m.rank_tol
    out = np.zeros_like(w)
    try:
        with np.errstate(all="raise"):
            vals = np.array([f(float(x)) for x in w[supp]], dtype=float)
    except (ValueError, ZeroDivisionError, FloatingPointError, OverflowError) as e:
        raise DomainError(f"function undefined on the support spectrum: {e}") from e
    if not np.all(np.isfinite(vals)):
        raise DomainError("function is not finite on the support spectrum")
    out[supp] = vals
    return HermitianOp((v * out) @ v.conj().T)


def kraus_sum(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """E†[1] = sum E†E."""
    return sum(np.asarray(k).conj().T @ np.asarray(k) for k in kraus)


def apply_channel(
    rho: MultipartiteState, kraus: Sequence[np.ndarray], on: str, out_dim: int
) -> MultipartiteState:
    idx = rho.layout.index(on)
    d_in = rho.dims[idx]
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    for k in ks:
        if k.shape != (out_dim, d_in):
            raise LayoutError(f"Kraus operator shape {k.shape}, expected {(out_dim, d_in)}")
    excess = float(linalg.eigvalsh(hermitize(kraus_sum(ks))).max()) - 1.0
    if excess > POVM_TOL:
        raise ChannelError(f"Kraus operators exceed the identity by {excess:.3e}")
    left = prod(rho.dims[:idx])
    right = prod(rho.dims[idx + 1 :])
    out = np.zeros((left * out_dim * right,) * 2, dtype=complex)
    for k in ks:
        full = np.kron(np.kron(np.eye(left), k), np.eye(right))
        out += full @ rho.matrix @ full.conj().T
    return MultipartiteState(HermitianOp(out), rho.layout.replace_dim(on, out_dim))


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[HermitianOp, ...]
    labels: tuple[str, ...] = ()
    system: str = "A"

    def __post_init__(self):
        elements = tuple(e if isinstance(e, HermitianOp) else HermitianOp(e) for e in self.elements)
        if not elements:
            raise ArgumentError("measurement needs at least one element")
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(elements)))
        if len(labels) != len(elements):
            raise ArgumentError("one label per measurement element")
        d = elements[0].dim
        if any(e.dim != d for e in elements):
            raise LayoutError("measurement elements have mismatched dimensions")
        for label, e in zip(labels, elements, strict=True):
            if e.eig[0].min() < -POVM_TOL:
                raise ArgumentError(f"element {label} is not positive semi-definite")
        total = sum(e.matrix for e in elements)
        if np.abs(total - np.eye(d)).max() > POVM_TOL:
            raise ArgumentError("measurement elements do not sum to the identity")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def sqrt_elements(self) -> list[np.ndarray]:
        return [psd_sqrt(e.matrix) for e in self.elements]

    @classmethod
    def from_matrices(
        cls, mats: Sequence[np.ndarray], labels: Sequence[str] = (), system: str = "A"
    ) -> Povm:
        return cls(tuple(HermitianOp(m) for m in mats), tuple(labels), system)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement(Povm):
    def __post_init__(self):
        super().__post_init__()
        mats = [e.matrix for e in self.elements]
        for i, p in enumerate(mats):
            if np.abs(p @ p - p).max() > POVM_TOL:
                raise ArgumentError(f"element {self.labels[i]} is not a projector")
            for q in mats[i + 1 :]:
                if np.abs(p @ q).max() > POVM_TOL:
                    raise ArgumentError("projectors are not mutually orthogonal")

    @classmethod
    def from_basis(
        cls, basis: np.ndarray, labels: Sequence[str] = (), system: str = "A"
    ) -> ProjectiveMeasurement:
        """Rank-one projectors onto the columns of a unitary."""
        b = np.asarray(basis, dtype=complex)
        return cls(tuple(HermitianOp.projector(b[:, i]) for i in range(b.shape[1])), tuple(labels), system)


def computational_basis(d: int, system: str = "A") -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(np.eye(d), system=system)


def hadamard_basis(system: str = "A") -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(np.array([[1, 1], [1, -1]]) / np.sqrt(2), ("+", "-"), system)


def fourier_basis(d: int, system: str = "A") -> ProjectiveMeasurement:
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return ProjectiveMeasurement.from_basis(np.exp(2j * np.pi * j * k / d) / np.sqrt(d), system=system)


def trivial_measurement(d: int, system: str = "A") -> ProjectiveMeasurement:
    return ProjectiveMeasurement((HermitianOp.identity(d),), ("1",), system)


def maximally_entangled(d: int, labels: tuple[str, str] = ("A", "A'")) -> MultipartiteState:
    vec = np.eye(d).reshape(-1) / np.sqrt(d)
    return MultipartiteState.from_vector(vec, SystemLayout.of((labels[0], d), (labels[1], d)))


def maximally_mixed(d: int, label: str = "A") -> MultipartiteState:
    return MultipartiteState(HermitianOp(np.eye(d) / d), SystemLayout.of((label, d)))


def _ginibre(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_state(layout: SystemLayout, rank: int, seed: int) -> MultipartiteState:
    """Trace out a random pure state on layout ⊗ C^rank; deterministic per seed."""
    if rank < 1 or rank > layout.total:
        raise ArgumentError(f"rank {rank} outside [1, {layout.total}]")
    rng = np.random.default_rng(seed)
    psi = _ginibre(rng, (layout.total * rank,))
    psi /= np.linalg.norm(psi)
    amp = psi.reshape(layout.total, rank)
    return MultipartiteState(HermitianOp(amp @ amp.conj().T), layout)


def random_pure_state(layout: SystemLayout, seed: int) -> MultipartiteState:
    return random_state(layout, 1, seed)


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    if d_out < d_in:
        raise ArgumentError("isometry needs d_out >= d_in")
    q, r = linalg.qr(_ginibre(rng, (d_out, d_in)), mode="economic")
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm(d: int, outcomes: int, seed: int, system: str = "A") -> Povm:
    """Measurement M_x = V_x† V_x from the blocks of a random isometry C^d -> C^(d*outcomes)."""
    if outcomes < 1:
        raise ArgumentError("a measurement needs at least one outcome")
    v = random_isometry(d, d * outcomes, np.random.default_rng(seed))
    blocks = [v[x * d : (x + 1) * d] for x in range(outcomes)]
    return Povm.from_matrices([b.conj().T @ b for b in blocks], system=system)


def random_channel(d_in: int, d_out: int, n_kraus: int, seed: int) -> list[np.ndarray]:
    """Kraus operators of a random trace-preserving channel."""
    v = random_isometry(d_in, d_out * n_kraus, np.random.default_rng(seed))
    return [v[j * d_out : (j + 1) * d_out] for j in range(n_kraus)]


def classical_blocks(state: MultipartiteState, label: str) -> list[np.ndarray]:
    """Diagonal blocks <x|rho|x> on the remaining systems of a state classical on `label`."""
    if not is_classical_on(state, label):
        raise ClassicalityError(f"register {label} is not classical")
    ordered = state.permuted([label, *(x for x in state.labels if x != label)])
    dx = state.layout.dim(label)
    rest = state.layout.total // dx
    t = ordered.matrix.reshape(dx, rest, dx, rest)
    return [t[x, :, x, :] for x in range(dx)]


def is_classical_on(state: MultipartiteState, label: str) -> bool:
    ordered = state.permuted([label, *(x for x in state.labels if x != label)])
    dx = state.layout.dim(label)
    rest = state.layout.total // dx
    t = ordered.matrix.reshape(dx, rest, dx, rest).copy()
    for x in range(dx):
        t[x, :, x, :] = 0
    return float(np.linalg.norm(t)) <= CLASSICAL_TOL * max(float(np.linalg.norm(state.matrix)), 1e-300)


def classical_quantum(
    blocks: Sequence[np.ndarray], label: str, rest: SystemLayout
) -> MultipartiteState:
    """Assemble sum_x |x><x| ⊗ blocks[x] with the register first."""
    dx = len(blocks)
    d = rest.total
    m = np.zeros((dx * d, dx * d), dtype=complex)
    for x, b in enumerate(blocks):
        m[x * d : (x + 1) * d, x * d : (x + 1) * d] = b
    return MultipartiteState(HermitianOp(m), SystemLayout(((label, dx), *rest.factors)))
