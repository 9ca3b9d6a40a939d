"""Interior-point SDP solver and Choi-matrix plumbing."""

import numpy as np
import pytest

from sel.entropy import min_entropy_problem
from sel.errors import LayoutError, SolverError
from sel.operators import HermitianOp, SystemLayout, random_state
from sel.sdp import (
    SdpProblem,
    SdpStatus,
    SolverSettings,
    apply_choi,
    apply_choi_adjoint,
    choi_from_map,
    identity_choi,
    partial_trace_choi,
    solve,
)


def _eigen_problem() -> SdpProblem:
    # min x s.t. x 1 >= B: the optimum is the largest eigenvalue of B
    return SdpProblem(
        HermitianOp(np.eye(1)),
        HermitianOp(np.array([[0.5, 0.3], [0.3, 0.5]])),
        HermitianOp(np.eye(2)),
        name="largest eigenvalue",
    )


def test_solve_largest_eigenvalue():
    sol = solve(_eigen_problem())
    assert sol.status is SdpStatus.OPTIMAL
    assert sol.primal_value == pytest.approx(0.8, abs=1e-7)
    assert abs(sol.gap) <= 1e-7


def test_weak_duality_never_violated():
    rho = random_state(SystemLayout.of(("A", 2), ("B", 2)), 3, seed=2)
    sol = solve(min_entropy_problem(rho.matrix, 2, 2))
    assert sol.ok
    assert sol.max_weak_duality_violation <= 1e-9
    assert sol.history


def test_orientations_agree():
    rho = random_state(SystemLayout.of(("A", 2), ("B", 3)), 2, seed=4)
    p = min_entropy_problem(rho.matrix, 2, 3)
    primal = solve(p, orientation="primal")
    dual = solve(p, orientation="dual")
    assert primal.primal_value == pytest.approx(dual.primal_value, abs=1e-6)


def test_swapped_twice_is_original():
    p = _eigen_problem()
    back = p.swapped().swapped()
    assert np.allclose(back.choi.matrix, p.choi.matrix)
    assert np.allclose(back.offset.matrix, p.offset.matrix)


def test_choi_dimension_checked():
    with pytest.raises(LayoutError):
        SdpProblem(HermitianOp(np.eye(2)), HermitianOp(np.eye(2)), HermitianOp(np.eye(3)))


def test_identity_choi_applies_identity():
    x = HermitianOp(np.array([[0.2, 0.1j], [-0.1j, 0.8]]))
    assert np.allclose(apply_choi(identity_choi(2), x).matrix, x.matrix)


def test_partial_trace_choi_and_adjoint():
    x = random_state(SystemLayout.of(("A", 2), ("B", 2)), 4, seed=9).op
    choi = partial_trace_choi(2, 2)
    reduced = apply_choi(choi, x).matrix
    assert np.allclose(reduced, np.einsum("ajbj->ab", x.matrix.reshape(2, 2, 2, 2)))
    y = HermitianOp(np.array([[1.0, 0.5], [0.5, 2.0]]))
    # adjoint of tr_B is Y ⊗ 1
    assert np.allclose(apply_choi_adjoint(choi, y).matrix, np.kron(y.matrix, np.eye(2)))


def test_choi_from_map_matches_function():
    choi = choi_from_map(lambda x: np.kron(np.eye(2), x), 2, 4)
    x = HermitianOp(np.array([[0.3, 0.2], [0.2, 0.7]]))
    assert np.allclose(apply_choi(choi, x).matrix, np.kron(np.eye(2), x.matrix))


def test_require_optimal_raises_on_iteration_cap():
    rho = random_state(SystemLayout.of(("A", 2), ("B", 2)), 4, seed=3)
    with pytest.raises(SolverError) as exc:
        SolverSettings(max_iter=1).solve(min_entropy_problem(rho.matrix, 2, 2))
    assert exc.value.solution is not None
