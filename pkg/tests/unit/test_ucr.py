"""Overlaps, post-measurement states and uncertainty-relation residuals."""

import math

import numpy as np
import pytest

from sel.bounds.ucr import (
    MeasurementSetup,
    UcrVariant,
    basis_state,
    bipartite_ucr_residual,
    complement,
    effective_overlap,
    iid_basis_family,
    k_effective_overlap,
    k_overlap,
    measure,
    overlap,
    tensor_measurement,
    ucr_residual,
)
from sel.errors import ArgumentError, CommutationError, LayoutError
from sel.operators import (
    MultipartiteState,
    ProjectiveMeasurement,
    SystemLayout,
    computational_basis,
    hadamard_basis,
    maximally_mixed,
    random_povm,
    random_pure_state,
    random_state,
    tensor_states,
)
from sel.statefile import load_ucr

SLACK = 5e-6


@pytest.fixture
def bb84_setup(fixtures_dir):
    return load_ucr(fixtures_dir / "bb84_ucr.json")


def _qutrit_setup(eta: float) -> MeasurementSetup:
    perp = np.array([0, 0, 1.0])
    plus = np.array([1.0, 1.0, 0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0, 0]) / math.sqrt(2)
    x = ProjectiveMeasurement.from_basis(np.eye(3))
    y = ProjectiveMeasurement.from_basis(np.column_stack([plus, minus, perp]))
    rho = MultipartiteState.from_diagonal([(1 - eta) / 2, (1 - eta) / 2, eta], SystemLayout.of(("A", 3)))
    k = ProjectiveMeasurement.from_matrices([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    return MeasurementSetup(rho, x, y, k)


def test_bb84_overlap_is_one_half():
    assert overlap(computational_basis(2), hadamard_basis()) == pytest.approx(0.5, abs=1e-12)
    assert overlap(computational_basis(2), computational_basis(2)) == pytest.approx(1.0)


def test_k_overlap_is_unsquared():
    k = ProjectiveMeasurement.from_matrices([np.eye(2)])
    assert k_overlap(computational_basis(2), hadamard_basis(), k) == pytest.approx(math.sqrt(0.5))


@pytest.mark.parametrize("eta", [0.0, 0.1, 0.5])
def test_qutrit_effective_overlap(eta):
    setup = _qutrit_setup(eta)
    expected = (1 - eta) / 2 + eta
    assert k_effective_overlap(setup, form="plain") == pytest.approx(expected, abs=1e-12)
    assert k_effective_overlap(setup, form="projected") == pytest.approx(expected, abs=1e-12)


def test_effective_overlap_picks_best_candidate():
    setup = _qutrit_setup(0.1)
    value, chosen = effective_overlap(MeasurementSetup(setup.rho_a, setup.x, setup.y), [setup.k])
    assert value == pytest.approx(0.55)
    assert len(chosen) == 2


def test_effective_overlap_unknown_form():
    with pytest.raises(ArgumentError):
        k_effective_overlap(_qutrit_setup(0.1), form="other")


def test_non_commuting_k_rejected():
    rho = maximally_mixed(2)
    with pytest.raises(CommutationError):
        MeasurementSetup(rho, hadamard_basis(), hadamard_basis(), computational_basis(2))


def test_dimension_mismatch_rejected():
    with pytest.raises(LayoutError):
        MeasurementSetup(maximally_mixed(3), computational_basis(2), hadamard_basis())


def test_tensor_measurement():
    m = tensor_measurement(computational_basis(2), hadamard_basis())
    assert isinstance(m, ProjectiveMeasurement)
    assert len(m) == 4
    assert m.labels[1] == "0,-"


def test_complement():
    assert complement(4) == [3, 2, 1, 0]
    with pytest.raises(ArgumentError):
        complement(3)


def test_measure_produces_classical_register(bell):
    state = measure(bell, computational_basis(2), "A", ["B"])
    assert state.labels == ("X", "B")
    assert state.trace == pytest.approx(1.0)


def test_bb84_fixture_residual(bb84_setup):
    ineq = ucr_residual(
        bb84_setup.state, bb84_setup.x, bb84_setup.y, bb84_setup.a, bb84_setup.b, bb84_setup.c
    )
    assert float(ineq.rhs) == pytest.approx(1.0, abs=1e-12)
    assert float(ineq.lhs) == pytest.approx(-math.log2(0.75) + 1.0, abs=1e-5)
    assert ineq.slack == pytest.approx(0.415, abs=1e-3)


@pytest.mark.parametrize("seed", range(4))
def test_overlap_relation_on_random_states(seed):
    rho = random_pure_state(SystemLayout.of(("A", 2), ("B", 2), ("C", 2)), seed)
    x, y = random_povm(2, 3, seed + 50), random_povm(2, 2, seed + 60)
    ineq = ucr_residual(rho, x, y)
    assert ineq.holds(SLACK), ineq.slack


def test_effective_variant_needs_eps_bar(bb84_setup):
    with pytest.raises(ArgumentError):
        ucr_residual(bb84_setup.state, bb84_setup.x, bb84_setup.y, variant=UcrVariant.EFFECTIVE)


def test_effective_and_von_neumann_variants_hold(bb84_setup):
    s = bb84_setup
    eff = ucr_residual(s.state, s.x, s.y, eps=0.05, variant="effective", eps_bar=0.1)
    assert eff.holds(SLACK)
    vn = ucr_residual(s.state, s.x, s.y, variant="von_neumann")
    assert vn.holds(SLACK)


def test_basis_choice_relation_is_tight_for_entangled_b(bell):
    c = MultipartiteState.from_diagonal([1.0, 0.0], SystemLayout.of(("C", 2)))
    rho = tensor_states(bell, c)
    family = iid_basis_family(computational_basis(2), hadamard_basis(), 1)
    ineq = ucr_residual(rho, family[0], family[1], variant="basis")
    assert float(ineq.rhs) == pytest.approx(1.0)
    assert ineq.slack == pytest.approx(0.0, abs=1e-5)


def test_basis_state_layout(bell):
    family = iid_basis_family(computational_basis(2), hadamard_basis(), 1)
    state = basis_state(bell, family, "A", ["B"])
    assert state.labels[:2] == ("Theta", "Z")
    with pytest.raises(ArgumentError):
        basis_state(bell, family, "A", ["B"], weights=[0.9, 0.2])


def test_bipartite_von_neumann_form():
    rho = random_state(SystemLayout.of(("A", 2), ("B", 2)), 2, seed=31)
    ineq = bipartite_ucr_residual(
        rho, computational_basis(2), hadamard_basis(), von_neumann=True
    )
    assert ineq.holds(SLACK)


def test_bipartite_smooth_form_checks_composite():
    rho = random_state(SystemLayout.of(("A", 2), ("B", 2)), 2, seed=32)
    with pytest.raises(ArgumentError):
        bipartite_ucr_residual(rho, computational_basis(2), hadamard_basis(), eps=0.1, eps_bar=0.1)
