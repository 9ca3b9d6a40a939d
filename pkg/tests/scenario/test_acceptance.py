"""Acceptance suites: property checks over random instances and pinned reference values.

Instance counts are reduced unless SEL_FULL_ACCEPTANCE=1.
"""

import math

import numpy as np
import pytest

from sel.apps.compression import compress_simulate
from sel.apps.extraction import extract_simulate
from sel.apps.figures import bernoulli_references, bernoulli_string_probabilities
from sel.apps.qkd import log_grid, qkd_rate_curve
from sel.bounds.aep import AepParams, aep_converse, aep_direct, validity_threshold
from sel.bounds.coding import compression_bounds, converse_smoothing
from sel.bounds.ucr import MeasurementSetup, k_effective_overlap, overlap, ucr_residual
from sel.entropy import (
    ClassicalDist,
    classical_h_max,
    classical_h_min,
    h_max,
    h_min,
    h_min_solution,
)
from sel.errors import ValidityError
from sel.operators import (
    MultipartiteState,
    ProjectiveMeasurement,
    SystemLayout,
    classical_quantum,
    computational_basis,
    hadamard_basis,
    random_povm,
    random_pure_state,
    random_state,
    tensor_power,
)
from sel.smooth import (
    chain_rule_eval,
    classical_smooth_h_max,
    renyi_min_bound,
    smooth_h_max,
    smooth_h_min,
    smooth_relative_min,
)
from sel.statefile import load_distribution
from tests.conftest import scaled

pytestmark = pytest.mark.slow

ABC = SystemLayout.of(("A", 2), ("B", 2), ("C", 2))


def test_bernoulli_reference_values():
    h, lo, hi = bernoulli_references(0.2)
    assert h == pytest.approx(0.7219, abs=5e-4)
    assert lo == pytest.approx(0.3219, abs=5e-4)
    assert hi == pytest.approx(math.log2(1.8), abs=1e-12)


def test_bb84_overlap():
    assert overlap(computational_basis(2), hadamard_basis()) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("d_c", [2, 4])
@pytest.mark.parametrize("eps", [0.0, 0.05, 0.1])
def test_min_max_duality_on_pure_states(d_c, eps):
    layout = SystemLayout.of(("A", 2), ("B", 2), ("C", d_c))
    for seed in range(scaled(100, 4)):
        psi = random_pure_state(layout, seed=1000 * d_c + seed)
        lo = smooth_h_min(psi, "A", "B", eps)[0].bits
        hi = smooth_h_max(psi, "A", "C", eps)[0].bits
        assert abs(lo + hi) <= 5e-6, f"seed {seed}: {lo} + {hi}"


def test_classical_closed_forms_match_sdp(rng):
    for _ in range(scaled(100, 10)):
        dx, dy = rng.integers(2, 5, size=2)
        p = rng.dirichlet(np.ones(dx * dy)).reshape(dx, dy)
        state = ClassicalDist(p).to_state()
        assert classical_h_min(p).bits == pytest.approx(h_min(state, "X", "Y").bits, abs=5e-6)
        assert classical_h_max(p).bits == pytest.approx(h_max(state, "X", "Y").bits, abs=5e-6)


def test_guessing_probability_against_helstrom():
    zero = np.diag([1.0, 0.0]).astype(complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    cq = classical_quantum([0.5 * zero, 0.5 * plus], "X", SystemLayout.of(("B", 2)))
    assert 2 ** -h_min(cq, "X", "B").bits == pytest.approx(0.85355, abs=1e-5)


@pytest.mark.parametrize("n", range(1, 7))
def test_aep_below_threshold_at_small_eps(bernoulli02, n):
    params = AepParams.from_state(bernoulli02, "A", (), n=n, eps=0.1)
    assert n < validity_threshold(0.1)
    with pytest.raises(ValidityError):
        aep_direct(params)


def _per_copy_h_min(single: MultipartiteState, n: int, eps: float) -> float:
    method = "sdp" if n <= 3 else "classical"
    labels = [f"A{k}" for k in range(1, n + 1)]
    return smooth_h_min(tensor_power(single, n), labels, eps=eps, method=method)[0].bits / n


@pytest.mark.parametrize("n", range(2, 7))
def test_aep_sandwich_on_iid_bernoulli(bernoulli02, n):
    tight, loose = 0.05, 0.9
    upper, _ = aep_converse(AepParams.from_state(bernoulli02, "A", (), n=n, eps=tight), loose)
    assert _per_copy_h_min(bernoulli02, n, tight) <= upper + 1e-6
    lower, _ = aep_direct(AepParams.from_state(bernoulli02, "A", (), n=n, eps=loose))
    assert _per_copy_h_min(bernoulli02, n, loose) >= lower - 1e-6


@pytest.mark.parametrize("alpha", [1.25, 1.5, 2.0])
@pytest.mark.parametrize("eps", [0.05, 0.1])
def test_relative_min_above_renyi_bound(alpha, eps):
    layout = SystemLayout.of(("A", 2))
    for seed in range(scaled(100, 3)):
        rho = random_state(layout, 2, seed=2 * seed)
        sigma = random_state(layout, 2, seed=2 * seed + 1).matrix
        smooth = smooth_relative_min(rho, sigma, eps)
        bound = renyi_min_bound(rho, sigma, eps, alpha)
        assert smooth.bits + smooth.tol >= bound.bits - 1e-5, f"seed {seed}"


def test_uncertainty_relation_on_random_states():
    for seed in range(scaled(200, 10)):
        psi = random_pure_state(ABC, seed=seed)
        x = random_povm(2, 2 + seed % 3, seed=5000 + seed)
        y = random_povm(2, 2 + (seed + 1) % 3, seed=6000 + seed)
        ineq = ucr_residual(psi, x, y)
        assert ineq.slack >= -5e-6, f"seed {seed}: {ineq.slack}"


@pytest.mark.parametrize("eta", [0.0, 0.1, 0.5])
def test_qutrit_effective_overlap(eta):
    plus = np.array([1.0, 1.0, 0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0, 0]) / math.sqrt(2)
    x = ProjectiveMeasurement.from_basis(np.eye(3))
    y = ProjectiveMeasurement.from_basis(np.column_stack([plus, minus, [0, 0, 1.0]]))
    k = ProjectiveMeasurement.from_matrices([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    rho = MultipartiteState.from_diagonal([(1 - eta) / 2, (1 - eta) / 2, eta], SystemLayout.of(("A", 3)))
    value = k_effective_overlap(MeasurementSetup(rho, x, y, k), form="plain")
    assert value == pytest.approx((1 - eta) / 2 + eta, abs=1e-12)


def test_chain_rules_on_random_states():
    for seed in range(scaled(50, 3)):
        rho = random_state(ABC, 1 + seed % 4, seed=700 + seed)
        for ineq in chain_rule_eval(rho, "A", "B", "C", eps=0.05, eps1=0.01, eps2=0.01):
            assert ineq.slack >= -1e-5, f"seed {seed}, {ineq.name}: {ineq.slack}"


def test_compression_error_within_direct_bound():
    eps, eps1, eps2, n = 0.2, 0.1, 0.1, 12
    strings = bernoulli_string_probabilities(0.2, n)
    h_max_eps1 = classical_smooth_h_max(strings, eps1)[0].bits
    h_max_conv = classical_smooth_h_max(strings, converse_smoothing(eps))[0].bits
    lower, upper = compression_bounds(h_max_eps1, h_max_conv, eps1, eps2, eps)
    assert lower <= upper
    trials = scaled(10_000, 2_000)
    result = compress_simulate([0.8, 0.2], n=n, m=math.ceil(upper), trials=trials, seed=12)
    sigma = math.sqrt(eps * (1 - eps) / trials)
    assert result.p_err <= eps + 3 * sigma


def test_extraction_within_leftover_hash_bound(fixtures_dir):
    dist = load_distribution(fixtures_dir / "joint_parity.json")
    assert extract_simulate(dist, 1) <= 0.35356


@pytest.mark.parametrize("q", [0.0, 0.01, 0.05])
def test_qkd_rate_approaches_limit(q):
    table = qkd_rate_curve(q, 1e-6, 1e-6, log_grid(1e4, 1e8, per_decade=2))
    rates = table.column("rate")
    assert rates == sorted(rates)
    assert abs(rates[-1] - table.column("asymptotic")[-1]) <= 0.01


def test_solver_certificates(rng):
    states = [random_state(SystemLayout.of(("A", 2), ("B", 3)), r, seed=900 + r) for r in (1, 3, 6)]
    for _ in range(scaled(20, 3)):
        dx, dy = rng.integers(2, 5, size=2)
        p = rng.dirichlet(np.ones(dx * dy)).reshape(dx, dy)
        states.append(ClassicalDist(p).to_state("A", "B"))
    for rho in states:
        _, sol = h_min_solution(rho, "A", "B")
        assert sol.ok
        assert sol.relative_gap <= 1e-8 + 1e-12
        assert sol.max_weak_duality_violation <= 1e-9
