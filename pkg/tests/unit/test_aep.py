"""Finite-n AEP corrections and their validity threshold."""

import math

import numpy as np
import pytest

from sel.apps.figures import bernoulli_string_probabilities
from sel.bounds.aep import (
    AepParams,
    aep_converse,
    aep_delta,
    aep_direct,
    aep_table,
    conditional_upsilon,
    g_of_eps,
    renyi_vn_gap_bound,
    renyi_window,
    upsilon,
    validity_threshold,
)
from sel.errors import ArgumentError, ValidityError
from sel.smooth import classical_smooth_h_min


def test_g_of_eps_reference_value():
    assert g_of_eps(0.1) == pytest.approx(7.64, abs=5e-3)
    assert g_of_eps(1.0) == pytest.approx(0.0)
    with pytest.raises(ArgumentError):
        g_of_eps(0.0)


def test_validity_threshold_uses_eight_fifths():
    assert validity_threshold(0.1) == math.ceil(1.6 * g_of_eps(0.1)) == 13


@pytest.mark.parametrize("n", range(1, 7))
def test_short_blocks_below_threshold(n):
    params = AepParams(n=n, eps=0.1, h=0.5, v=3.5)
    with pytest.raises(ValidityError) as exc:
        aep_direct(params)
    assert exc.value.threshold == 13
    lower, upper = aep_direct(params, strict=False)
    assert lower < 0.5 < upper


def test_direct_bounds_shrink_with_n():
    widths = []
    for n in (100, 1000, 10000):
        lower, upper = aep_direct(AepParams(n=n, eps=0.1, h=0.7, v=4.0))
        widths.append(upper - lower)
    assert widths == sorted(widths, reverse=True)
    assert widths[-1] == pytest.approx(2 * aep_delta(0.1, 4.0) / 100)


def test_converse_bounds():
    params = AepParams(n=1000, eps=0.1, h=0.7, v=4.0)
    min_upper, max_lower = aep_converse(params, 0.1)
    assert min_upper > 0.7 > max_lower
    with pytest.raises(ArgumentError):
        aep_converse(params, 0.95)


def test_params_validation():
    with pytest.raises(ArgumentError):
        AepParams(n=0, eps=0.1, h=0.5, v=3.0)
    with pytest.raises(ArgumentError):
        AepParams(n=10, eps=0.1, h=0.5, v=2.0)
    with pytest.raises(ArgumentError):
        AepParams(n=10, eps=1.0, h=0.5, v=3.0)


def test_upsilon_of_equal_states_is_three():
    rho = np.diag([0.7, 0.3])
    assert upsilon(rho, rho) == pytest.approx(3.0)
    assert math.isinf(upsilon(np.diag([0.5, 0.5]), np.diag([1.0, 0.0])))


def test_params_from_bernoulli_state(bernoulli02):
    params = AepParams.from_state(bernoulli02, "A", (), n=100, eps=0.1)
    assert params.h == pytest.approx(0.7219, abs=5e-5)
    assert params.v == pytest.approx(conditional_upsilon(bernoulli02, "A"))
    assert params.v > 3


def test_renyi_window():
    upper = renyi_window(4.0)
    assert upper == pytest.approx(1 + math.log2(3) / 8)
    assert renyi_vn_gap_bound(1.1, 4.0) == pytest.approx(4 * 0.1 * 4.0)
    with pytest.raises(ArgumentError):
        renyi_vn_gap_bound(upper + 0.01, 4.0)


def test_table_layout():
    table = aep_table(0.7, 4.0, 0.1, 0.1, [100, 1000])
    assert table.columns == ["n", "min_lower", "max_upper", "min_upper", "max_lower"]
    assert table.column("n") == [100.0, 1000.0]


def test_table_strict_below_threshold():
    with pytest.raises(ValidityError):
        aep_table(0.7, 4.0, 0.1, 0.1, [5])


@pytest.mark.parametrize("n", [2, 4, 6])
def test_exact_smooth_min_entropy_above_lower_bound(bernoulli02, n):
    eps = 0.9
    assert validity_threshold(eps) <= n
    params = AepParams.from_state(bernoulli02, "A", (), n=n, eps=eps)
    lower, _ = aep_direct(params)
    exact = classical_smooth_h_min(bernoulli_string_probabilities(0.2, n), eps)[0].bits / n
    assert exact >= lower - 1e-6
