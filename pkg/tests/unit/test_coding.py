"""One-shot coding bounds and the QKD key-length chain."""

import math

import pytest

from sel.bounds.coding import (
    asymptotic_qkd_rate,
    compression_bounds,
    compression_rate_bounds,
    converse_smoothing,
    extraction_bounds,
    leftover_hash_delta,
    qkd_h_max_per_symbol,
    qkd_key_length,
    strong_converse_success,
)
from sel.errors import ArgumentError


def test_converse_smoothing():
    assert converse_smoothing(0.1) == pytest.approx(math.sqrt(0.19))
    with pytest.raises(ArgumentError):
        converse_smoothing(0.0)


def test_compression_bounds():
    lower, upper = compression_bounds(3.0, 2.5, 0.1, 0.1, eps=0.2)
    assert lower == 2.5
    assert upper == pytest.approx(3.0 + 2 * math.log2(10) + 4)


def test_extraction_bounds():
    lower, upper = extraction_bounds(5.0, 6.0, 0.1, 0.1)
    assert lower == pytest.approx(5.0 - 2 * math.log2(10) + 1)
    assert upper == 6.0


def test_eps_split_must_match():
    with pytest.raises(ArgumentError):
        compression_bounds(3.0, 2.5, 0.1, 0.1, eps=0.3)
    with pytest.raises(ArgumentError):
        extraction_bounds(3.0, 2.5, 0.6, 0.5)


def test_leftover_hash_delta():
    assert leftover_hash_delta(2.0, 1.0) == pytest.approx(0.5 * 2**-0.5)
    assert leftover_hash_delta(4.0, 4.0) == pytest.approx(0.5)
    with pytest.raises(ArgumentError):
        leftover_hash_delta(4.0, -1.0)


def test_rate_bounds_bracket_entropy():
    lo, hi = compression_rate_bounds(0.7, 3.2, 0.1, 10**6)
    assert lo < 0.7 < hi
    assert hi - 0.7 == pytest.approx(0.7 - lo)


def test_strong_converse_decays():
    values = [strong_converse_success(0.1, n, 3.2) for n in (10**3, 10**4, 10**5)]
    assert values == sorted(values, reverse=True)
    assert values[-1] < 1e-3
    with pytest.raises(ArgumentError):
        strong_converse_success(0.0, 10, 3.2)


def test_qkd_parameters():
    h, v = qkd_h_max_per_symbol(0.0)
    assert h == 0.0
    assert v == pytest.approx(3.0)
    with pytest.raises(ArgumentError):
        qkd_h_max_per_symbol(0.5)


def test_key_length_clamped_at_zero():
    ell, rate = qkd_key_length(100, 0.05, 1e-6, 1e-6)
    assert ell == 0.0
    assert rate == 0.0


def test_asymptotic_rate():
    assert asymptotic_qkd_rate(0.05) == pytest.approx(0.4272, abs=5e-5)
    assert asymptotic_qkd_rate(0.0) == 1.0
