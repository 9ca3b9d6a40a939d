"""One-shot and finite-n bound arithmetic for source compression, randomness extraction and QKD."""

from __future__ import annotations

import logging
import math

from sel.bounds.aep import AepParams, aep_delta, aep_direct
from sel.entropy import binary_entropy
from sel.errors import ArgumentError

logger = logging.getLogger(__name__)

EPS_SPLIT_TOL = 1e-12
# bits of overhead in the key length chain
QKD_OVERHEAD = 7.0


def _open_unit(name: str, value: float) -> float:
    if not 0 < value < 1:
        raise ArgumentError(f"{name} must lie in (0, 1), got {value}")
    return float(value)


def _check_split(eps1: float, eps2: float, eps: float | None) -> float:
    _open_unit("eps1", eps1)
    _open_unit("eps2", eps2)
    total = eps1 + eps2
    if eps is not None and abs(total - eps) > EPS_SPLIT_TOL:
        raise ArgumentError(f"eps1 + eps2 = {total} does not match eps = {eps}")
    return _open_unit("eps1 + eps2", total)


def converse_smoothing(eps: float) -> float:
    """sqrt(2 eps - eps^2), the smoothing parameter of the converse bounds."""
    _open_unit("eps", eps)
    return math.sqrt(2 * eps - eps * eps)


def compression_bounds(
    h_max_eps1: float, h_max_converse: float, eps1: float, eps2: float, eps: float | None = None
) -> tuple[float, float]:
    """(lower, upper) on the minimal message length of an eps-error compression scheme.

    lower is H_max^sqrt(2 eps - eps^2)(Z|B) and upper is H_max^eps1(Z|B) + 2 log 1/eps2 + 4;
    the caller supplies both smooth max-entropies.
    """
    _check_split(eps1, eps2, eps)
    return float(h_max_converse), float(h_max_eps1) + 2 * math.log2(1 / eps2) + 4


def extraction_bounds(
    h_min_eps1: float, h_min_converse: float, eps1: float, eps2: float, eps: float | None = None
) -> tuple[float, float]:
    """(lower, upper) on the maximal key length of an eps-secret extractor.

    lower is H_min^eps1(Z|E) - 2 log 1/eps2 + 1 and upper is H_min^sqrt(2 eps - eps^2)(Z|E).
    """
    _check_split(eps1, eps2, eps)
    return float(h_min_eps1) - 2 * math.log2(1 / eps2) + 1, float(h_min_converse)


def leftover_hash_delta(h_min: float, ell: float) -> float:
    """Distance from uniform guaranteed by two-universal hashing to ell bits: 2^((ell - H_min)/2) / 2."""
    if ell < 0:
        raise ArgumentError(f"output length must be non-negative, got {ell}")
    return 0.5 * 2 ** ((ell - h_min) / 2)


def compression_rate_bounds(h: float, v: float, eps: float, n: int) -> tuple[float, float]:
    """Per-symbol (converse, achievable) rates for n i.i.d. uses at error eps."""
    _open_unit("eps", eps)
    if n < 1:
        raise ArgumentError(f"block length must be at least 1, got {n}")
    shift = aep_delta(eps / 2, v) / math.sqrt(n) + (2 * math.log2(1 / eps) + 6) / n
    return h - shift, h + shift


def strong_converse_success(mu: float, n: int, v: float) -> float:
    """Bound on the success probability when compressing below H - mu per symbol."""
    if mu <= 0:
        raise ArgumentError(f"rate gap must be positive, got {mu}")
    if n < 1:
        raise ArgumentError(f"block length must be at least 1, got {n}")
    if not v > 1:
        raise ArgumentError(f"convergence parameter must exceed 1, got {v}")
    return math.sqrt(2) * 2 ** (-(mu**2) * n / (2 * (4 * math.log2(v)) ** 2))


def qkd_h_max_per_symbol(q: float) -> tuple[float, float]:
    """(h, v) for the error string of a binary symmetric channel with error rate q."""
    if not 0 <= q < 0.5:
        raise ArgumentError(f"error rate must lie in [0, 0.5), got {q}")
    h = binary_entropy(q)
    v = (1 - q) ** 1.5 + q**1.5 + math.sqrt(1 - q) + math.sqrt(q) + 1
    return h, v


def qkd_key_length(n: int, q: float, eps_c: float, eps_s: float) -> tuple[float, float]:
    """(ell, rate) of a BB84-type key after n rounds at error rate q, clamped at zero.

    ell = n - H_max^(eps_s/2)(Z^n|Z'^n) - H_max^(eps_c/2)(Z^n|Z'^n) - 2 log 1/eps_c
    - 2 log 1/eps_s - 7, with both max-entropies bounded through the i.i.d. expansion.
    """
    _open_unit("eps_c", eps_c)
    _open_unit("eps_s", eps_s)
    h, v = qkd_h_max_per_symbol(q)
    upper_s = aep_direct(AepParams(n=n, eps=eps_s / 2, h=h, v=v))[1]
    upper_c = aep_direct(AepParams(n=n, eps=eps_c / 2, h=h, v=v))[1]
    ell = n - n * upper_s - n * upper_c
    ell -= 2 * math.log2(1 / eps_c) + 2 * math.log2(1 / eps_s) + QKD_OVERHEAD
    ell = max(ell, 0.0)
    logger.debug(f"QKD n = {n}, q = {q}: ell = {ell:.6g}")
    return ell, ell / n


def asymptotic_qkd_rate(q: float) -> float:
    return 1 - 2 * binary_entropy(q)
