"""Data behind the surprisal and smoothing-penalty figures."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np
from scipy.special import comb

from sel.bounds.aep import g_of_eps
from sel.entropy import binary_entropy, classical_h_max, classical_h_min
from sel.errors import ArgumentError
from sel.models import BoundTable
from sel.smooth import classical_smooth_h_max, classical_smooth_h_min

MAX_SMOOTH_N = 12


def bernoulli_references(p: float) -> tuple[float, float, float]:
    """(H, H_min, H_max) of a single Bernoulli(p) trial."""
    if not 0 < p < 1:
        raise ArgumentError(f"p must lie in (0, 1), got {p}")
    dist = [p, 1 - p]
    return binary_entropy(p), classical_h_min(dist).bits, classical_h_max(dist).bits


def surprisal_curve(p: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial surprisal of each type class of n trials and the cumulative probability,
    ordered by increasing surprisal."""
    if n < 1:
        raise ArgumentError(f"n must be at least 1, got {n}")
    k = np.arange(n + 1)
    log_prob = k * math.log2(p) + (n - k) * math.log2(1 - p)
    weight = comb(n, k) * np.exp2(log_prob)
    order = np.argsort(-log_prob, kind="stable")
    return -log_prob[order] / n, np.cumsum(weight[order])


def bernoulli_string_probabilities(p: float, n: int) -> np.ndarray:
    """Probabilities of all 2^n outcome strings, grouped by number of ones."""
    if n > MAX_SMOOTH_N:
        raise ArgumentError(f"smoothing over 2^{n} strings exceeds the figure size")
    k = np.arange(n + 1)
    per_string = np.exp2(k * math.log2(p) + (n - k) * math.log2(1 - p))
    return np.repeat(per_string, comb(n, k, exact=False).round().astype(int))


def surprisal_table(p: float, n_list: Iterable[int], eps: float | None = None) -> BoundTable:
    """Surprisal curves with the single-trial references; with eps, also the per-trial
    smooth min- and max-entropies of the n-trial string."""
    h, h_min, h_max = bernoulli_references(p)
    columns = ["n", "surprisal", "cumulative_probability", "h", "h_min", "h_max"]
    if eps is not None:
        columns += ["h_min_eps", "h_max_eps"]
    table = BoundTable(columns=columns, title=f"surprisal of {p:g}-Bernoulli strings")
    for n in map(int, n_list):
        smoothed: tuple[float, ...] = ()
        if eps is not None:
            probs = bernoulli_string_probabilities(p, n)
            smoothed = (
                classical_smooth_h_min(probs, eps)[0].bits / n,
                classical_smooth_h_max(probs, eps)[0].bits / n,
            )
        for s, cum in zip(*surprisal_curve(p, n), strict=True):
            table.add_row(n, s, min(cum, 1.0), h, h_min, h_max, *smoothed)
    return table


def penalty_table(eps_grid: Iterable[float]) -> BoundTable:
    table = BoundTable(columns=["eps", "g", "log2_2_over_eps2"], title="smoothing penalty")
    for eps in eps_grid:
        table.add_row(eps, g_of_eps(eps), math.log2(2 / eps**2))
    return table
