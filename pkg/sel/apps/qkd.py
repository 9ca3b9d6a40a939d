"""Finite-key rate curves for BB84-type key distribution."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from sel.bounds.coding import asymptotic_qkd_rate, qkd_key_length
from sel.models import BoundTable


def log_grid(start: float, stop: float, per_decade: int = 1) -> list[int]:
    """Integer block lengths spaced evenly in log10 between start and stop."""
    count = int(round(np.log10(stop / start) * per_decade)) + 1
    return sorted({int(round(n)) for n in np.logspace(np.log10(start), np.log10(stop), count)})


def qkd_rate_curve(q: float, eps_c: float, eps_s: float, n_grid: Iterable[int]) -> BoundTable:
    table = BoundTable(
        columns=["n", "ell", "rate", "asymptotic"],
        title=f"key rate, Q = {q:g}, eps_c = {eps_c:g}, eps_s = {eps_s:g}",
    )
    limit = asymptotic_qkd_rate(q)
    for n in n_grid:
        ell, rate = qkd_key_length(int(n), q, eps_c, eps_s)
        table.add_row(n, ell, rate, limit)
    return table
