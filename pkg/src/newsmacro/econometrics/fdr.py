"""Benjamini-Hochberg step-up adjustment for multiple testing."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError


def bh_adjust(p_values) -> np.ndarray:
    """False-discovery-rate adjusted p-values, in input order.

    Step-up rule: with m tests and sorted raw values p_(1) <= ... <= p_(m),
    the adjusted value at rank i is min over j >= i of p_(j) * m / j,
    capped at one.
    """
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1:
        raise DomainError("p-values must form a one-dimensional sequence")
    if p.size == 0:
        return p.copy()
    if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("p-values must lie in [0, 1]")

    m = p.size
    order = np.argsort(p, kind="stable")
    ranked = p[order] * m / np.arange(1, m + 1)
    adjusted_sorted = np.minimum.accumulate(ranked[::-1])[::-1]
    adjusted_sorted = np.minimum(adjusted_sorted, 1.0)
    adjusted = np.empty(m)
    adjusted[order] = adjusted_sorted
    return adjusted
