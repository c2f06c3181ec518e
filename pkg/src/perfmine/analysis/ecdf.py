"""Empirical distribution functions of per-point samples."""

from __future__ import annotations

import numpy as np

__all__ = ["ecdf", "ecdf_quantile"]


def ecdf(samples) -> list[tuple[float, float]]:
    """Right-continuous ECDF as ``(value, F(value))`` steps, ties collapsed."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("ecdf needs at least one sample")
    vals, counts = np.unique(x, return_counts=True)
    frac = np.cumsum(counts) / x.size
    frac[-1] = 1.0
    return [(float(v), float(f)) for v, f in zip(vals, frac)]


def ecdf_quantile(steps: list[tuple[float, float]], p: float) -> float:
    """Smallest step value ``v`` with ``F(v) >= p``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    for v, f in steps:
        if f >= p - 1e-12:
            return v
    return steps[-1][0]
