"""One-dimensional cuts of a fitted surface in (alpha, S) coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..simgen import snrs_from_imbalance

__all__ = ["SliceCurve", "slice_fixed_alpha", "slice_fixed_S"]


@dataclass
class SliceCurve:
    """Surface values along a slice; ``z`` is NaN where the query leaves the hull."""

    param: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    z: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.z)


def _evaluate(surface, param, pairs) -> SliceCurve:
    pts = np.array([(p.s1_db, p.s2_db) for p in pairs], dtype=float).reshape(-1, 2)
    z = np.full(len(pts), np.nan)
    inside = surface.in_hull(pts)
    if inside.any():
        z[inside] = surface.predict(pts[inside])
    return SliceCurve(np.asarray(param, dtype=float), pts[:, 0], pts[:, 1], z)


def slice_fixed_alpha(surface, alpha: float, S_values) -> SliceCurve:
    """Surface along constant imbalance ``alpha`` as the effective SNR varies."""
    S_values = np.asarray(S_values, dtype=float)
    return _evaluate(surface, S_values, [snrs_from_imbalance(alpha, s) for s in S_values])


def slice_fixed_S(surface, S: float, alpha_values) -> SliceCurve:
    """Surface along constant effective SNR ``S`` as the imbalance varies."""
    alpha_values = np.asarray(alpha_values, dtype=float)
    return _evaluate(surface, alpha_values, [snrs_from_imbalance(a, S) for a in alpha_values])
