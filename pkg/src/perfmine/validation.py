"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .bucketing import HIT_SCALE, HitGrid

__all__ = ["check_hit_grid", "check_probability", "check_positive"]


def check_hit_grid(X, mask=None, scale: int = HIT_SCALE) -> HitGrid:
    """Coerce ``X`` to a :class:`HitGrid`.

    Accepts a HitGrid unchanged, or a 2D integer-valued array of hits in
    ``[0, scale]``. NaN entries in a float array are treated as missing.
    """
    if isinstance(X, HitGrid):
        return X
    arr = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan", ensure_min_samples=1)
    missing = np.isnan(arr)
    if mask is not None:
        missing |= np.asarray(mask, dtype=bool)
    vals = np.where(missing, 0.0, arr)
    if np.any(vals != np.round(vals)):
        raise ValueError("hits must be integers")
    return HitGrid(vals.astype(np.int64), missing, scale=scale)


def check_probability(value, name: str, *, open_low: bool = False, open_high: bool = False) -> float:
    v = float(value)
    lo_ok = v > 0 if open_low else v >= 0
    hi_ok = v < 1 if open_high else v <= 1
    if not (lo_ok and hi_ok):
        lo = "(" if open_low else "["
        hi = ")" if open_high else "]"
        raise ValueError(f"{name} must lie in {lo}0, 1{hi}, got {value}")
    return v


def check_positive(value, name: str) -> float:
    v = float(value)
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return v
