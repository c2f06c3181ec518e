"""Exhaustive reference optimizers for small grids.

Admissibility here is checked on raw bucket sets (every row and column
section contiguous, 4-connected), independently of the column-interval
representation used by the dynamic program.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..bucketing import HitGrid
from .dp import MISSING_POLICIES, as_fraction
from .region import Region

__all__ = [
    "MAX_BRUTE_FORCE_BUCKETS",
    "admissible_subsets",
    "brute_force_optimize",
    "brute_force_optimize_support",
    "brute_force_optimize_confidence",
]

MAX_BRUTE_FORCE_BUCKETS = 20


def _contiguous(v: np.ndarray) -> np.ndarray:
    low = v & (~v + np.uint64(1))
    return (v & (v + low)) == 0


@lru_cache(maxsize=8)
def admissible_subsets(mx: int, my: int) -> np.ndarray:
    """Bitmasks (bit ``x * my + y``) of every admissible bucket subset, empty set included."""
    m = mx * my
    if m > MAX_BRUTE_FORCE_BUCKETS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_BUCKETS} buckets, got {m}")
    sets = np.arange(2**m, dtype=np.uint64)
    one = np.uint64(1)
    ok = np.ones(sets.shape, dtype=bool)
    col_bits = np.uint64((1 << my) - 1)
    for x in range(mx):
        ok &= _contiguous((sets >> np.uint64(x * my)) & col_bits)
    for y in range(my):
        row = np.zeros_like(sets)
        for x in range(mx):
            row |= ((sets >> np.uint64(x * my + y)) & one) << np.uint64(x)
        ok &= _contiguous(row)
    sets = sets[ok]

    # flood fill from the lowest bucket
    bottom = np.uint64(sum(1 << (x * my) for x in range(mx)))
    top = np.uint64(sum(1 << (x * my + my - 1) for x in range(mx)))
    reach = sets & (~sets + one)
    for _ in range(m):
        grown = reach | ((reach << one) & ~bottom) | ((reach >> one) & ~top)
        grown |= (reach << np.uint64(my)) | (reach >> np.uint64(my))
        grown &= sets
        if np.array_equal(grown, reach):
            break
        reach = grown
    return sets[reach == sets]


def _cells_matrix(sets: np.ndarray, m: int) -> np.ndarray:
    return ((sets[:, None] >> np.arange(m, dtype=np.uint64)) & np.uint64(1)).astype(bool)


def _region_of(bits: np.ndarray, my: int) -> Region:
    return Region.from_cells((k // my, k % my) for k in np.nonzero(bits)[0])


def _candidates(grid: HitGrid, missing: str):
    if missing not in MISSING_POLICIES:
        raise ValueError(f"missing must be one of {MISSING_POLICIES}, got {missing!r}")
    mx, my = grid.shape
    sets = admissible_subsets(mx, my)
    cells = _cells_matrix(sets, mx * my)
    if missing == "exclude":
        keep = ~(cells & grid.mask.reshape(-1)).any(axis=1)
        cells = cells[keep]
    hits = cells.astype(np.int64) @ grid.hits.reshape(-1)
    eta = cells.sum(axis=1).astype(np.int64)
    return cells, hits, eta


def _pick(cells, idx, my) -> Region:
    regions = [_region_of(cells[i], my) for i in idx]
    return min(regions, key=Region.sort_key)


def brute_force_optimize(grid: HitGrid, tau, missing: str = "exclude") -> Region:
    """Exact optimized-gain region by enumeration, same tie-breaking as the DP."""
    tau = as_fraction(tau)
    cells, hits, eta = _candidates(grid, missing)
    gain = [int(h) * tau.denominator - tau.numerator * grid.scale * int(e) for h, e in zip(hits, eta)]
    key = [(g, int(e)) for g, e in zip(gain, eta)]
    best = max(key)
    idx = [i for i, k in enumerate(key) if k == best]
    return _pick(cells, idx, grid.shape[1])


def brute_force_optimize_support(grid: HitGrid, theta, missing: str = "exclude") -> Region | None:
    """Largest admissible region with confidence >= theta (ties: higher hit)."""
    theta = Fraction(theta)
    cells, hits, eta = _candidates(grid, missing)
    best, idx = None, []
    for i, (h, e) in enumerate(zip(hits, eta)):
        h, e = int(h), int(e)
        if e == 0 or h * theta.denominator < theta.numerator * grid.scale * e:
            continue
        k = (e, h)
        if best is None or k > best:
            best, idx = k, [i]
        elif k == best:
            idx.append(i)
    return None if best is None else _pick(cells, idx, grid.shape[1])


def brute_force_optimize_confidence(grid: HitGrid, min_buckets: int, missing: str = "exclude") -> Region | None:
    """Most confident admissible region with at least ``min_buckets`` buckets (ties: larger)."""
    cells, hits, eta = _candidates(grid, missing)
    best, idx = None, []
    for i, (h, e) in enumerate(zip(hits, eta)):
        h, e = int(h), int(e)
        if e == 0 or e < min_buckets:
            continue
        k = (Fraction(h, e), e)
        if best is None or k > best:
            best, idx = k, [i]
        elif k == best:
            idx.append(i)
    return None if best is None else _pick(cells, idx, grid.shape[1])
