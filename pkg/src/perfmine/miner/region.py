"""Column-interval representation of connected rectilinear bucket regions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from ..bucketing import HitGrid

__all__ = ["Region", "is_admissible", "region_gain", "region_stats"]


@dataclass(frozen=True)
class Region:
    """Bucket subset described column by column.

    ``intervals[k] = (s, t)`` is the inclusive row range covered in column
    ``left + k``. The empty region has no intervals.
    """

    left: int = 0
    intervals: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple((int(s), int(t)) for s, t in self.intervals))
        object.__setattr__(self, "left", int(self.left) if self.intervals else 0)

    @classmethod
    def empty(cls) -> "Region":
        return cls()

    @classmethod
    def rectangle(cls, x0: int, x1: int, y0: int, y1: int) -> "Region":
        return cls(x0, tuple((y0, y1) for _ in range(x0, x1 + 1)))

    @classmethod
    def from_cells(cls, cells: Iterable[tuple[int, int]]) -> "Region":
        """Build from ``(column, row)`` cells; columns must be gap-free and each
        column's rows contiguous."""
        by_col: dict[int, list[int]] = {}
        for x, y in cells:
            by_col.setdefault(int(x), []).append(int(y))
        if not by_col:
            return cls()
        cols = sorted(by_col)
        if cols != list(range(cols[0], cols[-1] + 1)):
            raise ValueError("region columns are not contiguous")
        intervals = []
        for c in cols:
            rows = sorted(set(by_col[c]))
            if rows[-1] - rows[0] + 1 != len(rows):
                raise ValueError(f"column {c} rows are not contiguous")
            intervals.append((rows[0], rows[-1]))
        return cls(cols[0], tuple(intervals))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def right(self) -> int:
        return self.left + len(self.intervals) - 1

    @property
    def tops(self) -> tuple[int, ...]:
        return tuple(t for _, t in self.intervals)

    @property
    def bottoms(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.intervals)

    @property
    def n_buckets(self) -> int:
        return sum(t - s + 1 for s, t in self.intervals)

    def cells(self) -> list[tuple[int, int]]:
        return [(self.left + k, y) for k, (s, t) in enumerate(self.intervals) for y in range(s, t + 1)]

    def cell_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.cells())

    def mask(self, shape: tuple[int, int]) -> np.ndarray:
        m = np.zeros(shape, dtype=bool)
        for k, (s, t) in enumerate(self.intervals):
            m[self.left + k, s : t + 1] = True
        return m

    def transpose(self) -> "Region":
        """Reflection across the main diagonal."""
        return Region.from_cells((y, x) for x, y in self.cells())

    def sort_key(self) -> tuple:
        """Secondary tie-break key: smallest first column, then bottoms, then tops."""
        return (self.left, self.bottoms, self.tops)

    def within(self, shape: tuple[int, int]) -> bool:
        if self.is_empty:
            return True
        mx, my = shape
        return 0 <= self.left and self.right < mx and all(0 <= s and t < my for s, t in self.intervals)


def _unimodal_up(seq) -> bool:
    """Non-decreasing then non-increasing."""
    falling = False
    for a, b in zip(seq, seq[1:]):
        if b < a:
            falling = True
        elif b > a and falling:
            return False
    return True


def is_admissible(region: Region) -> bool:
    """Connected and rectilinear: overlapping consecutive column intervals,
    pseudoconcave top boundary and pseudoconvex bottom boundary."""
    iv = region.intervals
    if any(s > t for s, t in iv):
        return False
    for (s0, t0), (s1, t1) in zip(iv, iv[1:]):
        if s1 > t0 or s0 > t1:
            return False
    return _unimodal_up(region.tops) and _unimodal_up([-s for s in region.bottoms])


def region_stats(grid: HitGrid, region: Region) -> tuple[int, int]:
    """Hit and support of ``region``."""
    if not region.within(grid.shape):
        raise ValueError("region extends outside the grid")
    h = sum(int(grid.hits[region.left + k, s : t + 1].sum()) for k, (s, t) in enumerate(region.intervals))
    return h, grid.scale * region.n_buckets


def region_gain(grid: HitGrid, region: Region, tau) -> float | Fraction:
    """``H - tau * S``; exact when ``tau`` is a Fraction or int."""
    h, s = region_stats(grid, region)
    return h - tau * s
