"""Adaptive per-point sampling and full-grid sweeps with diagonal reflection."""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .simgen import PointConfig
from .stats import (
    BerSample,
    InsufficientDataError,
    StoppingConfig,
    point_estimate,
    rule_relative_accuracy,
    rule_threshold,
)

__all__ = [
    "StopReason",
    "PointRecord",
    "Grid",
    "PerformanceDatabase",
    "BlockSimulator",
    "stop_reason_for",
    "sample_point",
    "sweep",
    "diagnostics",
]

logger = logging.getLogger(__name__)

BlockSimulator = Callable[[PointConfig, int], BerSample]


class StopReason(str, enum.Enum):
    RELATIVE_ACCURACY = "RelativeAccuracy"
    THRESHOLD = "Threshold"
    SAMPLE_CAP = "SampleCap"


@dataclass
class PointRecord:
    point: PointConfig
    samples: list[BerSample]
    stop_reason: StopReason | None = field(default=None, compare=False)
    mirrored: bool = False

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples], dtype=float)

    def reflect(self) -> "PointRecord":
        return PointRecord(self.point.mirrored, list(self.samples), self.stop_reason, mirrored=True)


@dataclass(frozen=True)
class Grid:
    """Rectangular lattice of (s1_db, s2_db) values; ``xs`` indexes S1, ``ys`` S2."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in self.ys))
        for axis in (self.xs, self.ys):
            if len(axis) == 0:
                raise ValueError("grid axes must be non-empty")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError("grid axes must be strictly increasing")

    @classmethod
    def square(cls, lo: float, hi: float, step: float = 1.0) -> "Grid":
        n = int(round((hi - lo) / step)) + 1
        if n < 1:
            raise ValueError(f"empty grid range {lo}:{hi}:{step}")
        axis = tuple(float(lo + i * step) for i in range(n))
        return cls(axis, axis)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)

    def points(self) -> list[PointConfig]:
        return [PointConfig(x, y) for x in self.xs for y in self.ys]

    def index(self, p: PointConfig) -> tuple[int, int]:
        return self.xs.index(p.s1_db), self.ys.index(p.s2_db)

    def __contains__(self, p: PointConfig) -> bool:
        return p.s1_db in self.xs and p.s2_db in self.ys


class PerformanceDatabase:
    """Per-point sample lists over a grid.

    Reflected cells share the sample list of their mirror and carry
    ``mirrored=True``; they are not independent data.
    """

    def __init__(self, grid: Grid, records: Mapping[PointConfig, PointRecord] | None = None):
        self.grid = grid
        self.records: dict[PointConfig, PointRecord] = {}
        for rec in (records or {}).values():
            self.add(rec)

    def add(self, rec: PointRecord) -> None:
        if rec.point not in self.grid:
            raise ValueError(f"point {rec.point} is not on the grid")
        if rec.point in self.records:
            raise ValueError(f"duplicate record for {rec.point}")
        self.records[rec.point] = rec

    @classmethod
    def from_samples(cls, grid: Grid, samples: Mapping[PointConfig, Sequence[BerSample]]) -> "PerformanceDatabase":
        return cls(grid, {p: PointRecord(p, list(v)) for p, v in samples.items()})

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records.values())

    def __getitem__(self, p: PointConfig) -> PointRecord:
        return self.records[p]

    def __eq__(self, other):
        if not isinstance(other, PerformanceDatabase):
            return NotImplemented
        return self.grid == other.grid and self.records == other.records

    @property
    def n_simulated(self) -> int:
        return sum(1 for r in self.records.values() if not r.mirrored)

    def total_samples(self, include_mirrored: bool = False) -> int:
        return sum(r.n for r in self.records.values() if include_mirrored or not r.mirrored)

    def with_samples(self, select: Callable[[PointRecord], list[BerSample]]) -> "PerformanceDatabase":
        """Copy with each record's samples replaced by ``select(record)``."""
        out = PerformanceDatabase(self.grid)
        for p, r in self.records.items():
            out.add(PointRecord(p, select(r), None, r.mirrored))
        return out


def stop_reason_for(samples: Sequence[BerSample], cfg: StoppingConfig) -> StopReason | None:
    """Rule that fires on ``samples``; relative accuracy wins ties."""
    n = len(samples)
    if n < cfg.min_samples:
        return None
    est = point_estimate(samples)
    if rule_relative_accuracy(est, cfg):
        return StopReason.RELATIVE_ACCURACY
    if rule_threshold(est, cfg):
        return StopReason.THRESHOLD
    if n >= cfg.max_samples:
        return StopReason.SAMPLE_CAP
    return None


def sample_point(p: PointConfig, cfg: StoppingConfig, sim: BlockSimulator) -> PointRecord:
    """Draw blocks at ``p`` until a stopping rule fires.

    Rules are checked after every block once ``cfg.min_samples`` blocks are in.
    """
    samples: list[BerSample] = []
    while True:
        samples.append(sim(p, len(samples)))
        reason = stop_reason_for(samples, cfg)
        if reason is not None:
            return PointRecord(p, samples, reason)


def _sample_task(args):
    p, cfg, sim = args
    return sample_point(p, cfg, sim)


def _needs_simulation(p: PointConfig, grid: Grid) -> bool:
    return p.s1_db <= p.s2_db or p.mirrored not in grid


def sweep(grid: Grid, cfg: StoppingConfig, sim: BlockSimulator, jobs: int = 1) -> PerformanceDatabase:
    """Sample every grid point with ``s1 <= s2`` and reflect the rest.

    Points whose mirror is off the grid are simulated directly. Output does not
    depend on ``jobs`` or on evaluation order.
    """
    todo = [p for p in grid.points() if _needs_simulation(p, grid)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sample_task, [(p, cfg, sim) for p in todo], chunksize=4))
    else:
        results = [sample_point(p, cfg, sim) for p in todo]
    db = PerformanceDatabase(grid)
    for rec in results:
        db.add(rec)
    for p in grid.points():
        if p not in db.records:
            db.add(db.records[p.mirrored].reflect())
    logger.info(
        "sweep: %d simulated, %d reflected, %d samples",
        db.n_simulated, len(db) - db.n_simulated, db.total_samples(),
    )
    return db


def diagnostics(db: PerformanceDatabase) -> tuple[np.ndarray, np.ndarray]:
    """Sample-size grid and sd/mean grid, shaped ``grid.shape``.

    Missing cells are 0 in the size grid and NaN in the ratio grid; the ratio
    is NaN for points with fewer than two samples.
    """
    n = np.zeros(db.grid.shape, dtype=int)
    ratio = np.full(db.grid.shape, np.nan)
    for rec in db:
        i, j = db.grid.index(rec.point)
        n[i, j] = rec.n
        try:
            est = point_estimate(rec.samples)
        except InsufficientDataError:
            continue
        ratio[i, j] = est.sd / est.mean
    return n, ratio
