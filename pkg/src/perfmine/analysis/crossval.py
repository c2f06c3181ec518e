"""Leave-one-slice-out cross-validation of optimized-support regions."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import binary_dilation

from ..bucketing import HitGrid, confidence_map
from ..miner.region import Region, region_stats
from ..miner.search import search_support
from ..sampler import PerformanceDatabase, PointRecord

__all__ = ["CrossValReport", "fold_database", "cross_validate", "jaccard", "boundary_band"]

logger = logging.getLogger(__name__)


def jaccard(a: Region, b: Region, exclude: np.ndarray | None = None) -> float:
    """Bucket-set Jaccard index, optionally ignoring buckets flagged in ``exclude``."""
    sa, sb = a.cell_set(), b.cell_set()
    if exclude is not None:
        sa = {c for c in sa if not exclude[c]}
        sb = {c for c in sb if not exclude[c]}
    union = sa | sb
    return 1.0 if not union else len(sa & sb) / len(union)


def boundary_band(probabilities, lo: float = 0.01, hi: float = 0.99, dilate: int = 1) -> np.ndarray:
    """Buckets whose confidence is strictly between ``lo`` and ``hi`` in any grid, dilated."""
    band = np.zeros(np.shape(probabilities[0]), dtype=bool)
    for p in probabilities:
        p = np.asarray(p, dtype=float)
        band |= (p > lo) & (p < hi)
    if dilate > 0 and band.any():
        band = binary_dilation(band, structure=np.ones((3, 3), bool), iterations=dilate)
    return band


def fold_database(db: PerformanceDatabase, folds: int, j: int) -> PerformanceDatabase:
    """Drop samples with ``index % folds == j`` from every record."""
    return db.with_samples(lambda r: [s for i, s in enumerate(r.samples) if i % folds != j])


@dataclass
class CrossValReport:
    """Per-fold optimized-support regions and their pairwise agreement."""

    folds: int
    theta: float
    T: float
    regions: list[Region]
    supports: list[int]
    hits: list[int]
    grids: list[HitGrid] = field(repr=False)
    excluded: list[list[tuple[float, float]]] = field(default_factory=list)
    jaccard: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def min_jaccard(self) -> float:
        return min(self.jaccard.values()) if self.jaccard else 1.0

    @property
    def support_spread(self) -> float:
        """(max - min) / max of the per-fold supports."""
        if not self.supports or max(self.supports) == 0:
            return 0.0
        return (max(self.supports) - min(self.supports)) / max(self.supports)

    def to_dict(self) -> dict:
        return {
            "folds": self.folds,
            "theta": self.theta,
            "T": self.T,
            "regions": [
                {
                    "support": s,
                    "hit": h,
                    "confidence": (h / s) if s else None,
                    "columns": [{"x": r.left + k, "s": a, "t": b} for k, (a, b) in enumerate(r.intervals)],
                    "excluded_points": [list(p) for p in ex],
                }
                for r, s, h, ex in zip(self.regions, self.supports, self.hits, self.excluded)
            ],
            "jaccard": [{"i": i, "j": j, "value": v} for (i, j), v in sorted(self.jaccard.items())],
            "min_jaccard": self.min_jaccard,
            "support_spread": self.support_spread,
        }


def _short(rec: PointRecord) -> bool:
    return rec.n < 2


def cross_validate(db: PerformanceDatabase, folds: int = 3, T: float = 1e-3, theta: float = 0.99,
                   missing: str = "exclude") -> CrossValReport:
    """Mine one optimized-support region per fold and compare them.

    Fold ``j`` keeps every sample whose index is not congruent to ``j`` modulo
    ``folds``. Mirrored cells share their original's sample list, so they are
    split identically. Points left with fewer than two samples are excluded
    from that fold's confidence map (masked) and listed in ``excluded``.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    regions, supports, hits, grids, excluded = [], [], [], [], []
    for j in range(folds):
        fdb = fold_database(db, folds, j)
        short = [(r.point.s1_db, r.point.s2_db) for r in fdb if _short(r)]
        if short:
            logger.warning("fold %d: %d points left with < 2 samples are excluded", j, len(short))
        grid = confidence_map(fdb, T)
        res = search_support(grid, theta, missing)
        region = res.region if res.region is not None else Region.empty()
        h, s = region_stats(grid, region)
        regions.append(region)
        supports.append(s)
        hits.append(h)
        grids.append(grid)
        excluded.append(short)
    pairs = {(i, k): jaccard(regions[i], regions[k]) for i, k in itertools.combinations(range(folds), 2)}
    return CrossValReport(folds, theta, T, regions, supports, hits, grids, excluded, pairs)
