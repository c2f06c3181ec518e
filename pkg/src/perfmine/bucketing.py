"""Bucket-level aggregation: priors, mixture statistics, confidences and hits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .sampler import PerformanceDatabase, PointRecord
from .simgen import PointConfig
from .stats import InsufficientDataError, PointEstimate, point_estimate, student_t_cdf

__all__ = [
    "HIT_SCALE",
    "MissingBucketError",
    "BucketGrid",
    "BucketEstimate",
    "HitGrid",
    "estimate_priors",
    "bucket_estimate",
    "bucket_confidence",
    "hit",
    "confidence_map",
    "ConfidenceMapper",
]

HIT_SCALE = 1000


class MissingBucketError(ValueError):
    """A bucket has no usable member points."""


@dataclass(frozen=True)
class BucketEstimate:
    mean: float
    variance: float
    n_total: int
    priors: tuple[float, ...]

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass
class HitGrid:
    """Bucket hits on an ``(M_X, M_Y)`` lattice.

    ``hits[i, j]`` belongs to column ``xs[i]`` and row ``ys[j]``. Missing
    buckets are flagged in ``mask`` (True = missing); their hit is stored as 0
    but must not be read as data.
    """

    hits: np.ndarray
    mask: np.ndarray
    probabilities: np.ndarray | None = None
    xs: tuple | None = None
    ys: tuple | None = None
    scale: int = HIT_SCALE

    def __post_init__(self):
        self.hits = np.asarray(self.hits, dtype=np.int64)
        if self.hits.ndim != 2 or 0 in self.hits.shape:
            raise ValueError(f"hit grid must be a non-empty 2D array, got shape {self.hits.shape}")
        self.mask = np.broadcast_to(np.asarray(self.mask, dtype=bool), self.hits.shape).copy()
        if np.any((self.hits < 0) | (self.hits > self.scale)):
            raise ValueError(f"hits must lie in [0, {self.scale}]")
        self.hits = np.where(self.mask, 0, self.hits)
        if self.xs is None:
            self.xs = tuple(range(self.hits.shape[0]))
        if self.ys is None:
            self.ys = tuple(range(self.hits.shape[1]))
        if (len(self.xs), len(self.ys)) != self.hits.shape:
            raise ValueError("axis labels do not match the hit array shape")

    @classmethod
    def from_hits(cls, hits, mask=None, scale: int = HIT_SCALE) -> "HitGrid":
        hits = np.asarray(hits)
        return cls(hits=hits, mask=np.zeros(hits.shape, bool) if mask is None else mask, scale=scale)

    @property
    def shape(self) -> tuple[int, int]:
        return self.hits.shape

    @property
    def size(self) -> int:
        return self.hits.size

    @property
    def support(self) -> int:
        """Support of one bucket."""
        return self.scale

    def transpose(self) -> "HitGrid":
        probs = None if self.probabilities is None else self.probabilities.T.copy()
        return HitGrid(self.hits.T.copy(), self.mask.T.copy(), probs, self.ys, self.xs, self.scale)


class BucketGrid:
    """Bijective map from bucket labels ``(x, y)`` to lattice cells.

    ``key`` maps a point to its bucket label; the default puts every point in
    its own bucket.
    """

    def __init__(self, xs: Sequence, ys: Sequence, key: Callable[[PointConfig], tuple] | None = None):
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        self.key = key
        self._xi = {x: i for i, x in enumerate(self.xs)}
        self._yi = {y: j for j, y in enumerate(self.ys)}
        if len(self._xi) != len(self.xs) or len(self._yi) != len(self.ys):
            raise ValueError("bucket axis labels must be unique")

    @classmethod
    def identity(cls, db: PerformanceDatabase) -> "BucketGrid":
        return cls(db.grid.xs, db.grid.ys)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)

    def cell(self, p: PointConfig) -> tuple[int, int] | None:
        label = (p.s1_db, p.s2_db) if self.key is None else self.key(p)
        i = self._xi.get(label[0])
        j = self._yi.get(label[1])
        if i is None or j is None:
            return None
        return i, j

    def members(self, db: PerformanceDatabase) -> dict[tuple[int, int], list[PointRecord]]:
        out: dict[tuple[int, int], list[PointRecord]] = {}
        for rec in db:
            c = self.cell(rec.point)
            if c is not None:
                out.setdefault(c, []).append(rec)
        return out


def estimate_priors(counts: Sequence[int]) -> np.ndarray:
    """Priors proportional to per-point sample counts."""
    c = np.asarray(counts, dtype=float)
    if c.size == 0:
        raise MissingBucketError("bucket has no member points")
    if np.any(c < 1):
        raise ValueError("sample counts must be >= 1")
    return c / c.sum()


def bucket_estimate(points: Sequence[PointEstimate], priors: Sequence[float] | None = None) -> BucketEstimate:
    """Mixture mean and variance of independent point estimates.

    With count-based priors the mean equals the grand mean of all member
    observations; the variance is the prior-weighted sum of point variances,
    not the pooled sample variance.
    """
    if len(points) == 0:
        raise MissingBucketError("bucket has no member points")
    if priors is None:
        priors = estimate_priors([p.n for p in points])
    p = np.asarray(priors, dtype=float)
    if p.shape != (len(points),):
        raise ValueError(f"{len(points)} points but {p.size} priors")
    if np.any(p < 0) or not math.isclose(p.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("priors must be non-negative and sum to 1")
    means = np.array([e.mean for e in points])
    variances = np.array([e.variance for e in points])
    return BucketEstimate(
        mean=float(p @ means),
        variance=float((p * p) @ variances),
        n_total=int(sum(e.n for e in points)),
        priors=tuple(float(v) for v in p),
    )


def bucket_confidence(est: BucketEstimate, T: float) -> float:
    """P(E[B] < T) via the t law with N - 1 degrees of freedom."""
    if est.n_total < 2:
        raise InsufficientDataError("bucket needs at least 2 observations")
    if est.variance == 0.0:
        return 1.0 if est.mean < T else (0.0 if est.mean > T else 0.5)
    return student_t_cdf((T - est.mean) / (est.sd / math.sqrt(est.n_total)), est.n_total - 1)


def hit(confidence: float, scale: int = HIT_SCALE) -> int:
    """Discretised confidence ``floor(scale * P + 0.5)``."""
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"confidence must lie in [0, 1], got {confidence}")
    return int(math.floor(scale * confidence + 0.5))


def _bucket_probability(records: list[PointRecord], T: float) -> float | None:
    ests = []
    for rec in records:
        try:
            ests.append(point_estimate(rec.samples))
        except InsufficientDataError:
            continue
    if not ests:
        return None
    return bucket_confidence(bucket_estimate(ests), T)


def confidence_map(
    db: PerformanceDatabase,
    T: float,
    buckets: BucketGrid | None = None,
    scale: int = HIT_SCALE,
) -> HitGrid:
    """Bucket confidences and hits over the bucket lattice.

    Points with fewer than two samples are ignored; buckets left without
    members are masked.
    """
    if not T > 0:
        raise ValueError("threshold must be positive")
    buckets = BucketGrid.identity(db) if buckets is None else buckets
    probs = np.full(buckets.shape, np.nan)
    for (i, j), recs in buckets.members(db).items():
        pr = _bucket_probability(recs, T)
        if pr is not None:
            probs[i, j] = pr
    mask = np.isnan(probs)
    hits = np.zeros(buckets.shape, dtype=np.int64)
    hits[~mask] = np.floor(scale * probs[~mask] + 0.5).astype(np.int64)
    return HitGrid(hits, mask, probs, buckets.xs, buckets.ys, scale)


class ConfidenceMapper(TransformerMixin, BaseEstimator):
    """Transformer turning a :class:`PerformanceDatabase` into a :class:`HitGrid`.

    Parameters
    ----------
    threshold : float, default=1e-3
        Performance threshold T on the expected BEP.
    scale : int, default=1000
        Discretisation constant (support of one bucket).
    buckets : BucketGrid or None
        Bucket layout; None means one bucket per grid point.
    """

    def __init__(self, threshold: float = 1e-3, scale: int = HIT_SCALE, buckets: BucketGrid | None = None):
        self.threshold = threshold
        self.scale = scale
        self.buckets = buckets

    def fit(self, X: PerformanceDatabase, y=None):
        if not isinstance(X, PerformanceDatabase):
            raise TypeError(f"expected a PerformanceDatabase, got {type(X).__name__}")
        if len(X) == 0:
            raise ValueError("empty performance database")
        self.buckets_ = BucketGrid.identity(X) if self.buckets is None else self.buckets
        self.n_buckets_ = self.buckets_.shape[0] * self.buckets_.shape[1]
        return self

    def transform(self, X: PerformanceDatabase) -> HitGrid:
        check_is_fitted(self, "buckets_")
        return confidence_map(X, self.threshold, self.buckets_, self.scale)
