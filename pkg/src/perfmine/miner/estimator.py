"""Estimator wrapper around the region optimizers."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..validation import check_hit_grid
from .dp import MISSING_POLICIES, as_fraction, optimize_gain
from .region import Region, region_stats
from .search import search_confidence, search_support

__all__ = ["RegionMiner", "NoRegionError", "OBJECTIVES"]

OBJECTIVES = ("gain", "support", "confidence")


class NoRegionError(RuntimeError):
    """No admissible region meets the requested constraint."""


class RegionMiner(BaseEstimator):
    """Mine an admissible bucket region from a hit grid.

    Parameters
    ----------
    objective : {"gain", "support", "confidence"}, default="support"
        ``gain`` maximizes H - tau S at fixed ``tau``; ``support`` finds the
        largest region with confidence >= ``theta``; ``confidence`` finds the
        most confident region with at least ``min_support`` buckets.
    tau : float, default=0.5
    theta : float, default=0.99
    min_support : int, default=1
        Minimum number of buckets for the confidence objective.
    missing : {"exclude", "zero"}, default="exclude"
        Masked buckets are either never covered or treated as hit 0.

    Attributes
    ----------
    region_ : Region
        Empty when nothing qualifies (``found_`` is then False).
    tau_ : Fraction or None
    hit_, support_ : int
    confidence_ : float
    mask_ : ndarray of bool
    """

    def __init__(self, objective="support", tau=0.5, theta=0.99, min_support=1, missing="exclude"):
        self.objective = objective
        self.tau = tau
        self.theta = theta
        self.min_support = min_support
        self.missing = missing

    def fit(self, X, y=None):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.missing not in MISSING_POLICIES:
            raise ValueError(f"missing must be one of {MISSING_POLICIES}, got {self.missing!r}")
        grid = check_hit_grid(X)
        self.trace_ = []
        if self.objective == "gain":
            tau = as_fraction(self.tau)
            region = optimize_gain(grid, tau, self.missing)
        elif self.objective == "support":
            res = search_support(grid, self.theta, self.missing)
            region, tau, self.trace_ = res.region, res.tau, res.trace
        else:
            if not 0 <= int(self.min_support) <= grid.size:
                raise ValueError(f"min_support must lie in [0, {grid.size}]")
            res = search_confidence(grid, grid.scale * int(self.min_support), self.missing)
            region, tau, self.trace_ = res.region, res.tau, res.trace
        self.found_ = region is not None and not region.is_empty
        self.region_ = region if region is not None else Region.empty()
        self.tau_ = tau
        self.hit_, self.support_ = region_stats(grid, self.region_)
        self.confidence_ = self.hit_ / self.support_ if self.support_ else float("nan")
        self.shape_ = grid.shape
        self.mask_ = self.region_.mask(grid.shape)
        return self

    def gain(self, tau=None) -> Fraction:
        """Exact gain of the fitted region at ``tau`` (default: the fitted tau)."""
        check_is_fitted(self, "region_")
        t = self.tau_ if tau is None else as_fraction(tau)
        if t is None:
            raise NoRegionError("no tau available for an unsuccessful search")
        return self.hit_ - t * self.support_

    def predict(self, X) -> np.ndarray:
        """Membership of ``(column, row)`` bucket indices in the fitted region."""
        check_is_fitted(self, "region_")
        idx = np.asarray(X, dtype=np.int64).reshape(-1, 2)
        out = np.zeros(len(idx), dtype=bool)
        inside = (idx[:, 0] >= 0) & (idx[:, 0] < self.shape_[0]) & (idx[:, 1] >= 0) & (idx[:, 1] < self.shape_[1])
        out[inside] = self.mask_[idx[inside, 0], idx[inside, 1]]
        return out
