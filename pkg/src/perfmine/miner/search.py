"""Optimized-support and optimized-confidence regions by binary search on tau.

Raising tau trades support for confidence in the optimized-gain region, so
both constrained problems are approached by bisecting tau and keeping the
best qualifying region seen. The result is approximate: a constrained optimum
need not be an optimized-gain region for any tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..bucketing import BucketEstimate, HitGrid
from ..stats import InsufficientDataError, student_t_cdf
from .dp import exact, optimize_gain
from .region import Region, region_stats

__all__ = [
    "SearchResult",
    "tau_precision",
    "search_support",
    "search_confidence",
    "optimize_support",
    "optimize_confidence",
    "model_based_region_confidence",
]


@dataclass
class SearchResult:
    """Outcome of a tau bisection.

    ``trace`` lists ``(tau, support, hit)`` for every optimized-gain region
    evaluated, in visiting order.
    """

    region: Region | None
    tau: Fraction | None
    hit: int = 0
    support: int = 0
    trace: list[tuple[Fraction, int, int]] = field(default_factory=list)

    @property
    def confidence(self) -> float:
        return self.hit / self.support if self.support else float("nan")


def tau_precision(grid: HitGrid) -> Fraction:
    """Bisection stops once the tau bracket is narrower than ``(scale * M) ** -2``."""
    return Fraction(1, (grid.scale * grid.size) ** 2)


def _evaluate(grid, tau, missing, trace):
    r = optimize_gain(grid, tau, missing)
    h, s = region_stats(grid, r)
    trace.append((tau, s, h))
    return r, h, s


def search_support(grid: HitGrid, theta, missing: str = "exclude") -> SearchResult:
    """Largest visited region with confidence at least ``theta``."""
    theta = exact(theta)
    if not 0 <= theta <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    trace: list = []
    best = None

    def consider(tau):
        nonlocal best
        r, h, s = _evaluate(grid, tau, missing, trace)
        ok = s > 0 and h * theta.denominator >= theta.numerator * s
        if ok:
            key = (s, h)
            if best is None or key > best[0] or (key == best[0] and r.sort_key() < best[1].sort_key()):
                best = (key, r, tau)
        return ok

    # every non-empty optimized-gain region at tau = theta already qualifies
    lo, hi = Fraction(0), theta
    if not consider(lo):
        consider(hi)
        eps = tau_precision(grid)
        while hi - lo > eps:
            mid = (lo + hi) / 2
            if consider(mid):
                hi = mid
            else:
                lo = mid
    if best is None:
        return SearchResult(None, None, trace=trace)
    (s, h), r, tau = best
    return SearchResult(r, tau, h, s, trace)


def search_confidence(grid: HitGrid, min_support: int, missing: str = "exclude") -> SearchResult:
    """Most confident visited region with support at least ``min_support``.

    ``min_support`` is in support units (``scale`` per bucket); an empty region
    never qualifies.
    """
    if min_support < 0:
        raise ValueError("min_support must be non-negative")
    trace: list = []
    best = None

    def consider(tau):
        nonlocal best
        r, h, s = _evaluate(grid, tau, missing, trace)
        ok = s > 0 and s >= min_support
        if ok:
            key = (Fraction(h, s), s)
            if best is None or key > best[0] or (key == best[0] and r.sort_key() < best[1].sort_key()):
                best = (key, r, tau, h, s)
        return ok

    lo, hi = Fraction(0), Fraction(1)
    if consider(lo) and not consider(hi):
        eps = tau_precision(grid)
        while hi - lo > eps:
            mid = (lo + hi) / 2
            if consider(mid):
                lo = mid
            else:
                hi = mid
    if best is None:
        return SearchResult(None, None, trace=trace)
    _, r, tau, h, s = best
    return SearchResult(r, tau, h, s, trace)


def optimize_support(grid: HitGrid, theta, missing: str = "exclude") -> Region | None:
    """Approximate maximum-support admissible region with confidence >= ``theta``."""
    return search_support(grid, theta, missing).region


def optimize_confidence(grid: HitGrid, min_buckets: int, missing: str = "exclude") -> Region | None:
    """Approximate maximum-confidence admissible region covering >= ``min_buckets`` buckets."""
    if not 0 <= min_buckets <= grid.size:
        raise ValueError(f"min_buckets must lie in [0, {grid.size}]")
    return search_confidence(grid, grid.scale * min_buckets, missing).region


def model_based_region_confidence(
    buckets: Sequence[BucketEstimate], weights: Sequence[float] | None, T: float
) -> float:
    """P(E[Q] < T) for the weighted region variable Q = sum(w B) / W.

    Uses the t law with ``eta - 1`` degrees of freedom, ``eta`` being the
    number of buckets; a zero variance gives the degenerate limit {0, 0.5, 1}.

    Parameters
    ----------
    buckets : sequence of BucketEstimate
    weights : sequence of float or None
        Positive bucket weights; None means equal weights.
    T : float
        Performance threshold.
    """
    eta = len(buckets)
    if eta < 2:
        raise InsufficientDataError("region confidence needs at least 2 buckets")
    w = [1.0] * eta if weights is None else [float(v) for v in weights]
    if len(w) != eta:
        raise ValueError(f"{eta} buckets but {len(w)} weights")
    if any(not v > 0 for v in w):
        raise ValueError("weights must be positive")
    W = math.fsum(w)
    q = math.fsum(wi * b.mean for wi, b in zip(w, buckets)) / W
    psi2 = math.fsum(wi * wi * b.variance for wi, b in zip(w, buckets)) / (W * W)
    if psi2 == 0.0:
        return 1.0 if q < T else (0.0 if q > T else 0.5)
    return student_t_cdf((T - q) / (math.sqrt(psi2) / math.sqrt(eta)), eta - 1)
