"""Optimized connected rectilinear region mining on bucket hit grids."""

from .dp import MISSING_POLICIES, optimize_gain
from .estimator import NoRegionError, RegionMiner
from .region import Region, is_admissible, region_gain, region_stats
from .search import (
    model_based_region_confidence,
    optimize_confidence,
    optimize_support,
    search_confidence,
    search_support,
)

__all__ = [
    "MISSING_POLICIES",
    "NoRegionError",
    "Region",
    "RegionMiner",
    "is_admissible",
    "model_based_region_confidence",
    "optimize_confidence",
    "optimize_gain",
    "optimize_support",
    "region_gain",
    "region_stats",
    "search_confidence",
    "search_support",
]
