"""Post-processing of performance databases: fitted surfaces and region stability checks."""

from .crossval import CrossValReport, boundary_band, cross_validate, fold_database, jaccard
from .ecdf import ecdf, ecdf_quantile
from .loess import LoessSurface, loess_fit, surface_from_database, tricube
from .slices import SliceCurve, slice_fixed_alpha, slice_fixed_S

__all__ = [
    "CrossValReport",
    "LoessSurface",
    "SliceCurve",
    "boundary_band",
    "cross_validate",
    "ecdf",
    "ecdf_quantile",
    "fold_database",
    "jaccard",
    "loess_fit",
    "slice_fixed_S",
    "slice_fixed_alpha",
    "surface_from_database",
    "tricube",
]
