"""Local linear regression with tricube weights on scattered 2D data."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

__all__ = ["LoessSurface", "loess_fit", "tricube", "surface_from_database"]


def tricube(u):
    """``(1 - |u|^3)^3`` on ``|u| < 1``, zero outside."""
    u = np.abs(np.asarray(u, dtype=float))
    return np.where(u < 1.0, (1.0 - u**3) ** 3, 0.0)


class LoessSurface(RegressorMixin, BaseEstimator):
    """Tricube-weighted local plane fit over the ``span`` nearest neighbours.

    At a query ``q`` the ``k = ceil(span * n)`` nearest training points (Euclidean
    distance) are weighted by ``tricube(d / d_max)``, ``d_max`` being the k-th
    neighbour distance, and a weighted least-squares plane centred at ``q`` is
    solved; its intercept is the prediction. If the weighted design is rank
    deficient the weighted mean is returned instead and the query is flagged
    in ``fallback_``.

    Parameters
    ----------
    span : float, default=0.05
        Neighbourhood size as a fraction of the training set.
    """

    def __init__(self, span: float = 0.05):
        self.span = span

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 input columns, got {X.shape[1]}")
        if not 0 < self.span <= 1:
            raise ValueError(f"span must lie in (0, 1], got {self.span}")
        k = math.ceil(self.span * len(X) - 1e-12)
        if k < 3:
            raise ValueError(f"span {self.span} with {len(X)} points gives {k} < 3 neighbours")
        self.X_ = X
        self.y_ = y
        self.k_ = k
        self.n_features_in_ = 2
        self.tree_ = cKDTree(X)
        try:
            self.hull_ = Delaunay(X)
        except QhullError as exc:
            raise ValueError("training points are collinear or degenerate") from exc
        return self

    def _predict_one(self, q: np.ndarray) -> tuple[float, bool]:
        d, idx = self.tree_.query(q, k=self.k_)
        d = np.atleast_1d(d)
        idx = np.atleast_1d(idx)
        dmax = d[-1]
        w = tricube(d / dmax) if dmax > 0 else np.ones_like(d)
        z = self.y_[idx]
        A = np.column_stack([np.ones_like(d), self.X_[idx] - q])
        sw = np.sqrt(w)
        coef, _, rank, _ = np.linalg.lstsq(A * sw[:, None], z * sw, rcond=None)
        if rank < 3:
            return float(w @ z / w.sum()), True
        return float(coef[0]), False

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "tree_")
        X = check_array(X, dtype=np.float64)
        out = np.empty(len(X))
        flags = np.zeros(len(X), dtype=bool)
        for i, q in enumerate(X):
            out[i], flags[i] = self._predict_one(q)
        self.fallback_ = flags
        return out

    def in_hull(self, X) -> np.ndarray:
        check_is_fitted(self, "hull_")
        X = check_array(X, dtype=np.float64)
        return self.hull_.find_simplex(X, tol=1e-9) >= 0


def loess_fit(X, z, span: float = 0.05) -> LoessSurface:
    return LoessSurface(span=span).fit(X, z)


def surface_from_database(db, span: float = 0.05) -> LoessSurface:
    """Fit log10 of each point's mean BER over (s1_db, s2_db)."""
    X, z = [], []
    for rec in db:
        if rec.n == 0:
            continue
        X.append((rec.point.s1_db, rec.point.s2_db))
        z.append(math.log10(float(np.mean(rec.values))))
    return loess_fit(np.array(X), np.array(z), span)
