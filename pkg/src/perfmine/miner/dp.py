"""Optimized-gain admissible region by dynamic programming.

Columns are processed right to left. For every column ``c`` and row interval
``[s, t]`` we keep the best region whose leftmost column is ``c`` with that
interval, separately for four boundary phases seen left to right:

    W  top rising,  bottom falling   (widening)
    U  top rising,  bottom rising    (slanting up)
    D  top falling, bottom falling   (slanting down)
    N  top falling, bottom rising    (narrowing)

A region in phase X at column c continues into column c + 1 in a phase Y
reachable from X (W -> W/U/D/N, U -> U/N, D -> D/N, N -> N) with an interval
that overlaps [s, t] and moves each boundary in the direction X dictates.
Every nested max reduces to cumulative maxima, so each column costs
O(M_Y^2) per phase.

Gains are compared exactly. With ``tau = num / den`` each bucket carries the
integer key ``(h * den - num * scale) * K + 1`` where ``K = M + 1``; summing
keys over a region gives ``G * den * K + eta``, so one integer comparison
orders regions by gain and then by support. Remaining ties go to the smallest
first column, then the lexicographically smallest bottom and top sequences.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..bucketing import HitGrid
from .region import Region

__all__ = ["optimize_gain", "as_fraction", "exact", "MISSING_POLICIES"]

MISSING_POLICIES = ("exclude", "zero")

W, U, D, N = range(4)
# phases allowed in the next column, reading left to right
_NEXT = {W: (W, U, D, N), U: (U, N), D: (D, N), N: (N,)}


def exact(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (read by its shortest repr)."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {value!r}")
    return Fraction(repr(v))


def as_fraction(tau) -> Fraction:
    f = exact(tau)
    if not 0 <= f <= 1:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    return f


def _cummax(a: np.ndarray, axis: int, reverse: bool = False) -> np.ndarray:
    if reverse:
        a = np.flip(a, axis=axis)
        return np.flip(np.maximum.accumulate(a, axis=axis), axis=axis)
    return np.maximum.accumulate(a, axis=axis)


class _Tables:
    def __init__(self, grid: HitGrid, tau: Fraction, missing: str):
        if missing not in MISSING_POLICIES:
            raise ValueError(f"missing must be one of {MISSING_POLICIES}, got {missing!r}")
        mx, my = grid.shape
        self.mx, self.my = mx, my
        num, den = tau.numerator, tau.denominator
        K = mx * my + 1
        bound = 2 * grid.scale * max(den, num, 1) * K * (mx * my + 1)
        dtype = np.int64 if bound < 2**62 else object
        self.neg = -(bound * 4) if dtype is object else -(2**62)

        hits = grid.hits.astype(object if dtype is object else np.int64)
        cell = (hits * den - num * grid.scale) * K + 1
        blocked = grid.mask if missing == "exclude" else np.zeros(grid.shape, bool)

        s_idx, t_idx = np.indices((my, my))
        self.invalid_order = s_idx > t_idx
        self.base = []
        for c in range(mx):
            pref = np.concatenate([np.zeros(1, dtype=cell.dtype), np.cumsum(cell[c])])
            g = pref[t_idx + 1] - pref[s_idx]
            bpref = np.concatenate([[0], np.cumsum(blocked[c].astype(int))])
            bad = self.invalid_order | ((bpref[t_idx + 1] - bpref[s_idx]) > 0)
            g = np.where(bad, self.neg, g)
            if dtype is object:
                g = g.astype(object)
            self.base.append((g, bad))

        self.f: list[list[np.ndarray]] = [None] * mx  # f[c][phase] -> (my, my)
        self._fill()

    def _best_pred(self, nxt: list[np.ndarray]) -> list[np.ndarray]:
        """Best continuation value into column c + 1, per phase of column c."""
        neg = self.neg
        a_n = nxt[N]
        a_u = np.maximum(nxt[U], a_n)
        a_d = np.maximum(nxt[D], a_n)
        a_w = np.maximum(np.maximum(a_u, a_d), nxt[W])
        # Read left to right from column c: the successor (s', t') of (s, t).
        # W: s' <= s, t' >= t (successor contains).
        best_w = _cummax(_cummax(a_w, 0), 1, reverse=True)
        # U: s' >= s, t' >= t, s' <= t.
        q = _cummax(a_u, 1, reverse=True)
        q = np.where(self.invalid_order, neg, q)  # keep s' <= t (row s', column t)
        best_u = _cummax(q, 0, reverse=True)
        # D: s' <= s, t' <= t, t' >= s.
        p = _cummax(a_d, 0)
        p = np.where(self.invalid_order, neg, p)  # keep t' >= s (row s, column t')
        best_d = _cummax(p, 1)
        # N: s' >= s, t' <= t (successor contained).
        best_n = _cummax(_cummax(a_n, 0, reverse=True), 1)
        return [best_w, best_u, best_d, best_n]

    def _fill(self):
        neg = self.neg
        for c in range(self.mx - 1, -1, -1):
            g, bad = self.base[c]
            if c == self.mx - 1:
                preds = [np.full_like(g, neg) for _ in range(4)]
            else:
                preds = self._best_pred(self.f[c + 1])
            self.f[c] = [np.where(bad, neg, g + np.maximum(pr, 0)) for pr in preds]

    def successors(self, c: int, phase: int, s: int, t: int, need) -> list[tuple[int, int, int]]:
        """States at column c + 1 that realise continuation value ``need``."""
        my = self.my
        sp, tp = np.indices((my, my))
        if phase == W:
            geo = (sp <= s) & (tp >= t)
        elif phase == U:
            geo = (sp >= s) & (tp >= t) & (sp <= t)
        elif phase == D:
            geo = (sp <= s) & (tp <= t) & (tp >= s)
        else:
            geo = (sp >= s) & (tp <= t)
        geo &= ~self.invalid_order
        out = []
        nxt = self.f[c + 1]
        for y in _NEXT[phase]:
            hit = geo & (nxt[y] == need)
            for a, b in zip(*np.nonzero(hit)):
                out.append((y, int(a), int(b)))
        return out


def optimize_gain(grid: HitGrid, tau, missing: str = "exclude") -> Region:
    """Admissible region maximizing ``H - tau * S``.

    Ties go to larger support, then to :meth:`Region.sort_key` order. The empty
    region (gain 0) is returned when every non-empty region has negative gain.
    """
    tab = _Tables(grid, as_fraction(tau), missing)
    best = None
    for c in range(tab.mx):
        for phase in range(4):
            v = tab.f[c][phase].max()
            if best is None or v > best:
                best = v
    if best <= 0:
        return Region.empty()

    @lru_cache(maxsize=None)
    def completion(c: int, phase: int, s: int, t: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Lexicographically smallest (bottoms, tops) among optimal completions."""
        need = tab.f[c][phase][s, t] - tab.base[c][0][s, t]
        if need == 0:
            return (s,), (t,)
        options = []
        for y, a, b in tab.successors(c, phase, s, t, need):
            bs, ts = completion(c + 1, y, a, b)
            options.append(((s,) + bs, (t,) + ts))
        return min(options)

    for c in range(tab.mx):
        starts = []
        for phase in range(4):
            for s, t in zip(*np.nonzero(tab.f[c][phase] == best)):
                starts.append(completion(c, phase, int(s), int(t)))
        if starts:
            bottoms, tops = min(starts)
            return Region(c, tuple(zip(bottoms, tops)))
    raise AssertionError("optimum not found during reconstruction")
