"""Database CSV and region JSON formats."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from pathlib import Path

import numpy as np

from .bucketing import HitGrid
from .miner.region import Region, region_stats
from .sampler import Grid, PerformanceDatabase, PointRecord
from .simgen import PointConfig
from .stats import BerSample

__all__ = [
    "DB_HEADER",
    "TIE_BREAK",
    "dumps_database",
    "loads_database",
    "save_database",
    "load_database",
    "region_document",
    "region_from_document",
    "save_region",
    "load_region",
    "write_matrix",
]

DB_HEADER = ("s1_db", "s2_db", "sample_idx", "bits", "errors", "mirrored")
TIE_BREAK = "gain, then larger support, then smallest (first column, bottoms, tops)"


def _num(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2**53 else repr(v)


def dumps_database(db: PerformanceDatabase) -> str:
    """Serialize one row per sample block, sorted by point then sample index."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DB_HEADER)
    for p in sorted(db.records, key=lambda q: (q.s1_db, q.s2_db)):
        rec = db.records[p]
        for k, s in enumerate(rec.samples):
            w.writerow([repr(float(p.s1_db)), repr(float(p.s2_db)), k, s.bits, _num(s.errors), int(rec.mirrored)])
    return buf.getvalue()


def _parse_count(text: str):
    try:
        return int(text)
    except ValueError:
        v = float(text)
        if not math.isfinite(v):
            raise ValueError(f"invalid error count {text!r}")
        return v


def loads_database(text: str) -> PerformanceDatabase:
    """Inverse of :func:`dumps_database`; the grid is the cross product of the
    distinct s1 and s2 values present."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != DB_HEADER:
        raise ValueError(f"database header must be {','.join(DB_HEADER)}")
    samples: dict[PointConfig, dict[int, BerSample]] = defaultdict(dict)
    mirrored: dict[PointConfig, bool] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(DB_HEADER):
            raise ValueError(f"line {lineno}: expected {len(DB_HEADER)} fields, got {len(row)}")
        s1, s2, idx, bits, errors, mir = row
        p = PointConfig(float(s1), float(s2))
        k = int(idx)
        if k in samples[p]:
            raise ValueError(f"line {lineno}: duplicate sample {k} at {p}")
        if mir not in ("0", "1"):
            raise ValueError(f"line {lineno}: mirrored must be 0 or 1")
        m = mir == "1"
        if mirrored.setdefault(p, m) != m:
            raise ValueError(f"line {lineno}: inconsistent mirrored flag at {p}")
        samples[p][k] = BerSample(_parse_count(errors), int(bits))
    if not samples:
        raise ValueError("database has no rows")
    xs = sorted({p.s1_db for p in samples})
    ys = sorted({p.s2_db for p in samples})
    db = PerformanceDatabase(Grid(tuple(xs), tuple(ys)))
    for p in sorted(samples, key=lambda q: (q.s1_db, q.s2_db)):
        by_idx = samples[p]
        if sorted(by_idx) != list(range(len(by_idx))):
            raise ValueError(f"sample indices at {p} are not 0..n-1")
        db.add(PointRecord(p, [by_idx[k] for k in range(len(by_idx))], None, mirrored[p]))
    return db


def save_database(db: PerformanceDatabase, path) -> None:
    Path(path).write_text(dumps_database(db))


def load_database(path) -> PerformanceDatabase:
    return loads_database(Path(path).read_text())


def region_document(region: Region | None, grid: HitGrid, *, objective: str, tau, theta, T,
                    missing: str, min_support=None) -> dict:
    """JSON-ready description of a mined region, columns in grid (dB) units."""
    region = region if region is not None else Region.empty()
    h, s = region_stats(grid, region)
    cols = [
        {"x": float(grid.xs[region.left + k]), "s": float(grid.ys[a]), "t": float(grid.ys[b])}
        for k, (a, b) in enumerate(region.intervals)
    ]
    return {
        "objective": objective,
        "tau_final": None if tau is None else float(tau),
        "theta": None if theta is None else float(theta),
        "min_support": min_support,
        "T": float(T),
        "support": s,
        "hit": h,
        "confidence": (h / s) if s else None,
        "n_buckets": region.n_buckets,
        "columns": cols,
        "grid": {"xs": [float(v) for v in grid.xs], "ys": [float(v) for v in grid.ys]},
        "missing_policy": missing,
        "tie_break": TIE_BREAK,
    }


def region_from_document(doc: dict) -> Region:
    """Rebuild the bucket-index region from a document's dB columns."""
    xs = [float(v) for v in doc["grid"]["xs"]]
    ys = [float(v) for v in doc["grid"]["ys"]]
    cols = doc["columns"]
    if not cols:
        return Region.empty()
    left = xs.index(float(cols[0]["x"]))
    for k, c in enumerate(cols):
        if xs.index(float(c["x"])) != left + k:
            raise ValueError("region columns are not consecutive")
    return Region(left, tuple((ys.index(float(c["s"])), ys.index(float(c["t"]))) for c in cols))


def save_region(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_region(path) -> dict:
    return json.loads(Path(path).read_text())


def write_matrix(path, values: np.ndarray, xs, ys, fmt=repr) -> None:
    """CSV matrix: header row of s2 values, one row per s1 value; NaN as ``nan``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s1_db\\s2_db"] + [repr(float(y)) for y in ys])
        for x, row in zip(xs, values):
            w.writerow([repr(float(x))] + ["nan" if (isinstance(v, float) and math.isnan(v)) else fmt(v) for v in row.tolist()])
