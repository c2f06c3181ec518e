"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 no qualifying region, 3 I/O error.
``PERFMINE_JOBS`` sets the default worker count for ``simulate``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import cross_validate, ecdf, slice_fixed_alpha, slice_fixed_S, surface_from_database
from .bucketing import confidence_map
from .io import load_database, region_document, save_database, save_region, write_matrix
from .miner import RegionMiner
from .sampler import Grid, diagnostics, sweep
from .simgen import MonteCarloSimulator, PointConfig, SyntheticSimulator
from .stats import StoppingConfig

EXIT_OK, EXIT_USAGE, EXIT_NO_REGION, EXIT_IO = 0, 1, 2, 3
JOBS_ENV = "PERFMINE_JOBS"

log = logging.getLogger("perfmine")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> tuple[float, float, float]:
    """``lo:hi:step`` with ``step > 0`` and ``lo <= hi``."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"need lo <= hi and step > 0, got {text!r}")
    return lo, hi, step


def _arange(lo, hi, step) -> np.ndarray:
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def _point(text: str) -> PointConfig:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected s1,s2, got {text!r}") from None
    return PointConfig(a, b)


def _noise_model(text: str):
    if text == "mc":
        return ("mc", None)
    if text.startswith("synthetic:"):
        try:
            sd = float(text.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad noise level in {text!r}") from None
        if sd < 0:
            raise argparse.ArgumentTypeError("noise level must be non-negative")
        return ("synthetic", sd)
    raise argparse.ArgumentTypeError(f"noise model must be mc or synthetic:SD, got {text!r}")


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def cmd_simulate(args) -> int:
    lo, hi, step = args.grid
    grid = Grid.square(lo, hi, step)
    cfg = StoppingConfig(beta=args.beta, gamma=args.gamma, t_threshold=args.t,
                         max_samples=args.max_samples, min_samples=args.min_samples)
    kind, sd = args.noise_model
    if kind == "mc":
        sim = MonteCarloSimulator(args.frames, args.bits_per_frame, args.seed)
    else:
        sim = SyntheticSimulator(sd, seed=args.seed, bits=args.frames * args.bits_per_frame)
    db = sweep(grid, cfg, sim, jobs=args.jobs)
    save_database(db, args.out)
    print(f"{db.n_simulated} points simulated, {len(db) - db.n_simulated} mirrored, "
          f"{db.total_samples()} samples -> {args.out}")
    return EXIT_OK


def cmd_map(args) -> int:
    db = load_database(args.db)
    hg = confidence_map(db, args.T)
    n, ratio = diagnostics(db)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    xs, ys = db.grid.xs, db.grid.ys
    write_matrix(out / "confidence.csv", hg.probabilities, xs, ys)
    hits = np.where(hg.mask, np.nan, hg.hits.astype(float))
    write_matrix(out / "hit.csv", hits, xs, ys, fmt=lambda v: str(int(v)))
    write_matrix(out / "n.csv", n, xs, ys, fmt=str)
    write_matrix(out / "sd_over_mean.csv", ratio, xs, ys)
    print(f"wrote confidence, hit, n and sd_over_mean matrices to {out}")
    return EXIT_OK


def cmd_mine(args) -> int:
    db = load_database(args.db)
    hg = confidence_map(db, args.T)
    miner = RegionMiner(objective=args.objective, tau=args.tau, theta=args.theta,
                        min_support=args.min_support, missing=args.missing).fit(hg)
    doc = region_document(
        miner.region_, hg, objective=args.objective, tau=miner.tau_,
        theta=args.theta if args.objective == "support" else None, T=args.T,
        missing=args.missing, min_support=args.min_support if args.objective == "confidence" else None,
    )
    save_region(doc, args.out)
    if not miner.found_:
        print("no qualifying region", file=sys.stderr)
        return EXIT_NO_REGION
    tau = "n/a" if miner.tau_ is None else f"{float(miner.tau_):.9g}"
    print(f"support {miner.support_} ({miner.region_.n_buckets} buckets), "
          f"confidence {miner.confidence_:.6f}, tau {tau}")
    return EXIT_OK


def cmd_slice(args) -> int:
    db = load_database(args.db)
    surf = surface_from_database(db, args.span)
    if args.alpha is not None:
        curve = slice_fixed_alpha(surf, args.alpha, _arange(*args.S_range))
        name = "S_db"
    else:
        curve = slice_fixed_S(surf, args.S, _arange(*args.alpha_range))
        name = "alpha"
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([name, "s1_db", "s2_db", "log10_ber"])
        for row in zip(curve.param, curve.s1, curve.s2, curve.z):
            w.writerow([repr(float(v)) for v in row])
    print(f"{int(curve.valid.sum())} of {len(curve.z)} slice points inside the data hull -> {args.out}")
    return EXIT_OK


def cmd_crossval(args) -> int:
    db = load_database(args.db)
    rep = cross_validate(db, args.folds, args.T, args.theta, args.missing)
    doc = rep.to_dict()
    for r, g in zip(doc["regions"], rep.grids):
        for c in r["columns"]:
            c["x"], c["s"], c["t"] = float(g.xs[c["x"]]), float(g.ys[c["s"]]), float(g.ys[c["t"]])
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"supports {rep.supports}, min Jaccard {rep.min_jaccard:.4f}")
    return EXIT_OK


def cmd_ecdf(args) -> int:
    db = load_database(args.db)
    p = args.point
    if p not in db.records:
        raise UsageError(f"point {p.s1_db},{p.s2_db} is not in the database")
    steps = ecdf(db[p].values)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ber", "fraction"])
        for v, f in steps:
            w.writerow([repr(v), repr(f)])
    print(f"{len(steps)} steps -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="perfmine", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="adaptive sampling sweep over a square SNR grid")
    p.add_argument("--grid", type=parse_range, required=True, help="lo:hi:step in dB")
    p.add_argument("--frames", type=int, default=10000)
    p.add_argument("--bits-per-frame", type=int, default=80)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--t", type=float, default=1e-4, help="sampling threshold")
    p.add_argument("--max-samples", type=int, default=50)
    p.add_argument("--min-samples", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-model", type=_noise_model, default=("mc", None), help="mc or synthetic:SD")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("map", help="confidence, hit, sample-size and sd/mean matrices")
    p.add_argument("--db", required=True)
    p.add_argument("--T", type=float, default=1e-3)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("mine", help="mine an admissible region")
    p.add_argument("--db", required=True)
    p.add_argument("--T", type=float, default=1e-3)
    p.add_argument("--objective", choices=("gain", "support", "confidence"), default="support")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=0.99)
    p.add_argument("--min-support", type=int, default=1, help="minimum number of buckets")
    p.add_argument("--missing", choices=("exclude", "zero"), default="exclude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("slice", help="1D cut of the fitted log10 BER surface")
    p.add_argument("--db", required=True)
    p.add_argument("--span", type=float, default=0.05)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--alpha", type=float, help="fixed imbalance factor in (0, 1]")
    which.add_argument("--S", type=float, help="fixed effective SNR in dB")
    p.add_argument("--S-range", type=parse_range, help="lo:hi:step effective SNR (with --alpha)")
    p.add_argument("--alpha-range", type=parse_range, help="lo:hi:step imbalance (with --S)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("crossval", help="leave-one-slice-out region stability")
    p.add_argument("--db", required=True)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--T", type=float, default=1e-3)
    p.add_argument("--theta", type=float, default=0.99)
    p.add_argument("--missing", choices=("exclude", "zero"), default="exclude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("ecdf", help="empirical CDF of one point's samples")
    p.add_argument("--db", required=True)
    p.add_argument("--point", type=_point, required=True, help="s1,s2 in dB")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ecdf)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "slice":
        if args.alpha is not None and args.S_range is None:
            ap.error("--alpha needs --S-range")
        if args.S is not None and args.alpha_range is None:
            ap.error("--S needs --alpha-range")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"perfmine: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"perfmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
