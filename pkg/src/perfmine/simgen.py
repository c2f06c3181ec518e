"""Two-branch transmit-diversity BER generator over flat Rayleigh fading.

Provides the closed-form average BEP used as ground truth, the (S1, S2) to
(alpha, S) coordinate transforms, a semi-analytic block simulator and a
noisy synthetic surface for exercising the sampler and miner.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .stats import BerSample

__all__ = [
    "PointConfig",
    "SimBlockConfig",
    "imbalance_factor",
    "effective_snr",
    "snrs_from_imbalance",
    "db_to_linear",
    "closed_form_bep",
    "closed_form_bep_grid",
    "q_function",
    "block_rng",
    "simulate_block",
    "MonteCarloSimulator",
    "SyntheticSimulator",
    "synthetic_surface",
]

@dataclass(frozen=True)
class PointConfig:
    """Average SNRs (dB) of the two transmit branches."""

    s1_db: float
    s2_db: float

    @property
    def mirrored(self) -> "PointConfig":
        return PointConfig(self.s2_db, self.s1_db)


@dataclass(frozen=True)
class SimBlockConfig:
    frames: int = 10000
    bits_per_frame: int = 80
    seed: int = 0

    def __post_init__(self):
        if self.frames < 1 or self.bits_per_frame < 1:
            raise ValueError("frames and bits_per_frame must be positive")

    @property
    def bits(self) -> int:
        return self.frames * self.bits_per_frame


def db_to_linear(db):
    return np.power(10.0, 0.1 * np.asarray(db, dtype=float))


def imbalance_factor(p: PointConfig) -> float:
    """Branch power imbalance factor ``10 ** (-0.1 |S1 - S2|)``."""
    return 10.0 ** (-0.1 * abs(p.s1_db - p.s2_db))


def effective_snr(p: PointConfig) -> float:
    """dB value of the mean of the two branch linear SNRs."""
    hi, lo = max(p.s1_db, p.s2_db), min(p.s1_db, p.s2_db)
    if hi == -math.inf:
        return -math.inf
    # factor out the stronger branch to stay finite for very large dB values
    return hi + 10.0 * math.log10((1.0 + 10.0 ** (0.1 * (lo - hi))) / 2.0)


def snrs_from_imbalance(alpha: float, s_db: float) -> PointConfig:
    """Invert (alpha, S) to the branch SNRs with ``s1_db <= s2_db``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    gap = -10.0 * math.log10(alpha)
    s1 = s_db + 10.0 * math.log10(2.0 * alpha / (1.0 + alpha))
    return PointConfig(s1, s1 + gap)


def q_function(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def _one_minus_mu(g):
    # 1 - sqrt(g / (1 + g)) written without cancellation
    mu = np.sqrt(g / (1.0 + g))
    return 1.0 / ((1.0 + g) * (1.0 + mu)), mu


def closed_form_bep_grid(g1, g2):
    """Vectorised average BEP for linear mean branch SNRs ``g1``, ``g2``.

    BPSK after combining, post-combining SNR is the sum of two independent
    exponential variables with the given means.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    a, b = np.broadcast_arrays(np.maximum(g1, g2), np.minimum(g1, g2))
    om_a, mu_a = _one_minus_mu(a)
    _, mu_b = _one_minus_mu(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        # (a mu_a - b mu_b)/(a - b) = mu_a + b / ((1+a)(1+b)(mu_a+mu_b))
        distinct = 0.5 * (om_a - b / ((1.0 + a) * (1.0 + b) * (mu_a + mu_b)))
    equal = 0.25 * om_a * om_a * (2.0 + mu_a)
    out = np.where(a == b, equal, distinct)
    out = np.where(a == 0.0, 0.5, out)
    return out


def closed_form_bep(p: PointConfig) -> float:
    """Exact average BEP of the two-branch diversity link at ``p``."""
    g1 = 0.0 if p.s1_db == -math.inf else 10.0 ** (0.1 * p.s1_db)
    g2 = 0.0 if p.s2_db == -math.inf else 10.0 ** (0.1 * p.s2_db)
    return float(closed_form_bep_grid(g1, g2))


def _float_key(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x) + 0.0))[0]


def block_rng(seed: int, p: PointConfig, block_index: int) -> np.random.Generator:
    """Philox generator keyed on (seed, s1, s2, block_index).

    The key is a hash of its inputs, so results do not depend on the order in
    which points or blocks are evaluated.
    """
    payload = struct.pack(
        "<qQQq", int(seed), _float_key(p.s1_db), _float_key(p.s2_db), int(block_index)
    )
    words = np.frombuffer(hashlib.sha256(payload).digest(), dtype=np.uint32)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words.tolist())))


def simulate_block(p: PointConfig, cfg: SimBlockConfig, block_index: int = 0) -> BerSample:
    """One block of ``cfg.frames`` quasi-static Rayleigh frames.

    Each frame draws the two branch SNRs once; bit errors inside the frame are
    Bernoulli with probability Q(sqrt(2 (g1 + g2))), summed per frame as a
    binomial count.
    """
    rng = block_rng(cfg.seed, p, block_index)
    means = db_to_linear([p.s1_db, p.s2_db])
    gammas = rng.exponential(1.0, size=(cfg.frames, 2)) * means
    pe = q_function(np.sqrt(2.0 * gammas.sum(axis=1)))
    errors = int(rng.binomial(cfg.bits_per_frame, pe).sum())
    return BerSample(errors=errors, bits=cfg.bits)


class MonteCarloSimulator:
    """Block simulator callable ``sim(point, block_index) -> BerSample``."""

    def __init__(self, frames: int = 10000, bits_per_frame: int = 80, seed: int = 0):
        self.cfg = SimBlockConfig(frames=frames, bits_per_frame=bits_per_frame, seed=seed)

    def __call__(self, p: PointConfig, block_index: int) -> BerSample:
        return simulate_block(p, self.cfg, block_index)

    def __repr__(self):
        c = self.cfg
        return f"MonteCarloSimulator(frames={c.frames}, bits_per_frame={c.bits_per_frame}, seed={c.seed})"


class SyntheticSimulator:
    """Oracle BEP with relative Gaussian noise, clipped to (0, 0.5].

    Samples are returned as blocks of ``bits`` bits carrying a fractional
    expected error count, so the usual 3-error clamp still applies.
    """

    def __init__(self, noise_sd_rel: float = 0.0, seed: int = 0, bits: int = 800000):
        if noise_sd_rel < 0:
            raise ValueError("noise_sd_rel must be non-negative")
        self.noise_sd_rel = float(noise_sd_rel)
        self.seed = int(seed)
        self.bits = int(bits)

    def value(self, p: PointConfig, block_index: int) -> float:
        truth = closed_form_bep(p)
        if self.noise_sd_rel == 0.0:
            return truth
        eps = block_rng(self.seed, p, block_index).normal(0.0, self.noise_sd_rel)
        v = truth * (1.0 + eps)
        return float(min(max(v, np.nextafter(0.0, 1.0)), 0.5))

    def __call__(self, p: PointConfig, block_index: int) -> BerSample:
        return BerSample(errors=self.value(p, block_index) * self.bits, bits=self.bits)

    def __repr__(self):
        return f"SyntheticSimulator(noise_sd_rel={self.noise_sd_rel}, seed={self.seed}, bits={self.bits})"


def synthetic_surface(grid, noise_sd_rel: float, seed: int = 0, n_samples: int = 2, bits: int = 800000):
    """Performance database with ``n_samples`` synthetic blocks at every grid point.

    Every point is drawn independently (no reflection); see
    :class:`SyntheticSimulator` for the noise model.
    """
    from .sampler import PerformanceDatabase

    sim = SyntheticSimulator(noise_sd_rel, seed=seed, bits=bits)
    return PerformanceDatabase.from_samples(
        grid, {p: [sim(p, j) for j in range(n_samples)] for p in grid.points()}
    )
