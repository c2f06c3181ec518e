"""Point-level statistics: BER samples, the Student t CDF, confidences and
the predicates behind the adaptive sampling stopping rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MIN_ERRORS",
    "BerSample",
    "PointEstimate",
    "StoppingConfig",
    "InsufficientDataError",
    "regularized_incomplete_beta",
    "student_t_cdf",
    "clamp_sample",
    "point_estimate",
    "confidence_below",
    "rule_relative_accuracy",
    "rule_threshold",
]

# Zero-error blocks are credited with this many errors.
MIN_ERRORS = 3

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 20000


class InsufficientDataError(ValueError):
    """Raised when a statistic needs more samples than were supplied."""


@dataclass(frozen=True)
class BerSample:
    """Outcome of one simulation block.

    ``errors`` is normally an integer count. Synthetic fixtures may store a
    fractional expected error count; the clamp applies identically.
    """

    errors: float
    bits: int

    def __post_init__(self):
        if self.bits < MIN_ERRORS:
            raise ValueError(f"bits must be >= {MIN_ERRORS}, got {self.bits}")
        if self.errors < 0:
            raise ValueError(f"errors must be non-negative, got {self.errors}")
        if self.errors > self.bits:
            raise ValueError("errors cannot exceed bits")

    @property
    def value(self) -> float:
        return max(self.errors, MIN_ERRORS) / self.bits

    @property
    def raw_value(self) -> float:
        """Unclamped errors/bits ratio."""
        return self.errors / self.bits


@dataclass(frozen=True)
class PointEstimate:
    mean: float
    variance: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InsufficientDataError(f"need n >= 2, got {self.n}")
        if self.variance < 0:
            raise ValueError("variance must be non-negative")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class StoppingConfig:
    """Per-point sampling stopping rules.

    Parameters
    ----------
    beta : float
        Relative accuracy threshold.
    gamma : float
        Confidence level shared by the first two rules.
    t_threshold : float
        Sampling threshold; sampling stops once the BEP is confidently below it.
    max_samples : int
        Hard cap on blocks per point.
    min_samples : int
        Blocks always collected before any rule is consulted (at least 2).
    """

    beta: float = 0.1
    gamma: float = 0.9
    t_threshold: float = 1e-4
    max_samples: int = 50
    min_samples: int = 2

    def __post_init__(self):
        for name in ("beta", "gamma", "t_threshold"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.min_samples < 2:
            raise ValueError("min_samples must be >= 2")
        if self.max_samples < self.min_samples:
            raise ValueError("max_samples must be >= min_samples")


def _betacf(a: float, b: float, x: float, y: float) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz); ``y`` is 1 - x."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _stirling_tail(z: float) -> float:
    """lgamma(z) minus its Stirling leading terms; accurate to ~1e-16 for z >= 20."""
    z2 = z * z
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - 1.0 / (1188 * z2)) / z2) / z2) / z2) / z


def _lgamma_shift(a: float, b: float) -> float:
    """lgamma(a + b) - lgamma(a) without cancellation for large ``a``."""
    if a < 20.0:
        return math.lgamma(a + b) - math.lgamma(a)
    return (
        (a - 0.5) * math.log1p(b / a)
        + b * math.log(a + b)
        - b
        + _stirling_tail(a + b)
        - _stirling_tail(a)
    )


def _log_beta(a: float, b: float) -> float:
    big, small = (a, b) if a >= b else (b, a)
    return math.lgamma(small) - _lgamma_shift(big, small)


def regularized_incomplete_beta(a: float, b: float, x: float, y: float | None = None) -> float:
    """I_x(a, b). Pass ``y = 1 - x`` when it is known more accurately than ``1 - x``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lx = math.log1p(-y) if y < 0.5 else math.log(x)
    ly = math.log1p(-x) if x < 0.5 else math.log(y)
    front = math.exp(a * lx + b * ly - _log_beta(a, b))
    # The continued fraction converges fast only below the mean of the beta law.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x, y) / a
    return 1.0 - front * _betacf(b, a, y, x) / b


def student_t_cdf(x: float, dof: float) -> float:
    """P(X < x) for X following a Student t law with ``dof`` degrees of freedom."""
    if not dof > 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x == 0.0:
        return 0.5
    x2 = x * x
    # tail = P(X > |x|) = I_z(dof/2, 1/2) / 2 with z = dof / (dof + x^2)
    z = dof / (dof + x2)
    w = x2 / (dof + x2)
    tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, z, w)
    return 1.0 - tail if x > 0 else tail


def clamp_sample(errors: float, bits: int) -> BerSample:
    """Build a sample whose value is ``max(errors, 3) / bits``."""
    if bits < MIN_ERRORS:
        raise ValueError(f"bits must be >= {MIN_ERRORS}, got {bits}")
    return BerSample(errors=errors, bits=bits)


def _values(samples: Iterable[BerSample | float]) -> np.ndarray:
    return np.array([s.value if isinstance(s, BerSample) else float(s) for s in samples], dtype=float)


def point_estimate(samples: Sequence[BerSample | float]) -> PointEstimate:
    """Sample mean and unbiased (n - 1) sample variance.

    Accepts :class:`BerSample` objects or bare values.
    """
    v = _values(samples)
    if v.size < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {v.size}")
    mean = float(v.mean())
    var = float(np.sum((v - mean) ** 2) / (v.size - 1))
    return PointEstimate(mean=mean, variance=var, n=int(v.size))


def _t_confidence(mean: float, sd: float, n: int, threshold: float) -> float:
    if sd == 0.0:
        if mean < threshold:
            return 1.0
        if mean > threshold:
            return 0.0
        return 0.5
    return student_t_cdf((threshold - mean) / (sd / math.sqrt(n)), n - 1)


def confidence_below(est: PointEstimate, T: float) -> float:
    """Estimate of P(E[b] < T) from a point estimate.

    Zero variance yields the degenerate limit 1, 0.5 or 0.
    """
    if not T > 0:
        raise ValueError("threshold must be positive")
    return _t_confidence(est.mean, est.sd, est.n, T)


def rule_relative_accuracy(est: PointEstimate, cfg: StoppingConfig) -> bool:
    """Two-sided check P(|E[b] - b| < beta * b) >= gamma."""
    if est.variance == 0.0:
        return True
    x = cfg.beta * est.mean * math.sqrt(est.n) / est.sd
    return 2.0 * student_t_cdf(x, est.n - 1) - 1.0 >= cfg.gamma


def rule_threshold(est: PointEstimate, cfg: StoppingConfig) -> bool:
    return confidence_below(est, cfg.t_threshold) >= cfg.gamma
