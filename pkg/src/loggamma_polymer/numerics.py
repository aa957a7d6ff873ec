"""Special functions, lattice distributions and distances used throughout the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

EULER_GAMMA = 0.5772156649015329

# Bernoulli-number coefficients of the asymptotic series
#   psi(x)  ~ log x - 1/(2x) - sum B_{2k} / (2k x^{2k})
#   psi1(x) ~ 1/x + 1/(2x^2) + sum B_{2k} / x^{2k+1}
_B2K = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510)
_RECURRENCE_FLOOR = 8.0


def log_sum_exp(a: float, b: float) -> float:
    """Return log(exp(a) + exp(b)) without overflow; accepts -inf."""
    hi, lo = (a, b) if a >= b else (b, a)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log1p(math.exp(lo - hi))


def _check_positive(x: float, name: str) -> None:
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"{name} requires a finite positive argument, got {x!r}")


def digamma(x: float) -> float:
    """Digamma function for x > 0 (recurrence up to x >= 8, then asymptotic series)."""
    _check_positive(x, "digamma")
    acc = 0.0
    while x < _RECURRENCE_FLOOR:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k, b in enumerate(_B2K, start=1):
        series += b / (2 * k) * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x: float) -> float:
    """Trigamma function for x > 0."""
    _check_positive(x, "trigamma")
    acc = 0.0
    while x < _RECURRENCE_FLOOR:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv2 * inv
    for b in _B2K:
        series += b * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + series


def log_gamma(x: float) -> float:
    _check_positive(x, "log_gamma")
    return math.lgamma(x)


def arcsine_cdf(s):
    """CDF (2/pi) arcsin(sqrt(s)) of the arcsine law on [0, 1]."""
    arr = np.asarray(s, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise ValueError("arcsine_cdf is defined on [0, 1]")
    out = 2.0 / math.pi * np.arcsin(np.sqrt(arr))
    return float(out) if out.ndim == 0 else out


def gamma_cdf(x, shape: float):
    """Regularized lower incomplete gamma P(shape, x)."""
    _check_positive(shape, "gamma_cdf shape")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("gamma_cdf requires x >= 0")
    out = special.gammainc(shape, arr)
    return float(out) if out.ndim == 0 else out


def kolmogorov_sf(lam: float, terms: int = 100) -> float:
    """Asymptotic Kolmogorov survival function P(K > lam)."""
    if lam <= 0.0:
        return 1.0
    if lam < 0.2:
        # the alternating series converges too slowly here; the sf is 1 to double precision
        return 1.0
    k = np.arange(1, terms + 1)
    total = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k * k * lam * lam))
    return float(min(1.0, max(0.0, total)))


def ks_statistic(sample, cdf: Callable) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov distance and asymptotic p-value.

    ``cdf`` must accept a numpy array and be nondecreasing on the support.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("ks_statistic needs a nonempty sample")
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    d = float(max(upper.max(), lower.max(), 0.0))
    return d, kolmogorov_sf(math.sqrt(n) * d)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS distance sup |F_a - F_b| and asymptotic p-value."""
    x = np.sort(np.asarray(a, dtype=float).ravel())
    y = np.sort(np.asarray(b, dtype=float).ravel())
    if x.size == 0 or y.size == 0:
        raise ValueError("ks_two_sample needs two nonempty samples")
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    d = float(np.max(np.abs(fx - fy)))
    en = math.sqrt(x.size * y.size / (x.size + y.size))
    return d, kolmogorov_sf(en * d)


@dataclass
class LatticeDist:
    """Finitely supported mass on Z: ``mass[i]`` sits at integer ``offset + i``."""

    offset: int
    mass: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        if self.mass.ndim != 1:
            raise ValueError("LatticeDist mass must be one-dimensional")
        if np.any(self.mass < 0):
            raise ValueError("LatticeDist mass entries must be nonnegative")
        if self.mass.sum() > 1.0 + 1e-9:
            raise ValueError(f"LatticeDist total mass {self.mass.sum()!r} exceeds 1")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.mass.size)

    def total(self) -> float:
        return float(self.mass.sum())

    def __getitem__(self, k: int) -> float:
        i = k - self.offset
        if 0 <= i < self.mass.size:
            return float(self.mass[i])
        return 0.0


def tv_distance(p: LatticeDist, q: LatticeDist) -> float:
    """Sum over Z of |p(k) - q(k)| (no factor 1/2)."""
    if np.any(p.mass < 0) or np.any(q.mass < 0):
        raise ValueError("tv_distance requires nonnegative masses")
    lo = min(p.offset, q.offset)
    hi = max(p.offset + p.mass.size, q.offset + q.mass.size)
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[p.offset - lo : p.offset - lo + p.mass.size] = p.mass
    b[q.offset - lo : q.offset - lo + q.mass.size] = q.mass
    return float(np.abs(a - b).sum())
