"""Limiting endpoint distribution seen from the favourite endpoint.

At equilibrium the limit is built from two independent copies of the walk
conditioned to stay nonnegative (the increment law is symmetric, so the
pre-minimum piece has the same law as the post-minimum piece). Off
equilibrium the walk drifts away from its global minimum and the limit is the
normalized ``exp(-S)`` recentred there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditioned_walk import _ladder_epochs, _tanaka_values
from .numerics import LatticeDist
from .partition import EndpointLaw
from .sampling import ModelParams, walk_increment_sample

DEFAULT_LEVEL = 40.0
DEFAULT_WINDOW = 15
DEFAULT_LIMIT_STEPS = 10**6


@dataclass
class XiWindow:
    """Mass on offsets -K..K around the mode.

    ``tail_bound`` is the mass of the (computed) measure outside the window,
    ``truncation`` an estimate of the mass dropped by stopping the series.
    """

    K: int
    mass: np.ndarray
    tail_bound: float
    truncation: float = 0.0
    resampled: int = 0

    @property
    def dist(self) -> LatticeDist:
        return LatticeDist(-self.K, self.mass)

    @property
    def mode_mass(self) -> float:
        return float(self.mass[self.K])

    def endpoint_mass_I(self) -> float:
        """max_k (xi_k + xi_{k+1}) / 2 over the window."""
        padded = np.concatenate([[0.0], self.mass, [0.0]])
        return float(np.max(padded[:-1] + padded[1:]) / 2.0)


def _tanaka_until_level(rng, params: ModelParams, K: int, level: float, max_steps: int, block: int = 4096):
    """Conditioned walk up to the first ladder epoch at index >= K and height >= level.

    Past that epoch the conditioned walk never drops below ``level``. Returns
    None if no such epoch occurs within ``max_steps`` increments.
    """
    chunks = [np.zeros(1)]
    pos = 0.0
    top = 0.0
    used = 0
    while used < max_steps:
        size = int(min(block, max_steps - used))
        chunk = pos + np.cumsum(walk_increment_sample(rng, params, size))
        idx = np.arange(used + 1, used + size + 1)
        running = np.maximum.accumulate(np.concatenate([[top], chunk]))[:-1]
        good = np.flatnonzero((chunk > running) & (chunk >= level) & (idx >= K))
        if good.size:
            chunks.append(chunk[: good[0] + 1])
            s = np.concatenate(chunks)
            sigma = s.size - 1
            return _tanaka_values(s, _ladder_epochs(s), sigma)
        chunks.append(chunk)
        top = max(top, float(chunk.max()))
        pos = float(chunk[-1])
        used += size
        block = min(block * 2, 1 << 18)
    return None


def xi_limit_equilibrium(
    rng: np.random.Generator,
    K: int,
    params: ModelParams,
    level: float = DEFAULT_LEVEL,
    max_steps: int = DEFAULT_LIMIT_STEPS,
) -> XiWindow:
    """One sample of the limit endpoint law xi on [-K, K] at theta = mu/2."""
    if not params.is_equilibrium:
        raise ValueError("xi_limit_equilibrium needs theta = mu/2")
    if K < 0:
        raise ValueError("K must be nonnegative")
    walks = []
    resampled = 0
    while len(walks) < 2:
        w = _tanaka_until_level(rng, params, K, level, max_steps)
        if w is None:
            resampled += 1
            continue
        walks.append(w)
    up, down = walks
    denom = 1.0 + np.exp(-up[1:]).sum() + np.exp(-down[1:]).sum()
    mass = np.empty(2 * K + 1)
    mass[K:] = np.exp(-up[: K + 1])
    mass[:K] = np.exp(-down[1 : K + 1])[::-1]
    mass /= denom
    return XiWindow(
        K,
        mass,
        tail_bound=float(max(0.0, 1.0 - mass.sum())),
        truncation=math.exp(-level) * (up.size + down.size),
        resampled=resampled,
    )


def xi_limit_drift(
    rng: np.random.Generator,
    K: int,
    params: ModelParams,
    level: float = DEFAULT_LEVEL,
    max_steps: int = DEFAULT_LIMIT_STEPS,
    block: int = 1024,
) -> XiWindow:
    """One sample of the limit endpoint law for theta != mu/2.

    For theta > mu/2 the walk drifts up and the favourite endpoint stays near
    the origin. For theta < mu/2 the law is read from the far end of the
    antidiagonal, i.e. from the walk with increments -X, and mirrored.
    """
    if params.is_equilibrium:
        raise ValueError("xi_limit_drift needs theta != mu/2")
    sign = 1.0 if params.drift() > 0 else -1.0
    chunks = [np.zeros(1)]
    pos = 0.0
    low = 0.0
    low_at = 0
    used = 0
    while True:
        size = int(min(block, max_steps - used))
        if size <= 0:
            raise RuntimeError("drifting walk did not clear the level within max_steps")
        chunk = pos + sign * np.cumsum(walk_increment_sample(rng, params, size))
        chunks.append(chunk)
        full = np.concatenate([[low], chunk])
        cmin = np.minimum.accumulate(full)[1:]
        idx = np.arange(used + 1, used + size + 1)
        i_min = int(np.argmin(chunk))
        if chunk[i_min] < low:
            low, low_at = float(chunk[i_min]), used + 1 + i_min
        ok = np.flatnonzero((chunk - cmin >= level) & (idx >= low_at + K) & (chunk >= cmin[-1] + level))
        used += size
        pos = float(chunk[-1])
        if ok.size:
            break
    s = np.concatenate(chunks)
    law = EndpointLaw.from_walk(s)
    ell = law.l_n
    q = np.exp(law.logq)
    mass = np.zeros(2 * K + 1)
    for k in range(-K, K + 1):
        j = ell + k
        if 0 <= j < q.size:
            mass[k + K] = q[j]
    if sign < 0:
        mass = mass[::-1].copy()
    return XiWindow(K, mass, tail_bound=float(max(0.0, 1.0 - mass.sum())), truncation=math.exp(-level) * s.size)


def xi_limit_sample(rng, K: int, params: ModelParams, **kw) -> XiWindow:
    if params.is_equilibrium:
        return xi_limit_equilibrium(rng, K, params, **kw)
    return xi_limit_drift(rng, K, params, **kw)


def centered_endpoint_window(law: EndpointLaw, K: int) -> XiWindow:
    """Q_n(l_n + k) for |k| <= K; everything else goes to ``tail_bound``."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    q = np.exp(law.logq)
    ell = law.l_n
    mass = np.zeros(2 * K + 1)
    lo = max(0, ell - K)
    hi = min(law.n, ell + K)
    mass[lo - ell + K : hi - ell + K + 1] = q[lo : hi + 1]
    total = q.sum()
    return XiWindow(K, mass, tail_bound=float(max(0.0, total - mass.sum())))


def mean_window(windows) -> np.ndarray:
    return np.mean([w.mass for w in windows], axis=0)
