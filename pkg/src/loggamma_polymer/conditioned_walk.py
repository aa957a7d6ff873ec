"""The representation walk, its ladder structure and the walk conditioned to stay nonnegative.

Two samplers of the conditioned walk are provided. :func:`tanaka_up_sample`
glues time-reversed excursions of the walk below its running maximum
(Tanaka's pathwise construction) and needs no renewal function.
:func:`rejection_conditioned_sample` conditions on staying nonnegative up to a
finite horizon by plain rejection; it is slow but exact for that horizon and
serves as the reference for the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import LatticeDist
from .sampling import ModelParams, walk_increment_sample

DEFAULT_MAX_STEPS = 10**7


@dataclass
class WalkPath:
    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 1 or self.positions.size < 1:
            raise ValueError("a walk path needs at least one position")
        if self.positions[0] != 0.0:
            raise ValueError("walk paths start at 0")

    @classmethod
    def from_increments(cls, increments) -> "WalkPath":
        inc = np.asarray(increments, dtype=float)
        return cls(np.concatenate([[0.0], np.cumsum(inc)]))

    @property
    def n(self) -> int:
        return self.positions.size - 1

    def __len__(self) -> int:
        return self.positions.size


@dataclass
class LadderDecomp:
    """Strict ascending ladder epochs/heights and the time-reversed excursions between them."""

    epochs: np.ndarray
    heights: np.ndarray
    excursions: list = field(default_factory=list)

    @property
    def count(self) -> int:
        """Number of ladder epochs after time 0."""
        return len(self.epochs) - 1


@dataclass
class ConditionedPath:
    """W_0..W_K of the walk conditioned to stay nonnegative.

    When the sampler hit its step budget before closing the last excursion,
    the entries it could not resolve are NaN and ``floor`` is a strict lower
    bound for each of them.
    """

    positions: np.ndarray
    floor: float = math.inf

    @property
    def complete(self) -> bool:
        return not np.isnan(self.positions).any()

    @property
    def lower_envelope(self) -> np.ndarray:
        """Exact values, with unresolved entries replaced by their lower bound."""
        return np.where(np.isnan(self.positions), self.floor, self.positions)


def sample_walk(rng: np.random.Generator, n: int, params: ModelParams) -> WalkPath:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return WalkPath.from_increments(walk_increment_sample(rng, params, n))


def argmin_walk(path: WalkPath) -> int:
    """Smallest index attaining min_k S_k."""
    return int(np.argmin(path.positions))


def xi_n(path: WalkPath) -> LatticeDist:
    """xi_k = exp(-(S_k - S_l)) / sum_i exp(-(S_i - S_l)), l the argmin."""
    s = path.positions
    w = np.exp(-(s - s.min()))
    return LatticeDist(0, w / w.sum())


def split_at_min(path: WalkPath) -> tuple[np.ndarray, np.ndarray]:
    """Walk seen from its minimum: (S_{l-k} - S_l)_{k=1..l}, (S_{l+k} - S_l)_{k=1..n-l}."""
    s = path.positions
    l = argmin_walk(path)
    pre = s[:l][::-1] - s[l]
    post = s[l + 1 :] - s[l]
    return pre, post


def _ladder_epochs(y: np.ndarray) -> np.ndarray:
    prev_max = np.maximum.accumulate(y)[:-1]
    return np.concatenate([[0], np.flatnonzero(y[1:] > prev_max) + 1])


def ladder_decompose(path: WalkPath, reflected: bool = False) -> LadderDecomp:
    """Strict ascending ladder of S (or of -S when ``reflected``).

    The k-th excursion is (0, Y_{T_k} - Y_{T_k - 1}, ..., Y_{T_k} - Y_{T_{k-1}})
    where Y is the laddered sequence. Only completed excursions are returned;
    a path with few epochs yields a short decomposition.
    """
    y = -path.positions if reflected else path.positions
    epochs = _ladder_epochs(y)
    heights = y[epochs]
    excursions = [y[b] - y[b - np.arange(0, b - a + 1)] for a, b in zip(epochs[:-1], epochs[1:])]
    return LadderDecomp(epochs, heights, excursions)


def tanaka_from_increments(increments, K: int) -> ConditionedPath | None:
    """Tanaka's construction W_0..W_K from a fixed increment sequence.

    Returns None when the increments do not reach a ladder epoch at or after K.
    """
    s = np.concatenate([[0.0], np.cumsum(np.asarray(increments, dtype=float))])
    epochs = _ladder_epochs(s)
    if epochs[-1] < K:
        return None
    return ConditionedPath(_tanaka_values(s, epochs, K))


def _tanaka_values(s: np.ndarray, epochs: np.ndarray, K: int) -> np.ndarray:
    # W_n = H_{k-1} + S_{sigma_k} - S_{sigma_k - (n - sigma_{k-1})} for sigma_{k-1} < n <= sigma_k
    out = np.zeros(K + 1)
    if K == 0:
        return out
    n = np.arange(1, K + 1)
    k = np.searchsorted(epochs, n, side="left")
    prev = epochs[k - 1]
    nxt = epochs[k]
    out[1:] = s[prev] + s[nxt] - s[nxt - (n - prev)]
    return out


def tanaka_up_sample(
    rng: np.random.Generator,
    K: int,
    params: ModelParams,
    max_steps: int = DEFAULT_MAX_STEPS,
    block: int = 1024,
) -> ConditionedPath:
    """First K+1 values of the walk conditioned to stay nonnegative, by Tanaka's construction.

    Increments are drawn until the ladder epoch that closes the excursion
    straddling K; beyond K only a window of the last K positions is kept. If
    that epoch does not arrive within ``max_steps`` increments the result is
    truncated (see :class:`ConditionedPath`).
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if not params.is_equilibrium and params.drift() < 0:
        raise ValueError("walk drifts to -infinity: ascending ladder epochs are not a.s. finite")
    if K == 0:
        return ConditionedPath(np.zeros(1))
    s = np.concatenate([[0.0], np.cumsum(walk_increment_sample(rng, params, K))])
    epochs = _ladder_epochs(s)
    last = int(epochs[-1])
    if last == K:
        return ConditionedPath(_tanaka_values(s, epochs, K))
    top = s[last]
    span = K - last  # values of the straddling excursion needed, read backwards from its end
    tail = s[-span:].copy()
    pos = s[-1]
    used = K
    while used < max_steps:
        size = int(min(block, max_steps - used))
        chunk = pos + np.cumsum(walk_increment_sample(rng, params, size))
        hits = np.flatnonzero(chunk > top)
        if hits.size:
            j = int(hits[0])
            before = np.concatenate([tail, chunk[:j]])[-span:]
            out = np.empty(K + 1)
            out[: last + 1] = _tanaka_values(s, epochs, last) if last > 0 else 0.0
            steps = np.arange(1, span + 1)  # n - last
            out[last + 1 :] = top + chunk[j] - before[span - steps]
            return ConditionedPath(out)
        tail = np.concatenate([tail, chunk])[-span:]
        pos = chunk[-1]
        used += size
        block = min(block * 2, 1 << 20)
    out = np.full(K + 1, np.nan)
    out[: last + 1] = _tanaka_values(s, epochs, last) if last > 0 else 0.0
    return ConditionedPath(out, floor=float(top))


def rejection_conditioned_ensemble(
    rng: np.random.Generator,
    n: int,
    K: int,
    params: ModelParams,
    count: int,
    batch: int = 2048,
) -> tuple[np.ndarray, int]:
    """``count`` draws of (S_0..S_K) given S_k >= 0 for all k <= n, plus the number of trials."""
    if not 0 <= K <= n:
        raise ValueError("need 0 <= K <= n")
    accepted = []
    got = 0
    trials = 0
    while got < count:
        inc = walk_increment_sample(rng, params, (batch, n))
        paths = np.cumsum(inc, axis=1)
        ok = paths.min(axis=1) >= 0.0 if n > 0 else np.ones(batch, dtype=bool)
        idx = np.flatnonzero(ok)
        need = count - got
        if idx.size > need:
            # trials are counted up to the last accepted row used
            trials += int(idx[need - 1]) + 1
            idx = idx[:need]
        else:
            trials += batch
        if idx.size:
            chosen = np.concatenate([np.zeros((idx.size, 1)), paths[idx, :K]], axis=1)
            accepted.append(chosen)
            got += idx.size
    return np.concatenate(accepted, axis=0), trials


def rejection_conditioned_sample(rng: np.random.Generator, n: int, K: int, params: ModelParams) -> ConditionedPath:
    """Exact draw of the first K+1 positions given the walk stays nonnegative up to n."""
    values, _ = rejection_conditioned_ensemble(rng, n, K, params, 1, batch=max(64, int(4 * math.sqrt(n + 1))))
    return ConditionedPath(values[0])


def acceptance_probability(
    rng: np.random.Generator, n: int, params: ModelParams, trials: int, batch: int = 4096
) -> float:
    """Monte Carlo estimate of P(S_k >= 0, k <= n)."""
    hits = 0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        paths = np.cumsum(walk_increment_sample(rng, params, (b, n)), axis=1)
        hits += int(np.count_nonzero(paths.min(axis=1) >= 0.0))
        done += b
    return hits / trials


def renewal_V_estimate(
    rng: np.random.Generator,
    x,
    reps: int,
    params: ModelParams | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
):
    """Monte Carlo renewal function V(x) = 1 + E #{1 <= i < sigma(0): S_i >= -x}.

    sigma(0) is the first k >= 1 with S_k >= 0. ``x`` may be an array; all
    levels are evaluated on the same sample paths. Returns
    ``(estimate, stderr, truncated)`` where ``truncated`` counts excursions cut
    at ``max_steps``; at equilibrium sigma(0) has infinite mean, so the
    estimate is diagnostic.
    """
    params = params or ModelParams(2.0, 1.0)
    levels = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(levels < 0):
        raise ValueError("x must be nonnegative")
    if reps < 1:
        raise ValueError("reps must be positive")
    counts = np.zeros((reps, levels.size))
    active = np.arange(reps)
    pos = np.zeros(reps)
    steps = 0
    width = 64
    while active.size and steps < max_steps:
        w = int(min(width, max_steps - steps))
        inc = walk_increment_sample(rng, params, (active.size, w))
        paths = pos[active, None] + np.cumsum(inc, axis=1)
        done_mask = paths >= 0.0
        first = np.where(done_mask.any(axis=1), done_mask.argmax(axis=1), w)
        before = np.arange(w)[None, :] < first[:, None]
        for j, lev in enumerate(levels):
            counts[active, j] += np.count_nonzero(before & (paths >= -lev), axis=1)
        pos[active] = paths[:, -1]
        still = first == w
        active = active[still]
        steps += w
        width = min(width * 2, max(64, (1 << 22) // max(1, active.size)))
    vals = 1.0 + counts
    est = vals.mean(axis=0)
    err = vals.std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.full(levels.size, np.nan)
    if np.ndim(x) == 0:
        return float(est[0]), float(err[0]), int(active.size)
    return est, err, int(active.size)
