"""Log-domain partition functions and the point-to-line endpoint law."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .environment import EnvGrid, P2LStreams, bulk_offset
from .numerics import LatticeDist
from .sampling import ModelParams, SeedSpec

DEFAULT_S_GRID = np.round(np.arange(0, 21) * 0.05, 10)


@dataclass
class LogZGrid:
    logZ: np.ndarray
    direction: str  # "forward" or "reverse"

    @property
    def shape(self) -> tuple[int, int]:
        return self.logZ.shape

    def __getitem__(self, idx):
        return self.logZ[idx]


@dataclass
class EndpointLaw:
    """Endpoint law on antidiagonal n, kept in log form: ``logq[k] = log Q_n(k)``."""

    n: int
    logq: np.ndarray

    def __post_init__(self):
        self.logq = np.asarray(self.logq, dtype=float)
        if self.logq.size != self.n + 1:
            raise ValueError("endpoint law must have n + 1 entries")

    @classmethod
    def from_log_weights(cls, logz_row: np.ndarray) -> "EndpointLaw":
        """Normalize unnormalized log masses (e.g. logZ along an antidiagonal)."""
        row = np.asarray(logz_row, dtype=float)
        top = row.max()
        shifted = row - top
        return cls(row.size - 1, shifted - math.log(np.exp(shifted).sum()))

    @classmethod
    def from_walk(cls, positions: np.ndarray) -> "EndpointLaw":
        """Law proportional to exp(-S_k) on 0..n."""
        return cls.from_log_weights(-np.asarray(positions, dtype=float))

    @property
    def dist(self) -> LatticeDist:
        p = np.exp(self.logq)
        total = p.sum()
        if total > 1.0:
            p = p / total
        return LatticeDist(0, p)

    @property
    def l_n(self) -> int:
        # argmax returns the smallest maximizer
        return int(np.argmax(self.logq))

    @property
    def mode_mass(self) -> float:
        return float(math.exp(self.logq.max()))


def _check_env(env: EnvGrid) -> None:
    if not isinstance(env, EnvGrid):
        raise TypeError("expected an EnvGrid")


def _clip_to_halfspace(halfspace, d, lo, hi):
    # a*i + b*(d - i) <= c  <=>  (a - b) * i <= c - b*d
    a, b, c = halfspace
    slope, rhs = a - b, c - b * d
    if slope > 0:
        hi = min(hi, rhs // slope)
    elif slope < 0:
        lo = max(lo, -((-rhs) // slope))
    elif rhs < 0:
        return 1, 0
    return lo, hi


def _forward_dp(w: np.ndarray, halfspace: tuple[int, int, int] | None = None) -> np.ndarray:
    """logZ for weights ``w`` with logZ(0,0) = w(0,0) = 0, swept by antidiagonals.

    In a row-major array an antidiagonal is a strided slice, so each sweep
    step works on views without fancy indexing. With ``halfspace = (a, b, c)``
    only sites with a*i + b*j <= c are computed (a, b >= 0, so the region is
    closed under taking predecessors and the values there are exact); the
    rest are -inf.
    """
    m, n = w.shape[0] - 1, w.shape[1] - 1
    L = n + 2
    pad = np.full((m + 2, n + 2), -np.inf)
    pad[1, 1] = 0.0
    flat = pad.reshape(-1)
    wflat = np.ascontiguousarray(w, dtype=float).reshape(-1)
    for d in range(1, m + n + 1):
        lo, hi = max(0, d - n), min(d, m)
        if halfspace is not None:
            lo, hi = _clip_to_halfspace(halfspace, d, lo, hi)
            if lo > hi:
                continue
        cnt = hi - lo + 1
        # site (i, d - i) sits at i * (L - 1) + L + d + 1 in the padded array
        first = lo * (L - 1) + L + d + 1
        sites = slice(first, first + (cnt - 1) * (L - 1) + 1, L - 1)
        left = slice(first - L, first - L + (cnt - 1) * (L - 1) + 1, L - 1)
        below = slice(first - 1, first - 1 + (cnt - 1) * (L - 1) + 1, L - 1)
        wfirst = lo * n + d
        wsites = slice(wfirst, wfirst + (cnt - 1) * n + 1, n) if n > 0 else slice(wfirst, wfirst + 1)
        flat[sites] = wflat[wsites] + np.logaddexp(flat[left], flat[below])
    return pad[1:, 1:].copy()


def forward_logZ(env: EnvGrid, halfspace: tuple[int, int, int] | None = None) -> LogZGrid:
    """logZ(m,n) = omega(m,n) + LSE(logZ(m-1,n), logZ(m,n-1)), logZ(0,0) = 0.

    ``halfspace`` restricts the sweep as in :func:`_forward_dp`.
    """
    _check_env(env)
    return LogZGrid(_forward_dp(env.logw, halfspace), "forward")


def reverse_logZ(env: EnvGrid, halfspace: tuple[int, int, int] | None = None) -> LogZGrid:
    """Reverse partition function towards the far corner of a P2P grid.

    Includes the weight at the starting site, excludes the corner weight.
    Computed as the forward sweep of the grid rotated by half a turn;
    ``halfspace`` is then expressed in the rotated coordinates.
    """
    _check_env(env)
    if not env.is_p2p:
        raise ValueError("reverse_logZ needs a point-to-point environment")
    flipped = env.logw[::-1, ::-1].copy()
    flipped[0, 0] = 0.0
    out = _forward_dp(flipped, halfspace)[::-1, ::-1].copy()
    # the far corner itself carries no weight: logZ~(pN, qN) = 0
    return LogZGrid(out, "reverse")


def antidiagonal(fwd: LogZGrid, n: int) -> np.ndarray:
    m_max, n_max = fwd.logZ.shape[0] - 1, fwd.logZ.shape[1] - 1
    if n < 0 or n > m_max or n > n_max:
        raise ValueError(f"antidiagonal {n} leaves the grid {fwd.logZ.shape}")
    k = np.arange(n + 1)
    return fwd.logZ[k, n - k]


def endpoint_law(fwd: LogZGrid, n: int) -> EndpointLaw:
    """Q_n(k) = Z_{k,n-k} / sum_i Z_{i,n-i}."""
    return EndpointLaw.from_log_weights(antidiagonal(fwd, n))


def endpoint_mass_In(law_prev: EndpointLaw) -> float:
    """Largest one-step-ahead endpoint probability, max_k (q(k) + q(k+1)) / 2."""
    q = np.exp(law_prev.logq)
    padded = np.concatenate([[0.0], q, [0.0]])
    return float(np.max(padded[:-1] + padded[1:]) / 2.0)


def tail_mass(law: EndpointLaw, K: int) -> float:
    """Q_n[|x_n . e1 - l_n| >= K]."""
    q = np.exp(law.logq)
    k = np.arange(law.n + 1)
    return float(q[np.abs(k - law.l_n) >= K].sum())


def deviation_profile(source, n: int | None = None, scale: str = "sqrt", s_grid: Sequence[float] | None = None):
    """-(1/sqrt(n)) log Q_n(floor(n s)) (``scale="sqrt"``) or -(1/n) log Q_n(floor(n s)) (``"linear"``).

    ``source`` is either an :class:`EndpointLaw` or a forward :class:`LogZGrid`
    together with ``n``.
    """
    law = source if isinstance(source, EndpointLaw) else endpoint_law(source, n)
    grid = DEFAULT_S_GRID if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise ValueError("s-grid values must lie in [0, 1]")
    k = np.floor(law.n * grid + 1e-12).astype(int)
    if scale == "sqrt":
        norm = math.sqrt(law.n)
    elif scale == "linear":
        norm = float(law.n)
    else:
        raise ValueError("scale must be 'sqrt' or 'linear'")
    if law.n == 0:
        return np.zeros_like(grid)
    return -law.logq[k] / norm


def ratio_logU(fwd: LogZGrid, m: int, n: int) -> float:
    """log U_{m,n} = logZ(m,n) - logZ(m-1,n)."""
    M, N = fwd.logZ.shape
    if not (1 <= m < M and 0 <= n < N):
        raise ValueError(f"ratio_logU needs 1 <= m and an in-grid site, got ({m}, {n})")
    return float(fwd.logZ[m, n] - fwd.logZ[m - 1, n])


def ratio_logV(fwd: LogZGrid, m: int, n: int) -> float:
    """log V_{m,n} = logZ(m,n) - logZ(m,n-1)."""
    M, N = fwd.logZ.shape
    if not (0 <= m < M and 1 <= n < N):
        raise ValueError(f"ratio_logV needs 1 <= n and an in-grid site, got ({m}, {n})")
    return float(fwd.logZ[m, n] - fwd.logZ[m, n - 1])


def dp_walk(fwd: LogZGrid, n: int) -> np.ndarray:
    """Representation walk read off the DP: S_k = -(logZ(k,n-k) - logZ(0,n))."""
    row = antidiagonal(fwd, n)
    return -(row - row[0])


def p2l_antidiagonals(
    seeds: Sequence[SeedSpec],
    params: ModelParams,
    rows: Iterable[int],
) -> dict[int, np.ndarray]:
    """Streaming forward DP for a batch of P2L replicas.

    Returns ``{d: array of shape (len(seeds), d + 1)}`` with logZ(k, d - k) for
    each requested antidiagonal d. Weights match :func:`build_p2l_env` for the
    same seeds exactly, without materializing the grid.
    """
    wanted = sorted(set(int(r) for r in rows))
    if not wanted or wanted[0] < 0:
        raise ValueError("rows must be nonnegative")
    n = wanted[-1]
    R = len(seeds)
    south = np.empty((R, n))
    west = np.empty((R, n))
    bulk = np.empty((R, bulk_offset(n + 1) if n >= 2 else 0))
    for r, seed in enumerate(seeds):
        st = P2LStreams(seed, params)
        south[r] = st.south(n)
        west[r] = st.west(n)
        if n >= 2:
            bulk[r] = st.bulk(bulk.shape[1])
    out: dict[int, np.ndarray] = {}
    cur = np.zeros((R, 1))
    if 0 in wanted:
        out[0] = cur.copy()
    ninf = np.full((R, 1), -np.inf)
    for d in range(1, n + 1):
        w = np.empty((R, d + 1))
        w[:, 0] = west[:, d - 1]
        w[:, d] = south[:, d - 1]
        if d >= 2:
            off = bulk_offset(d)
            w[:, 1:d] = bulk[:, off : off + d - 1]
        padded = np.concatenate([ninf, cur, ninf], axis=1)
        # site (i, d-i): from (i-1, d-i) = padded[i] and from (i, d-i-1) = padded[i+1]
        cur = w + np.logaddexp(padded[:, :-1], padded[:, 1:])
        if d in wanted:
            out[d] = cur.copy()
    return out
