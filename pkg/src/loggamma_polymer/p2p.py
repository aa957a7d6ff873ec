"""Point-to-point polymer seen through the transverse diagonal.

The rectangle [0, pN] x [0, qN] is cut by the line q x + p y = pqN. Every
up-right path from the origin to (pN, qN) crosses it through exactly one edge
<z1, z2> with z1 on or below the line and z2 strictly above. Those edges are
grouped into N identical blocks of p + q edges, anchored at
z1^k = (kp, (N - k) q) and z2^k = z1^k + e1.

Sign convention: the block walk is W_k = -(s_k - s_0) with block scores
s_k = logZ(z1^k) + logZ~(z2^k), so the crossing law is roughly proportional to
exp(-W) and the favourite block is argmin W = argmax s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditioned_walk import WalkPath
from .environment import EnvGrid
from .numerics import LatticeDist
from .partition import forward_logZ, reverse_logZ


@dataclass(frozen=True)
class CrossingEdge:
    z1: tuple[int, int]
    z2: tuple[int, int]

    @property
    def is_up(self) -> bool:
        return self.z2[1] == self.z1[1] + 1


def _check_pqN(p: int, q: int, N: int) -> None:
    for name, v in (("p", p), ("q", q), ("N", N)):
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def _crossing_arrays(p: int, q: int, N: int):
    """Edge starts (i, j), direction flags and block indices, sorted in block order."""
    _check_pqN(p, q, N)
    I, J = np.meshgrid(np.arange(p * N + 1), np.arange(q * N + 1), indexing="ij")
    below = q * I + p * J <= p * q * N
    right = below[:-1, :] & ~below[1:, :]
    up = below[:, :-1] & ~below[:, 1:]
    ri, rj = np.nonzero(right)
    ui, uj = np.nonzero(up)
    i = np.concatenate([ui, ri])
    j = np.concatenate([uj, rj])
    is_up = np.concatenate([np.ones(ui.size, bool), np.zeros(ri.size, bool)])
    c = q * i - p * j
    order = np.lexsort((~is_up, c))  # by c, up edges before right edges at equal c
    i, j, is_up, c = i[order], j[order], is_up[order], c[order]
    # anchors sit at c_k = pq(2k - N); a right edge at c_k opens block k, an up edge there closes block k - 1
    t2 = c + p * q * N  # equals 2pq * t
    block = np.where(is_up, -(-t2 // (2 * p * q)) - 1, t2 // (2 * p * q))
    return i, j, is_up, block


def crossing_set(p: int, q: int, N: int) -> list[CrossingEdge]:
    """All up/right edges leaving the closed lower half-space inside the rectangle, in block order."""
    i, j, is_up, _ = _crossing_arrays(p, q, N)
    return [
        CrossingEdge((int(a), int(b)), (int(a), int(b) + 1) if u else (int(a) + 1, int(b)))
        for a, b, u in zip(i, j, is_up)
    ]


def f_statistic(edge: CrossingEdge, p: int, q: int) -> int:
    """(z1 + z2) . (q, -p)."""
    return q * (edge.z1[0] + edge.z2[0]) - p * (edge.z1[1] + edge.z2[1])


def anchor_edge(k: int, p: int, q: int, N: int) -> CrossingEdge:
    z1 = (k * p, (N - k) * q)
    return CrossingEdge(z1, (z1[0] + 1, z1[1]))


@dataclass
class CrossingLaw:
    """Crossing-edge law of one environment.

    ``logprob`` has shape (N, p + q), indexed by (block k, offset a).
    ``block_scores[k] = logZ(z1^k) + logZ~(z2^k)``.
    """

    p: int
    q: int
    N: int
    logprob: np.ndarray
    block_scores: np.ndarray
    identity_gap: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.logprob)

    @property
    def mode(self) -> tuple[int, int]:
        flat = int(np.argmax(self.logprob))  # smallest (k, a) on ties
        return divmod(flat, self.p + self.q)

    @property
    def mode_mass(self) -> float:
        return float(math.exp(self.logprob.max()))

    @property
    def favourite_block(self) -> int:
        return int(np.argmax(self.block_scores))


def split_logZ(env: EnvGrid):
    """Forward logZ on the lower half-space and reverse logZ on its complement.

    Each sweep covers about half the rectangle, which is all the crossing law
    and the block walk read.
    """
    par = env.regime.p2p_params()
    c = par.p * par.q * par.N
    fwd = forward_logZ(env, halfspace=(par.q, par.p, c))
    rev = reverse_logZ(env, halfspace=(par.q, par.p, c - 1))
    return fwd, rev


def crossing_law(env: EnvGrid, fwd=None, rev=None, full: bool = True) -> CrossingLaw:
    """Q(<z1, z2>) = Z(z1) Z~(z2) exp(omega_corner) / Z(pN, qN), in log form.

    With ``full=False`` only the half sweeps of :func:`split_logZ` are run;
    Z(pN, qN) is then taken as the sum over crossing edges and
    ``identity_gap`` is NaN.
    """
    if not env.is_p2p:
        raise ValueError("crossing_law needs a point-to-point environment")
    par = env.regime.p2p_params()
    p, q, N = par.p, par.q, par.N
    if fwd is None or rev is None:
        fwd, rev = (forward_logZ(env), reverse_logZ(env)) if full else split_logZ(env)
    i, j, is_up, block = _crossing_arrays(p, q, N)
    i2 = i + ~is_up
    j2 = j + is_up
    logits = fwd.logZ[i, j] + rev.logZ[i2, j2] + env.corner_weight
    lse = np.logaddexp.reduce(logits)
    if np.isfinite(fwd.logZ[p * N, q * N]):
        total = fwd.logZ[p * N, q * N] + env.corner_weight
        gap = abs(total - lse)
    else:
        total, gap = lse, math.nan
    logprob = (logits - total).reshape(N, p + q)
    assert np.all(block.reshape(N, p + q) == np.arange(N)[:, None])
    k = np.arange(N)
    scores = fwd.logZ[k * p, (N - k) * q] + rev.logZ[k * p + 1, (N - k) * q]
    return CrossingLaw(p, q, N, logprob, scores, float(gap))


def crossing_identity_gap(env: EnvGrid) -> float:
    """|logZ(pN, qN) - LSE over crossing edges|; zero up to rounding."""
    return crossing_law(env).identity_gap


def m_N_statistic(law: CrossingLaw) -> int:
    """F of the anchor edge of the favourite block: 2pq(2l - N) + q."""
    return f_statistic(anchor_edge(law.favourite_block, law.p, law.q, law.N), law.p, law.q)


def arcsine_scaled_m(m: int, p: int, q: int, N: int) -> float:
    """m_N / (4pqN) + 1/2."""
    return m / (4 * p * q * N) + 0.5


def _lower_path(p: int, q: int, N: int) -> np.ndarray:
    """Down-right staircase along the boundary of the lower half-space from (0, qN) to (pN, 0)."""
    pts = [(0, q * N)]
    i, j = 0, q * N
    while (i, j) != (p * N, 0):
        if i < p * N and q * (i + 1) + p * j <= p * q * N:
            i += 1
        else:
            j -= 1
        pts.append((i, j))
    return np.array(pts)


def block_walk(env: EnvGrid, fwd=None, rev=None) -> WalkPath:
    """W_0..W_{N-1} from the edge ratio variables along the two transverse diagonals.

    Below the line the edge variables are U (horizontal) and 1/V (vertical) of
    the forward partition function; above it they are 1/U~ and V~ of the
    reverse one. Summing their logs from the left end to z1^k and z2^k and
    negating gives W_k.
    """
    if not env.is_p2p:
        raise ValueError("block_walk needs a point-to-point environment")
    par = env.regime.p2p_params()
    p, q, N = par.p, par.q, par.N
    fwd = forward_logZ(env) if fwd is None else fwd
    rev = reverse_logZ(env) if rev is None else rev
    low = _lower_path(p, q, N)
    Zf = fwd.logZ
    # right step a -> b contributes log U_b = logZ(b) - logZ(a); a down step
    # contributes log V_a^{-1} = logZ(b) - logZ(a) as well, so the sum telescopes
    lower_sum = Zf[low[:, 0], low[:, 1]] - Zf[0, q * N]
    up_pts = low + 1
    keep = (up_pts[:, 0] <= p * N) & (up_pts[:, 1] <= q * N)
    upper = up_pts[keep]  # starts at (1, qN)
    Zr = rev.logZ
    # right step: log (1/U~_a) = logZ~(b) - logZ~(a); down step: log V~_b, the same difference
    upper_sum = Zr[upper[:, 0], upper[:, 1]] - Zr[1, q * N]
    lower_index = {tuple(pt): n for n, pt in enumerate(low)}
    upper_index = {tuple(pt): n for n, pt in enumerate(upper)}
    w = np.empty(N)
    for k in range(N):
        z1 = (k * p, (N - k) * q)
        z2 = (k * p + 1, (N - k) * q)
        w[k] = -(lower_sum[lower_index[z1]] + upper_sum[upper_index[z2]])
    return WalkPath(w)


def centered_crossing_window(law: CrossingLaw, K: int) -> tuple[LatticeDist, float]:
    """Crossing law recentred at the favourite block, flattened over (k, a) with |k| <= K.

    Returns the window as a lattice distribution with offset -K(p + q) and the
    mass left outside it.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    width = law.p + law.q
    prob = law.probabilities
    ell = law.favourite_block
    win = np.zeros((2 * K + 1, width))
    lo = max(0, ell - K)
    hi = min(law.N - 1, ell + K)
    win[lo - ell + K : hi - ell + K + 1] = prob[lo : hi + 1]
    tail = float(max(0.0, prob.sum() - win.sum()))
    return LatticeDist(-K * width, win.ravel()), tail
