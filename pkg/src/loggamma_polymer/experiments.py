"""Replica ensembles shared by the command line and the acceptance suite.

Each ensemble is identified by a master seed and a string tag; replica r uses
the stream ``SeedSpec(master, derive_stream_id(tag, r))``. Replicas are
processed in fixed chunks, optionally by several worker processes, and the
results are concatenated in replica order, so the output does not depend on
the number of workers.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .environment import P2PParams, build_p2p_env
from .limit_law import centered_endpoint_window, xi_limit_sample
from .partition import EndpointLaw, p2l_antidiagonals
from .p2p import centered_crossing_window, crossing_law, m_N_statistic
from .sampling import ROLE_WALK, ModelParams, SeedSpec, derive_stream_id, walk_increment_sample

CHUNK = 100


def tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def replica_seed(master: int, tag: str, r: int) -> SeedSpec:
    return SeedSpec(master, derive_stream_id(tag_id(tag), r))


def _chunks(replicas: int, chunk: int = CHUNK):
    return [(a, min(a + chunk, replicas)) for a in range(0, replicas, chunk)]


def run_chunked(fn, args: list, workers: int = 1) -> list:
    """Apply ``fn`` to each argument tuple, in order, possibly in worker processes."""
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*args)))


def log_normalize(rows: np.ndarray) -> np.ndarray:
    """Row-wise log of the normalized exp(rows)."""
    top = rows.max(axis=1, keepdims=True)
    return rows - top - np.log(np.exp(rows - top).sum(axis=1, keepdims=True))


# walk pipeline -----------------------------------------------------------


def walk_positions(seed: SeedSpec, n: int, params: ModelParams) -> np.ndarray:
    inc = walk_increment_sample(seed.generator(ROLE_WALK), params, n)
    return np.concatenate([[0.0], np.cumsum(inc)])


def _walk_chunk(master, tag, a, b, n, mu, theta, stat):
    params = ModelParams(mu, theta)
    rows = np.stack([walk_positions(replica_seed(master, tag, r), n, params) for r in range(a, b)])
    return stat(rows)


def walk_statistics(master: int, tag: str, n: int, params: ModelParams, replicas: int, stat, workers: int = 1):
    """``stat`` applied to chunks of walk paths (shape (chunk, n + 1)), concatenated."""
    args = [(master, tag, a, b, n, params.mu, params.theta, stat) for a, b in _chunks(replicas)]
    return np.concatenate(run_chunked(_walk_chunk, args, workers))


# row-wise statistics of endpoint laws given as log q arrays


def stat_favourite(logq: np.ndarray) -> np.ndarray:
    return np.argmax(logq, axis=1)


def stat_mode_mass(logq: np.ndarray) -> np.ndarray:
    return np.exp(logq.max(axis=1))


def stat_In(logq_prev: np.ndarray) -> np.ndarray:
    q = np.exp(logq_prev)
    padded = np.pad(q, ((0, 0), (1, 1)))
    return (padded[:, :-1] + padded[:, 1:]).max(axis=1) / 2.0


def laws_from_walks(rows: np.ndarray) -> np.ndarray:
    return log_normalize(-rows)


def walk_favourite(rows):
    return stat_favourite(-rows)


def walk_mode_mass(rows):
    return stat_mode_mass(laws_from_walks(rows))


def walk_In(rows):
    # I_n reads the law on antidiagonal n - 1
    return stat_In(laws_from_walks(rows[:, :-1]))


def walk_endpoint(rows):
    return rows[:, -1]


# DP pipeline -------------------------------------------------------------


def _dp_chunk(master, tag, a, b, mu, theta, rows, stat):
    params = ModelParams(mu, theta)
    seeds = [replica_seed(master, tag, r) for r in range(a, b)]
    out = p2l_antidiagonals(seeds, params, rows)
    return stat(out)


def dp_statistics(master: int, tag: str, params: ModelParams, rows, replicas: int, stat, workers: int = 1) -> list:
    """``stat`` applied to ``{d: logZ rows}`` for each replica chunk; list of per-chunk results."""
    rows = tuple(sorted(set(rows)))
    args = [(master, tag, a, b, params.mu, params.theta, rows, stat) for a, b in _chunks(replicas)]
    return run_chunked(_dp_chunk, args, workers)


def centered_windows(logq: np.ndarray, K: int) -> np.ndarray:
    """Row-wise Q(l + k) for |k| <= K."""
    out = np.empty((logq.shape[0], 2 * K + 1))
    n = logq.shape[1] - 1
    for r in range(logq.shape[0]):
        out[r] = centered_endpoint_window(EndpointLaw(n, logq[r]), K).mass
    return out


def tail_masses(logq: np.ndarray, K: int) -> np.ndarray:
    q = np.exp(logq)
    ell = np.argmax(logq, axis=1)
    k = np.arange(logq.shape[1])
    return np.where(np.abs(k[None, :] - ell[:, None]) >= K, q, 0.0).sum(axis=1)


# limit law ---------------------------------------------------------------


def _xi_chunk(master, tag, a, b, K, mu, theta):
    params = ModelParams(mu, theta)
    return np.stack(
        [xi_limit_sample(replica_seed(master, tag, r).generator(ROLE_WALK), K, params).mass for r in range(a, b)]
    )


def xi_windows(master: int, tag: str, K: int, params: ModelParams, replicas: int, workers: int = 1) -> np.ndarray:
    args = [(master, tag, a, b, K, params.mu, params.theta) for a, b in _chunks(replicas)]
    return np.concatenate(run_chunked(_xi_chunk, args, workers))


# point-to-point ----------------------------------------------------------


def _p2p_chunk(master, tag, a, b, par_tuple, K):
    par = P2PParams(*par_tuple)
    m = np.empty(b - a, dtype=np.int64)
    mode = np.empty(b - a)
    windows = np.empty((b - a, (2 * K + 1) * (par.p + par.q)))
    for idx, r in enumerate(range(a, b)):
        env = build_p2p_env(replica_seed(master, tag, r), par)
        law = crossing_law(env, full=False)
        m[idx] = m_N_statistic(law)
        mode[idx] = law.mode_mass
        windows[idx] = centered_crossing_window(law, K)[0].mass
    return m, mode, windows


def p2p_ensemble(master: int, tag: str, par: P2PParams, replicas: int, K: int = 10, workers: int = 1):
    """(m_N, mode mass, flattened centred windows) over replicas."""
    par_tuple = (par.p, par.q, par.N, par.mu, par.theta_N, par.theta_S)
    args = [(master, tag, a, b, par_tuple, K) for a, b in _chunks(replicas, 50)]
    parts = run_chunked(_p2p_chunk, args, workers)
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )
