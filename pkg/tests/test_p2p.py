import functools
import math

import numpy as np
import pytest

from loggamma_polymer import experiments as ex
from loggamma_polymer.environment import EnvGrid, P2PParams, Regime, build_p2l_env, build_p2p_env
from loggamma_polymer.numerics import digamma, ks_two_sample
from loggamma_polymer.p2p import (
    CrossingEdge,
    anchor_edge,
    block_walk,
    centered_crossing_window,
    crossing_law,
    crossing_set,
    f_statistic,
    m_N_statistic,
    split_logZ,
)
from loggamma_polymer.sampling import ModelParams, SeedSpec


def brute_crossing_edges(p, q, N):
    below = lambda i, j: q * i + p * j <= p * q * N
    edges = set()
    for i in range(p * N + 1):
        for j in range(q * N + 1):
            if not below(i, j):
                continue
            if i + 1 <= p * N and not below(i + 1, j):
                edges.add(((i, j), (i + 1, j)))
            if j + 1 <= q * N and not below(i, j + 1):
                edges.add(((i, j), (i, j + 1)))
    return edges


def env_with(p, q, N, logw, theta_N=1.0, theta_S=1.0):
    return EnvGrid(np.asarray(logw, float), Regime("P2P", dict(p=p, q=q, N=N, mu=2.0, theta_N=theta_N, theta_S=theta_S)))


def test_smallest_crossing_set():
    edges = crossing_set(1, 1, 1)
    assert edges == [CrossingEdge((0, 1), (1, 1)), CrossingEdge((1, 0), (1, 1))]
    assert len(crossing_set(5, 2, 1)) == 7


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_crossing_set_matches_enumeration(p, q, N):
    edges = crossing_set(p, q, N)
    assert len(edges) == N * (p + q)
    assert {(e.z1, e.z2) for e in edges} == brute_crossing_edges(p, q, N)
    for e in edges:
        assert q * e.z1[0] + p * e.z1[1] <= p * q * N < q * e.z2[0] + p * e.z2[1]
    if math.gcd(p, q) == 1:
        assert len({f_statistic(e, p, q) for e in edges}) == len(edges)


def test_block_order():
    p, q, N = 2, 1, 4
    edges = crossing_set(p, q, N)
    for k in range(N):
        assert edges[k * (p + q)] == anchor_edge(k, p, q, N)
    f = [f_statistic(e, p, q) for e in edges]
    assert f == sorted(f)


def test_f_statistic_examples():
    assert f_statistic(CrossingEdge((1, 0), (1, 1)), 1, 1) == 1
    p, q, N = 3, 2, 5
    assert f_statistic(anchor_edge(0, p, q, N), p, q) == q - 2 * p * q * N
    assert f_statistic(anchor_edge(N, p, q, N), p, q) == 2 * p * q * N + q


def test_crossing_law_symmetric_and_hand_cases():
    law = crossing_law(env_with(1, 1, 1, np.zeros((2, 2))))
    assert np.allclose(law.probabilities, 0.5)
    w = np.array([[0.0, 0.3], [-0.7, 0.0]])
    law = crossing_law(env_with(1, 1, 1, w))
    # edge order: <(0,1),(1,1)> then <(1,0),(1,1)>
    via_west, via_south = math.exp(0.3), math.exp(-0.7)
    assert np.allclose(law.probabilities.ravel(), [via_west, via_south] / np.float64(via_west + via_south))
    assert law.mode == (0, 0)


def test_crossing_law_normalized_on_random_envs():
    for r in range(20):
        par = P2PParams(2, 1, 16, 2.0, 0.6 + 0.05 * r, 1.0)
        law = crossing_law(build_p2p_env(SeedSpec(41, r), par))
        assert law.identity_gap < 1e-9
        assert law.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
        assert law.probabilities.shape == (16, 3)


def test_half_sweeps_agree_with_full_sweeps():
    for p, q in [(2, 1), (1, 3), (2, 3)]:
        env = build_p2p_env(SeedSpec(42, p * 10 + q), P2PParams(p, q, 6, 2.0, 0.7, 1.2))
        full = crossing_law(env)
        half = crossing_law(env, full=False)
        assert np.allclose(full.logprob, half.logprob, atol=1e-12)
        assert np.array_equal(full.block_scores, half.block_scores)


def test_crossing_law_needs_p2p():
    env = build_p2l_env(SeedSpec(1), 3, 3, ModelParams(2.0, 1.0))
    with pytest.raises(ValueError):
        crossing_law(env)
    with pytest.raises(ValueError):
        block_walk(env)


def test_m_N_at_first_block():
    p, q, N = 2, 1, 3
    w = np.zeros((p * N + 1, q * N + 1))
    w[0, q * N] = 50.0  # every path through (0, qN) is favoured, so the first anchor wins
    law = crossing_law(env_with(p, q, N, w))
    assert law.favourite_block == 0
    assert m_N_statistic(law) == q - 2 * p * q * N


def test_m_N_range():
    par = P2PParams(2, 1, 16, 2.0, 1.0, 1.0)
    for r in range(1000):
        law = crossing_law(build_p2p_env(SeedSpec(43, r), par), full=False)
        x = m_N_statistic(law) / (4 * par.p * par.q * par.N) + 0.5
        assert 0.0 <= x <= 1.0 + 1.0 / par.N


def test_block_walk_matches_scores():
    for r in range(10):
        env = build_p2p_env(SeedSpec(44, r), P2PParams(3, 2, 7, 2.0, 0.8, 1.1))
        law = crossing_law(env)
        w = block_walk(env).positions
        s = law.block_scores
        assert np.max(np.abs(w + (s - s[0]))) < 1e-9
        assert int(np.argmin(w)) == law.favourite_block


def _increments(p, q, N, theta_N, theta_S, replicas, tag):
    par = P2PParams(p, q, N, 2.0, theta_N, theta_S)
    inc = []
    for r in range(replicas):
        env = build_p2p_env(ex.replica_seed(45, tag, r), par)
        inc.append(np.diff(block_walk(env, *split_logZ(env)).positions))
    return np.concatenate(inc), par


def test_block_increments_centered_at_equal_parameters():
    # 1e5 pooled blocks: at 1e4 the tolerance would be only 1.2 standard errors
    inc, _ = _increments(1, 1, 101, 1.0, 1.0, 1000, "eq")
    assert inc.size == 100_000
    assert inc.mean() == pytest.approx(0.0, abs=0.03)


def test_block_increment_drift():
    inc, par = _increments(1, 1, 101, 0.5, 1.5, 1000, "drift")
    assert par.drift() == pytest.approx(4.0)
    assert digamma(1.5) - digamma(0.5) == pytest.approx(2.0)
    assert inc.mean() == pytest.approx(4.0, abs=0.05)


def test_centered_window():
    env = build_p2p_env(SeedSpec(46), P2PParams(2, 1, 20, 2.0, 1.0, 1.0))
    law = crossing_law(env)
    win, tail = centered_crossing_window(law, 3)
    assert win.mass.sum() + tail == pytest.approx(1.0, abs=1e-12)
    assert win.offset == -3 * 3
    rows = win.mass.reshape(7, 3)
    assert np.allclose(rows[3], law.probabilities[law.favourite_block])
    whole, tail = centered_crossing_window(law, 40)
    assert tail == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        centered_crossing_window(law, -1)


@functools.lru_cache(maxsize=None)
def _ensemble(N, theta_N, theta_S, replicas, K=10):
    return ex.p2p_ensemble(47, f"t-p2p-{N}-{theta_N}-{theta_S}", P2PParams(2, 1, N, 2.0, theta_N, theta_S), replicas, K)


def test_crossing_windows_stabilize():
    _, _, w128 = _ensemble(128, 1.0, 1.0, 2000)
    _, _, w512 = _ensemble(512, 1.0, 1.0, 2000)
    assert np.abs(w128.mean(axis=0) - w512.mean(axis=0)).sum() < 0.07


def test_mode_mass_bounded_away_from_zero():
    _, mode, _ = _ensemble(512, 1.0, 1.0, 2000)
    assert np.mean(mode > 0.02) > 0.9


@pytest.mark.parametrize("theta_N,theta_S,sign", [(0.5, 1.5, 1), (1.5, 0.5, -1)])
def test_degenerate_cases_are_tight(theta_N, theta_S, sign):
    shifted = []
    for N in (128, 256):
        m, _, _ = _ensemble(N, theta_N, theta_S, 2000, 0)
        shifted.append(m + sign * 2 * 2 * N)
    assert ks_two_sample(*shifted)[0] < 0.05
