import numpy as np
import pytest

from loggamma_polymer import experiments as ex
from loggamma_polymer.limit_law import (
    XiWindow,
    centered_endpoint_window,
    xi_limit_drift,
    xi_limit_equilibrium,
    xi_limit_sample,
)
from loggamma_polymer.partition import EndpointLaw
from loggamma_polymer.sampling import ModelParams, SeedSpec

EQ = ModelParams(2.0, 1.0)
UP = ModelParams(2.0, 1.5)
DOWN = ModelParams(2.0, 0.5)


def rng(stream=0):
    return SeedSpec(31, stream).generator()


def test_equilibrium_samples_peak_at_zero():
    g = rng()
    for _ in range(300):
        w = xi_limit_equilibrium(g, 15, EQ)
        assert np.all(w.mass[15] >= w.mass)
        assert w.mass.sum() <= 1.0
        assert w.mass.sum() + w.tail_bound == pytest.approx(1.0, abs=1e-12)
        assert w.truncation < 1e-9


def test_equilibrium_rejects_drift():
    with pytest.raises(ValueError):
        xi_limit_equilibrium(rng(), 5, UP)
    with pytest.raises(ValueError):
        xi_limit_equilibrium(rng(), -1, EQ)


def test_xi0_matches_dp_mode_mass():
    xi = ex.xi_windows(31, "t-xi", 15, EQ, 3000)[:, 15]
    modes = np.concatenate(
        ex.dp_statistics(31, "t-xi-dp", EQ, [2048], 200, lambda out: ex.stat_mode_mass(ex.log_normalize(out[2048])))
    )
    se = np.hypot(xi.std(ddof=1) / np.sqrt(xi.size), modes.std(ddof=1) / np.sqrt(modes.size))
    assert abs(xi.mean() - modes.mean()) < 2 * se


@pytest.mark.parametrize("params", [UP, DOWN])
def test_drift_samples(params):
    g = rng(1)
    for _ in range(200):
        w = xi_limit_drift(g, 10, params)
        assert int(np.argmax(w.mass)) == 10
        assert w.mass.sum() + w.tail_bound == pytest.approx(1.0, abs=1e-6)


def test_drift_rejects_equilibrium():
    with pytest.raises(ValueError):
        xi_limit_drift(rng(), 5, EQ)


def test_drift_mirror_symmetry():
    up = np.mean([xi_limit_drift(rng(2), 8, UP).mass for _ in range(1)] + [xi_limit_sample(rng(3 + i), 8, UP).mass for i in range(1500)], axis=0)
    down = np.mean([xi_limit_sample(rng(5000 + i), 8, DOWN).mass for i in range(1500)], axis=0)
    assert np.abs(up - down[::-1]).sum() < 0.06


def _centered_windows(out, n, K):
    return ex.centered_windows(ex.log_normalize(out[n]), K)


def test_drift_window_matches_dp_windows():
    # the law is localized at the origin when theta > mu/2, so n = 512 already sits in the limit regime
    import functools

    dp = np.concatenate(
        ex.dp_statistics(31, "t-drift-dp", UP, [512], 2000, functools.partial(_centered_windows, n=512, K=15))
    )
    xi = ex.xi_windows(31, "t-drift-xi", 15, UP, 2000)
    assert np.abs(dp.mean(axis=0) - xi.mean(axis=0)).sum() < 0.05


def test_centered_window_cases():
    law = EndpointLaw(2, np.log([0.25, 0.5, 0.25]))
    w = centered_endpoint_window(law, 1)
    assert np.allclose(w.mass, [0.25, 0.5, 0.25]) and w.tail_bound == pytest.approx(0.0)
    big = centered_endpoint_window(law, 5)
    assert big.mass.sum() == pytest.approx(1.0) and big.tail_bound == pytest.approx(0.0)
    law = EndpointLaw(4, np.log([0.05, 0.1, 0.6, 0.15, 0.1]))
    w = centered_endpoint_window(law, 1)
    assert np.allclose(w.mass, [0.1, 0.6, 0.15])
    assert w.tail_bound == pytest.approx(1.0 - w.mass.sum())
    with pytest.raises(ValueError):
        centered_endpoint_window(law, -1)


def test_window_helpers():
    w = XiWindow(1, np.array([0.25, 0.5, 0.25]), 0.0)
    assert w.mode_mass == 0.5
    assert w.endpoint_mass_I() == pytest.approx(3 / 8)
    assert w.dist.offset == -1
