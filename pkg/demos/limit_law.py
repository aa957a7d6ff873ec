"""The endpoint law seen from its mode converges to a random limit measure.

The limit is built from two independent conditioned walks glued at the
minimum. Its window around the mode is compared with finite-n windows
computed by dynamic programming.
"""

import numpy as np

from loggamma_polymer.environment import build_p2l_env
from loggamma_polymer.limit_law import centered_endpoint_window, mean_window, xi_limit_sample
from loggamma_polymer.partition import endpoint_law, forward_logZ
from loggamma_polymer.sampling import ModelParams, SeedSpec

params = ModelParams(mu=2.0, theta=1.0)
K = 5
rng = SeedSpec(7).generator()
limit = mean_window([xi_limit_sample(rng, K, params) for _ in range(500)])

n = 256
finite = []
for r in range(100):
    fwd = forward_logZ(build_p2l_env(SeedSpec(7, r + 1), n, n, params))
    finite.append(centered_endpoint_window(endpoint_law(fwd, n), K))
finite = mean_window(finite)

print(f"{'offset':>6} {'limit':>8} {'n=' + str(n):>8}")
for k, a, b in zip(range(-K, K + 1), limit, finite):
    print(f"{k:6d} {a:8.4f} {b:8.4f}")
print(f"sum of |difference|: {np.abs(limit - finite).sum():.4f}")
