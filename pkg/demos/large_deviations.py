"""Away from equilibrium the endpoint mass at sn decays exponentially in n.

With theta != mu/2 the walk has drift and Q_n(sn) ~ exp(-n I(s)); the
empirical rate -log Q_n(sn) / n is compared with the exact rate.
"""

import numpy as np

from loggamma_polymer.experiments import laws_from_walks, walk_statistics
from loggamma_polymer.sampling import ModelParams

params = ModelParams(mu=2.0, theta=1.5)
n = 8192
print(f"drift of the walk: {params.drift():.4f}")
for s in (0.25, 0.5, 0.75):
    k = int(s * n)
    logq = walk_statistics(7, "demo-ldp", n, params, 200, lambda rows: laws_from_walks(rows)[:, k])
    rate = -np.mean(logq) / n
    print(f"s={s:.2f}: empirical rate {rate:.4f}, exact rate s * drift = {params.drift() * s:.4f}")
