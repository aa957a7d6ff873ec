"""The favourite endpoint, rescaled by n, follows the arcsine law.

In equilibrium the endpoint law is proportional to exp(-S) for a mean-zero
random walk S, so the favourite point is the argmin of S and the classical
arcsine law for the location of a random walk minimum applies.
"""

import numpy as np

from loggamma_polymer.experiments import walk_favourite, walk_statistics
from loggamma_polymer.numerics import arcsine_cdf, ks_statistic
from loggamma_polymer.sampling import ModelParams

params = ModelParams(mu=2.0, theta=1.0)
n = 4096
ell = walk_statistics(7, "demo-arcsine", n, params, 5000, walk_favourite)
scaled = ell / n
d, pvalue = ks_statistic(scaled, arcsine_cdf)
print(f"5000 replicas at n={n}: KS distance to arcsine {d:.4f} (p={pvalue:.2f})")

edges = np.linspace(0, 1, 11)
hist, _ = np.histogram(scaled, edges)
expected = np.diff(arcsine_cdf(edges)) * scaled.size
for a, h, e in zip(edges[:-1], hist, expected):
    print(f"[{a:.1f}, {a + 0.1:.1f})  observed {h:5d}  arcsine {e:7.1f}")
