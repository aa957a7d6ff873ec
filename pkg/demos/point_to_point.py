"""Where a point-to-point polymer crosses the transverse diagonal.

The crossing law is proportional to exp(-W) for a walk W built from block
increments, so the favourite crossing block behaves like a random walk
minimizer and follows the arcsine law after rescaling.
"""

import numpy as np

from loggamma_polymer.environment import P2PParams
from loggamma_polymer.experiments import p2p_ensemble
from loggamma_polymer.numerics import arcsine_cdf, ks_statistic
from loggamma_polymer.p2p import arcsine_scaled_m

par = P2PParams(p=2, q=1, N=128, mu=2.0, theta_N=1.0, theta_S=1.0)
m, mode, _ = p2p_ensemble(7, "demo-p2p", par, 600, K=3)
scaled = np.array([arcsine_scaled_m(int(v), par.p, par.q, par.N) for v in m])
d, pvalue = ks_statistic(scaled, arcsine_cdf)
print(f"600 environments, p={par.p} q={par.q} N={par.N}")
print(f"KS distance of m_N / (4pqN) + 1/2 to arcsine: {d:.4f} (p={pvalue:.2f})")
print(f"mean mass of the most likely crossing edge: {mode.mean():.3f}")
