"""Tanaka's construction of a random walk conditioned to stay nonnegative.

Reversed excursions between ascending ladder epochs are glued together. We
compare the first few positions against brute-force rejection sampling and
check the persistence probability against Sparre Andersen's formula.
"""

import math

import numpy as np

from loggamma_polymer.conditioned_walk import (
    acceptance_probability,
    rejection_conditioned_ensemble,
    tanaka_up_sample,
)
from loggamma_polymer.numerics import ks_two_sample
from loggamma_polymer.sampling import ModelParams, SeedSpec

params = ModelParams(mu=2.0, theta=1.0)
K = 20
rng = SeedSpec(7).generator()
tanaka = np.array([tanaka_up_sample(rng, K, params).lower_envelope for _ in range(1000)])
rejected, trials = rejection_conditioned_ensemble(rng, 400, K, params, 1000)

for k in (1, 5, 10, 20):
    d, pvalue = ks_two_sample(tanaka[:, k], rejected[:, k])
    print(f"k={k:2d}: mean Tanaka {tanaka[:, k].mean():6.3f}, rejection {rejected[:, k].mean():6.3f}, KS p={pvalue:.2f}")

n = 400
exact = math.comb(2 * n, n) / 4**n
estimate = acceptance_probability(rng, n, params, 40000)
print(f"\nP(S_k >= 0 for k <= {n}): simulated {estimate:.4f}, Sparre Andersen {exact:.4f}")
