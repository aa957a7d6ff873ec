"""Seeded random streams and the model's primitive distributions.

Every random quantity in the package is drawn from a stream identified by a
:class:`SeedSpec` ``(master_seed, stream_id)`` plus an optional role label.
The stream is a PCG64 generator keyed by ``SeedSequence(master_seed,
spawn_key=(stream_id, role))``, so replicas can be produced in any order, by
any number of workers, and still reproduce bit for bit.

Sign convention for the representation walk: the endpoint law on antidiagonal
n is proportional to ``exp(-S_k)`` with increments
``X = log G_U - log G_V``, ``G_U ~ Gamma(theta)``, ``G_V ~ Gamma(mu - theta)``.
Then ``E X = digamma(theta) - digamma(mu - theta)``, negative for
``theta < mu/2``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

SEED_ENV_VAR = "LOGGAMMA_POLYMER_SEED"

# role tags for independent substreams of one replica
ROLE_DEFAULT = 0
ROLE_BULK = 1
ROLE_SOUTH = 2
ROLE_WEST = 3
ROLE_EAST = 4
ROLE_NORTH = 5
ROLE_WALK = 6
ROLE_WALK_DOWN = 7


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def child(self, stream_id: int) -> "SeedSpec":
        """Seed of replica ``stream_id`` under the same master seed."""
        return SeedSpec(self.master_seed, stream_id)

    def generator(self, role: int = ROLE_DEFAULT) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, role))
        return np.random.Generator(np.random.PCG64(ss))


def default_master_seed(fallback: int = 7) -> int:
    value = os.environ.get(SEED_ENV_VAR)
    return int(value) if value not in (None, "") else fallback


def derive_stream_id(*parts: int) -> int:
    """Hash a tuple of nonnegative integers into a 64-bit stream id."""
    ss = np.random.SeedSequence(list(parts))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ModelParams:
    mu: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.theta < self.mu and math.isfinite(self.mu)):
            raise ValueError(f"parameters must satisfy 0 < theta < mu, got mu={self.mu}, theta={self.theta}")

    @property
    def is_equilibrium(self) -> bool:
        return math.isclose(self.theta, self.mu / 2, rel_tol=0.0, abs_tol=1e-12)

    def drift(self) -> float:
        from .numerics import digamma

        return digamma(self.theta) - digamma(self.mu - self.theta)

    def increment_variance(self) -> float:
        from .numerics import trigamma

        return trigamma(self.theta) + trigamma(self.mu - self.theta)


def _check_shape(shape: float) -> None:
    if not shape > 0:
        raise ValueError(f"gamma shape must be positive, got {shape!r}")


def gamma_sample(rng: np.random.Generator, shape: float, size=None):
    """Gamma(shape, 1) variates.

    numpy's generator uses the Marsaglia-Tsang squeeze for shape >= 1 and a
    rejection scheme for shape < 1.
    """
    _check_shape(shape)
    return rng.standard_gamma(shape, size=size)


def log_weight_sample(rng: np.random.Generator, shape: float, size=None):
    """omega = -log G with G ~ Gamma(shape, 1), i.e. log of an inverse-gamma weight."""
    return -np.log(gamma_sample(rng, shape, size))


def walk_increment_sample(rng: np.random.Generator, params: ModelParams, size=None):
    """Increments X = log G_U - log G_V of the representation walk."""
    gu = gamma_sample(rng, params.theta, size)
    gv = gamma_sample(rng, params.mu - params.theta, size)
    return np.log(gu) - np.log(gv)
