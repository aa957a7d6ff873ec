"""Lattice environments of log-weights omega(i, j) = log Y_{i,j}.

Point-to-line grids (``P2L``) follow b.c.(theta): inverse Gamma(theta) weights
on the south axis, inverse Gamma(mu - theta) on the west axis and inverse
Gamma(mu) in the bulk. Point-to-point grids (``P2P``) carry four boundary
parameters on the rectangle [0, pN] x [0, qN].

P2L weights come from three role substreams of one replica seed (bulk, south,
west). The bulk stream is consumed antidiagonal by antidiagonal, so the weight
at a site does not depend on the size of the grid it is read into; the
streaming DP in :mod:`loggamma_polymer.partition` reproduces the materialized
grid exactly.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import asdict, dataclass, field

import numpy as np

from .sampling import (
    ROLE_BULK,
    ROLE_EAST,
    ROLE_NORTH,
    ROLE_SOUTH,
    ROLE_WEST,
    ModelParams,
    SeedSpec,
    log_weight_sample,
)

MAGIC = b"LGPENV"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class P2PParams:
    p: int
    q: int
    N: int
    mu: float
    theta_N: float
    theta_S: float

    def __post_init__(self):
        for name in ("p", "q", "N"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("theta_N", "theta_S"):
            if not 0.0 < getattr(self, name) < self.mu:
                raise ValueError(f"{name} must lie in (0, mu)")
        assert abs(self.theta_E + self.theta_N - self.mu) < 1e-15
        assert abs(self.theta_W + self.theta_S - self.mu) < 1e-15

    @property
    def theta_E(self) -> float:
        return self.mu - self.theta_N

    @property
    def theta_W(self) -> float:
        return self.mu - self.theta_S

    @property
    def width(self) -> int:
        return self.p * self.N

    @property
    def height(self) -> int:
        return self.q * self.N

    def drift(self) -> float:
        """Mean of one block increment of the crossing walk."""
        from .numerics import digamma

        return self.p * (digamma(self.theta_S) - digamma(self.theta_N)) + self.q * (
            digamma(self.theta_E) - digamma(self.theta_W)
        )


@dataclass(frozen=True)
class Regime:
    kind: str  # "P2L" or "P2P"
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Regime":
        obj = json.loads(text)
        return cls(obj["kind"], obj["params"])

    def p2p_params(self) -> P2PParams:
        if self.kind != "P2P":
            raise ValueError("not a point-to-point regime")
        return P2PParams(**self.params)

    def model_params(self) -> ModelParams:
        if self.kind != "P2L":
            raise ValueError("not a point-to-line regime")
        return ModelParams(**self.params)


@dataclass
class EnvGrid:
    """Log-weights ``logw[i, j] = omega(i, j)`` on {0..m} x {0..n}.

    For P2P grids both corners hold 0; ``corner_weight`` is the omega value that
    multiplies every crossing probability (it cancels, and the model leaves it
    unspecified, so it defaults to 0).
    """

    logw: np.ndarray
    regime: Regime
    master_seed: int | None = None
    stream_id: int | None = None
    corner_weight: float = 0.0

    def __post_init__(self):
        self.logw = np.asarray(self.logw, dtype=np.float64)
        if self.logw.ndim != 2:
            raise ValueError("logw must be two-dimensional")
        if self.logw[0, 0] != 0.0:
            raise ValueError("omega(0,0) must be 0")
        if not np.all(np.isfinite(self.logw)):
            raise ValueError("log-weights must be finite")

    @property
    def m(self) -> int:
        return self.logw.shape[0] - 1

    @property
    def n(self) -> int:
        return self.logw.shape[1] - 1

    @property
    def is_p2p(self) -> bool:
        return self.regime.kind == "P2P"

    def transposed(self) -> "EnvGrid":
        params = dict(self.regime.params)
        if self.regime.kind == "P2L":
            params["theta"] = params["mu"] - params["theta"]
        return EnvGrid(self.logw.T.copy(), Regime(self.regime.kind, params), self.master_seed, self.stream_id)

    # binary dump: header line of JSON after a fixed magic, then the payload
    def to_bytes(self) -> bytes:
        header = {
            "version": FORMAT_VERSION,
            "dims": list(self.logw.shape),
            "regime": self.regime.kind,
            "params": self.regime.params,
            "master_seed": self.master_seed,
            "stream_id": self.stream_id,
            "corner_weight": self.corner_weight,
        }
        hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<HI", FORMAT_VERSION, len(hbytes)))
        buf.write(hbytes)
        buf.write(self.logw.astype("<f8").tobytes(order="C"))
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "EnvGrid":
        if data[: len(MAGIC)] != MAGIC:
            raise ValueError("not an environment dump")
        pos = len(MAGIC)
        version, hlen = struct.unpack_from("<HI", data, pos)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported dump version {version}")
        pos += struct.calcsize("<HI")
        header = json.loads(data[pos : pos + hlen].decode("utf-8"))
        pos += hlen
        shape = tuple(header["dims"])
        logw = np.frombuffer(data, dtype="<f8", count=shape[0] * shape[1], offset=pos).reshape(shape)
        return cls(
            logw.astype(np.float64),
            Regime(header["regime"], header["params"]),
            header["master_seed"],
            header["stream_id"],
            header["corner_weight"],
        )

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "EnvGrid":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def bulk_offset(d: int) -> int:
    """Index of the first bulk draw of antidiagonal d (d >= 2) in the bulk stream."""
    return (d - 2) * (d - 1) // 2


class P2LStreams:
    """Role substreams of one replica, with prefix-consistent draws.

    Antidiagonal d has bulk sites (i, d - i) for i = 1..d-1, drawn in that
    order; south and west axis sites are drawn in increasing index order.
    """

    def __init__(self, seed: SeedSpec, params: ModelParams):
        self.params = params
        self._bulk = seed.generator(ROLE_BULK)
        self._south = seed.generator(ROLE_SOUTH)
        self._west = seed.generator(ROLE_WEST)

    def bulk(self, count: int) -> np.ndarray:
        return log_weight_sample(self._bulk, self.params.mu, count)

    def south(self, count: int) -> np.ndarray:
        return log_weight_sample(self._south, self.params.theta, count)

    def west(self, count: int) -> np.ndarray:
        return log_weight_sample(self._west, self.params.mu - self.params.theta, count)

    def triangle(self, n: int) -> np.ndarray:
        """Weights of all antidiagonals 0..n packed as a triangle (row d has d+1 entries)."""
        south = self.south(n)
        west = self.west(n)
        bulk = self.bulk(bulk_offset(n + 1)) if n >= 2 else np.empty(0)
        out = np.zeros((n + 1) * (n + 2) // 2)
        for d in range(1, n + 1):
            start = d * (d + 1) // 2
            out[start] = west[d - 1]  # (0, d)
            out[start + d] = south[d - 1]  # (d, 0)
            if d >= 2:
                b = bulk[bulk_offset(d) : bulk_offset(d) + d - 1]
                out[start + 1 : start + d] = b
        return out


def triangle_row(tri: np.ndarray, d: int) -> np.ndarray:
    """Antidiagonal d of a packed triangle, indexed by i (site (i, d - i))."""
    start = d * (d + 1) // 2
    return tri[start : start + d + 1]


def build_p2l_env(seed: SeedSpec, m: int, n: int, params: ModelParams) -> EnvGrid:
    if m < 0 or n < 0:
        raise ValueError("grid dimensions must be nonnegative")
    streams = P2LStreams(seed, params)
    logw = np.zeros((m + 1, n + 1))
    logw[1:, 0] = streams.south(m)
    logw[0, 1:] = streams.west(n)
    dmax = m + n
    if m >= 1 and n >= 1:
        bulk = streams.bulk(bulk_offset(dmax + 1))
        for d in range(2, dmax + 1):
            i = np.arange(1, d)
            keep = (i <= m) & (d - i <= n)
            vals = bulk[bulk_offset(d) : bulk_offset(d) + d - 1]
            logw[i[keep], d - i[keep]] = vals[keep]
    return EnvGrid(logw, Regime("P2L", {"mu": params.mu, "theta": params.theta}), seed.master_seed, seed.stream_id)


def build_p2p_env(seed: SeedSpec, params: P2PParams) -> EnvGrid:
    """Point-to-point grid: S/E/W/N boundaries and a Gamma(mu) bulk; corners zero."""
    M, Nn = params.width, params.height
    logw = np.zeros((M + 1, Nn + 1))
    logw[1 : M + 1, 0] = log_weight_sample(seed.generator(ROLE_SOUTH), params.theta_S, M)
    logw[0, 1 : Nn + 1] = log_weight_sample(seed.generator(ROLE_WEST), params.theta_W, Nn)
    if Nn >= 2:
        logw[M, 1:Nn] = log_weight_sample(seed.generator(ROLE_EAST), params.theta_E, Nn - 1)
    if M >= 2:
        logw[1:M, Nn] = log_weight_sample(seed.generator(ROLE_NORTH), params.theta_N, M - 1)
    if M >= 2 and Nn >= 2:
        logw[1:M, 1:Nn] = log_weight_sample(seed.generator(ROLE_BULK), params.mu, (M - 1) * (Nn - 1)).reshape(
            M - 1, Nn - 1
        )
    return EnvGrid(logw, Regime("P2P", asdict(params)), seed.master_seed, seed.stream_id)
