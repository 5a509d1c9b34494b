"""Probability distributions over the scenario register.

A ScenarioDistribution is a dense probability vector over all 2^b scenario
bitstrings. It feeds both the classical sampler (inverse-CDF draws) and the
quantum state preparation (entrywise square roots).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, InputError

MAX_SCENARIO_BITS = 14

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ScenarioDistribution:
    """Dense distribution p(scenario) over 2^b scenario indices.

    Immutable after construction; sampling takes an externally owned RNG so
    instances can be shared across threads.
    """

    b: int
    probabilities: np.ndarray
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.b < 1:
            raise InputError(f"scenario bit count must be >= 1, got {self.b}")
        if self.b > MAX_SCENARIO_BITS:
            raise CapacityError(
                f"scenario bit count {self.b} exceeds dense-storage limit {MAX_SCENARIO_BITS}"
            )
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.shape != (1 << self.b,):
            raise InputError(f"expected {1 << self.b} probabilities, got shape {p.shape}")
        if np.any(p < 0.0):
            raise InputError("probabilities must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > _NORM_TOL:
            raise InputError(f"probabilities sum to {total}, expected 1 within {_NORM_TOL}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)
        cdf = np.cumsum(p)
        cdf.flags.writeable = False
        object.__setattr__(self, "_cdf", cdf)

    @property
    def size(self) -> int:
        return 1 << self.b

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw scenario indices by inverse CDF over the explicit vector."""
        u = rng.random(size)
        idx = np.searchsorted(self._cdf, u, side="right")
        idx = np.minimum(idx, self.size - 1)
        return int(idx) if size is None else idx.astype(np.int64)

    def amplitudes(self) -> np.ndarray:
        """Entrywise square roots: the state-preparation target vector."""
        return np.sqrt(self.probabilities)


def uniform(b: int) -> ScenarioDistribution:
    n = 1 << b
    return ScenarioDistribution(b, np.full(n, 1.0 / n))


def iid_bernoulli(b: int, q) -> ScenarioDistribution:
    """Independent per-bit distribution: q[j] is Pr[bit j of the scenario = 1].

    Bit j carries weight 2^j in the scenario index. A scalar q applies to
    every bit.
    """
    q_arr = np.broadcast_to(np.asarray(q, dtype=np.float64), (b,)).copy()
    if np.any((q_arr < 0.0) | (q_arr > 1.0)):
        raise InputError("per-bit probabilities must lie in [0, 1]")
    n = 1 << b
    idx = np.arange(n)
    p = np.ones(n)
    for j in range(b):
        bit = (idx >> j) & 1
        p *= np.where(bit, q_arr[j], 1.0 - q_arr[j])
    return ScenarioDistribution(b, p)


def explicit(vector) -> ScenarioDistribution:
    """Distribution from an explicit non-negative vector of length 2^b.

    The vector is normalized by its total mass; an all-zero vector is an
    error rather than silently renormalized.
    """
    p = np.asarray(vector, dtype=np.float64)
    if p.ndim != 1 or p.size < 2 or (p.size & (p.size - 1)) != 0:
        raise InputError(f"explicit vector length must be a power of two >= 2, got {p.size}")
    if np.any(p < 0.0):
        raise InputError("probabilities must be non-negative")
    total = float(p.sum())
    if total <= 0.0:
        raise InputError("explicit vector has zero total mass")
    return ScenarioDistribution(p.size.bit_length() - 1, p / total)


def point_mass(b: int, scenario: int) -> ScenarioDistribution:
    if not 0 <= scenario < (1 << b):
        raise InputError(f"scenario {scenario} out of range for b={b}")
    p = np.zeros(1 << b)
    p[scenario] = 1.0
    return ScenarioDistribution(b, p)


def from_config(cfg: dict, b: int) -> ScenarioDistribution:
    """Build a distribution from a config mapping.

    Accepted forms: {"kind": "uniform"}, {"kind": "iid", "q": [...]},
    {"kind": "explicit", "p": [...]}. The scenario bit count b comes from the
    oracle and must agree with the config.
    """
    kind = cfg.get("kind")
    if kind == "uniform":
        return uniform(b)
    if kind == "iid":
        q = cfg.get("q")
        if q is None:
            raise InputError('iid distribution config requires "q"')
        q_arr = np.asarray(q, dtype=np.float64)
        if q_arr.ndim == 1 and q_arr.size != b:
            raise InputError(f"iid q has {q_arr.size} entries but oracle has b={b}")
        return iid_bernoulli(b, q_arr)
    if kind == "explicit":
        p = cfg.get("p")
        if p is None:
            raise InputError('explicit distribution config requires "p"')
        dist = explicit(p)
        if dist.b != b:
            raise InputError(f"explicit vector implies b={dist.b} but oracle has b={b}")
        return dist
    raise InputError(f"unknown distribution kind: {kind!r}")
