"""Closed-form machinery for fixed-point amplitude amplification.

Chebyshev polynomials of the first kind (integer and fractional order), the
analytic phase schedule for the parameterized Grover iterates, the resulting
per-scenario success probability, minimum-depth selection, and the
precision-driven parameter choices for amplitude estimation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, InputError

_CLAMP_TOL = 1e-12


def chebyshev(order: float, x: float) -> float:
    """T_order(x), piecewise: cos branch on |x| <= 1, cosh branch on x >= 1.

    Fractional orders are defined only on the cosh branch. x < -1 is out of
    domain.
    """
    if x < -1.0:
        raise InputError(f"chebyshev argument {x} < -1 is outside the supported domain")
    is_integer_order = float(order).is_integer()
    if x >= 1.0:
        return math.cosh(order * math.acosh(x))
    if not is_integer_order:
        raise InputError(
            f"fractional order {order} requires argument >= 1, got {x}"
        )
    return math.cos(order * math.acos(x))


@dataclass(frozen=True)
class AngleSchedule:
    """Phase angles for a depth-(2l+1) fixed-point search.

    alphas[j-1] and betas[j-1] are the j-th mixer/target phases; they satisfy
    alphas[j-1] == -betas[l-j] exactly by construction.
    """

    iterations: int
    delta: float
    alphas: np.ndarray
    betas: np.ndarray

    @property
    def depth(self) -> int:
        """Odd query-depth parameter L = 2l + 1."""
        return 2 * self.iterations + 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "iterations": self.iterations,
                "depth": self.depth,
                "delta": self.delta,
                "alphas": list(map(float, self.alphas)),
                "betas": list(map(float, self.betas)),
            },
            indent=1,
        )


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta}")


def angle_schedule(iterations: int, delta: float) -> AngleSchedule:
    """Analytic phase schedule for l iterates at residual parameter delta.

    alpha_j = 2*arccot(tan(2*pi*j/L) * sqrt(1 - 1/T_{1/L}(1/delta)^2)) with
    the arccot branch continuous over (0, pi), so alpha_j varies smoothly in
    (0, 2*pi); beta mirrors alpha in reverse with opposite sign.
    """
    if iterations < 0:
        raise InputError(f"iteration count must be >= 0, got {iterations}")
    _check_delta(delta)
    l = iterations
    if l == 0:
        empty = np.zeros(0)
        return AngleSchedule(0, delta, empty, empty)
    depth = 2 * l + 1
    gamma_inv = chebyshev(1.0 / depth, 1.0 / delta)  # >= 1
    scale = math.sqrt(max(0.0, 1.0 - 1.0 / gamma_inv**2))
    j = np.arange(1, l + 1, dtype=np.float64)
    # arccot(y) as atan2(1, y) stays in (0, pi); tan never hits its pole
    # exactly because 2*pi*j/L = pi/2 would need L divisible by 4.
    alphas = 2.0 * np.arctan2(1.0, np.tan(2.0 * np.pi * j / depth) * scale)
    betas = -alphas[::-1].copy()
    alphas.flags.writeable = False
    betas.flags.writeable = False
    return AngleSchedule(l, delta, alphas, betas)


def success_probability(depth: int, delta: float, fraction: float) -> float:
    """Success probability of a depth-L fixed-point search on a scenario
    whose satisfying fraction is `fraction`."""
    if depth < 1 or depth % 2 == 0:
        raise InputError(f"depth must be a positive odd integer, got {depth}")
    _check_delta(delta)
    if not 0.0 <= fraction <= 1.0:
        raise InputError(f"fraction must lie in [0, 1], got {fraction}")
    inner = chebyshev(1.0 / depth, 1.0 / delta) * math.sqrt(1.0 - fraction)
    value = 1.0 - delta**2 * chebyshev(depth, inner) ** 2
    if value < 0.0:
        if value < -_CLAMP_TOL:
            raise ConsistencyError(f"success probability drifted to {value}")
        value = 0.0
    elif value > 1.0:
        if value > 1.0 + _CLAMP_TOL:
            raise ConsistencyError(f"success probability drifted to {value}")
        value = 1.0
    return value


def min_depth(fraction_threshold: float, delta: float, log_base: str = "e") -> int:
    """Smallest odd depth guaranteeing convergence for all fractions at or
    above the threshold.

    The bound is log(2/delta)/sqrt(threshold); `log_base` selects the natural
    logarithm (default) or base 2 ("2"), both of which dominate the exact
    Chebyshev threshold, so the convergence floor holds either way.
    """
    if fraction_threshold <= 0.0:
        raise InputError(f"fraction threshold must be positive, got {fraction_threshold}")
    if fraction_threshold > 1.0:
        raise InputError(f"fraction threshold must be <= 1, got {fraction_threshold}")
    _check_delta(delta)
    if log_base == "e":
        log_val = math.log(2.0 / delta)
    elif log_base == "2":
        log_val = math.log2(2.0 / delta)
    else:
        raise InputError(f'log_base must be "e" or "2", got {log_base!r}')
    bound = log_val / math.sqrt(fraction_threshold)
    depth = max(1, math.ceil(bound))
    if depth % 2 == 0:
        depth += 1
    return depth


@dataclass(frozen=True)
class QaeParameters:
    """Residual and grid-size choices meeting a total-error target."""

    delta: float
    grid_size: int
    sample_qubits: int


def qae_parameters(epsilon: float) -> QaeParameters:
    """Pick (delta, M, m) so that delta + pi/M + pi^2/M^2 <= epsilon.

    delta = epsilon/2 and M is the 2*pi/(sqrt(2*epsilon+1)-1) requirement
    rounded up to a power of two so the sample register has integer size;
    rounding up only tightens the bound.
    """
    if not 0.0 < epsilon < 1.0:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    delta = epsilon / 2.0
    raw = 2.0 * math.pi / (math.sqrt(2.0 * epsilon + 1.0) - 1.0)
    m = max(1, math.ceil(math.log2(raw)))
    return QaeParameters(delta=delta, grid_size=1 << m, sample_qubits=m)
