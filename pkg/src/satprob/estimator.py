"""Quantum estimation pipeline: depth selection, search, amplitude
estimation, error bounds, and query accounting.

The exact outcome distribution of the estimation circuit is the primary
result; the point estimate is the distribution mode (ties toward smaller
outcomes). Model query counts are reported side by side with the measured
ledger; the two differ by a small constant factor and are never asserted
equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import ScenarioDistribution
from .engine import phase_estimation, prepare_initial, apply_oracle_mark, run_search
from .errors import ConsistencyError, InputError
from .oracles import Oracle, ScenarioAnalysis, analyze, choose_min_fraction
from .schedule import angle_schedule, min_depth, qae_parameters, success_probability

MIN_SUCCESS_MASS = 8.0 / math.pi**2

_AGREEMENT_TOL = 1e-6


def qae_error_bound(a: float, grid_size: int) -> float:
    """Half-width of the estimation window around the measured amplitude."""
    if not 0.0 <= a <= 1.0:
        raise InputError(f"amplitude must lie in [0, 1], got {a}")
    if grid_size < 2:
        raise InputError(f"grid size must be >= 2, got {grid_size}")
    return 2.0 * math.pi * math.sqrt(a * (1.0 - a)) / grid_size + math.pi**2 / grid_size**2


def estimation_error_bound(
    unconverged_mass: float, delta: float, satisfiable_mass: float, grid_size: int
) -> float:
    """Total error bound of the end-to-end estimate relative to the true
    satisfiable mass."""
    return (
        unconverged_mass
        + delta**2 * satisfiable_mass
        - delta**2 * unconverged_mass
        + math.pi / grid_size
        + math.pi**2 / grid_size**2
    )


def oracle_call_model(depth: int, grid_size: int) -> int:
    """Modeled oracle-call total for a full estimation run."""
    return (depth + 1) * (2 * grid_size - 1)


def amplitude_from_outcome(outcome: int, grid_size: int) -> float:
    return math.sin(outcome * math.pi / grid_size) ** 2


def analytic_marked_mass(analysis: ScenarioAnalysis, depth: int, delta: float) -> float:
    """Distribution-weighted success probability from the closed form."""
    p = analysis.scenario_probabilities
    return float(
        sum(
            float(prob) * success_probability(depth, delta, float(f))
            for prob, f in zip(p, analysis.fractions)
            if prob > 0.0
        )
    )


def good_state_probability(oracle: Oracle, dist: ScenarioDistribution, schedule) -> float:
    """Mark-ancilla |1> mass after the search, cross-checked against the
    closed-form value; disagreement beyond 1e-6 is an internal error."""
    analysis = analyze(oracle, dist)
    expected = analytic_marked_mass(analysis, schedule.depth, schedule.delta)
    state = prepare_initial(dist, oracle.c, with_mark=True)
    run_search(state, oracle, schedule)
    apply_oracle_mark(state, oracle)
    measured = state.mark_one_mass()
    if abs(measured - expected) > _AGREEMENT_TOL:
        raise ConsistencyError(
            f"marked mass disagreement: statevector {measured} vs closed form {expected}"
        )
    return measured


@dataclass(frozen=True)
class QuantumRunReport:
    """Everything a single estimation run produced, including bound checks."""

    lambda_t: float
    delta: float
    L_t: int
    m: int
    M: int
    mu: float
    epsilon_t: float
    a_exact: float
    a_analytic: float
    a_window: tuple[float, float]
    outcome_distribution: tuple[float, ...]
    mode_outcome: int
    a_tilde_mode: float
    success_mass: float
    epsilon_bound: float
    mass_within_epsilon_bound: float
    oracle_calls_actual: int
    oracle_calls_model: int

    def to_json_dict(self) -> dict:
        return {
            "lambda_t": self.lambda_t,
            "delta": self.delta,
            "L_t": self.L_t,
            "m": self.m,
            "M": self.M,
            "mu": self.mu,
            "epsilon_t": self.epsilon_t,
            "a_exact": self.a_exact,
            "a_analytic": self.a_analytic,
            "a_window": list(self.a_window),
            "outcome_distribution": list(self.outcome_distribution),
            "mode_outcome": self.mode_outcome,
            "a_tilde_mode": self.a_tilde_mode,
            "success_mass": self.success_mass,
            "epsilon_bound": self.epsilon_bound,
            "mass_within_epsilon_bound": self.mass_within_epsilon_bound,
            "oracle_calls_actual": self.oracle_calls_actual,
            "oracle_calls_model": self.oracle_calls_model,
        }


def estimate(
    oracle: Oracle,
    dist: ScenarioDistribution,
    *,
    epsilon: float | None = None,
    delta: float | None = None,
    sample_bits: int | None = None,
    min_fraction: float | Fraction | None = None,
    max_unconverged: float | None = None,
    check_consistency: bool = True,
) -> QuantumRunReport:
    """Full pipeline: analysis, parameter selection, search + estimation,
    exact readout, bound checks, query accounting.

    Either pass `epsilon` (precision-driven parameter selection) or the
    explicit triple (`delta`, `sample_bits`, optional `min_fraction`). The
    fraction threshold defaults to 2^-c, the always-converged regime; pass
    `max_unconverged` to let the analysis pick the cheapest threshold within
    that budget instead.
    """
    analysis = analyze(oracle, dist)
    if epsilon is not None:
        params = qae_parameters(epsilon)
        delta = params.delta
        sample_bits = params.sample_qubits if sample_bits is None else sample_bits
    if delta is None or sample_bits is None:
        raise InputError("estimate needs either epsilon or both delta and sample_bits")

    if min_fraction is None:
        if max_unconverged is not None:
            min_fraction = choose_min_fraction(analysis, max_unconverged)
        else:
            min_fraction = Fraction(1, 1 << oracle.c)
    eps_t = analysis.unconverged_mass(min_fraction)
    depth = min_depth(float(min_fraction), delta)
    schedule = angle_schedule((depth - 1) // 2, delta)
    grid = 1 << sample_bits

    mu = analysis.satisfiable_mass
    a_analytic = analytic_marked_mass(analysis, depth, delta)
    a_exact = good_state_probability(oracle, dist, schedule) if check_consistency else a_analytic

    calls_before = oracle.call_counter
    probs = phase_estimation(oracle, dist, schedule, sample_bits)
    calls_actual = oracle.call_counter - calls_before

    mode = int(np.argmax(probs))
    a_tilde = amplitude_from_outcome(mode, grid)
    grid_estimates = np.sin(np.arange(grid) * math.pi / grid) ** 2
    window_half = qae_error_bound(a_exact, grid)
    success_mass = float(probs[np.abs(grid_estimates - a_exact) <= window_half].sum())
    eps_bound = estimation_error_bound(eps_t, delta, mu, grid)
    mu_mass = float(probs[np.abs(grid_estimates - mu) <= eps_bound].sum())
    window = ((mu - eps_t) * (1.0 - delta**2), mu)

    if check_consistency:
        if not window[0] - 1e-9 <= a_exact <= window[1] + 1e-9:
            raise ConsistencyError(
                f"marked mass {a_exact} escaped the convergence window {window}"
            )
        if success_mass < MIN_SUCCESS_MASS - 1e-12:
            raise ConsistencyError(
                f"success mass {success_mass} fell below the 8/pi^2 floor"
            )

    return QuantumRunReport(
        lambda_t=float(min_fraction),
        delta=float(delta),
        L_t=depth,
        m=sample_bits,
        M=grid,
        mu=mu,
        epsilon_t=eps_t,
        a_exact=a_exact,
        a_analytic=a_analytic,
        a_window=window,
        outcome_distribution=tuple(float(x) for x in probs),
        mode_outcome=mode,
        a_tilde_mode=a_tilde,
        success_mass=success_mass,
        epsilon_bound=eps_bound,
        mass_within_epsilon_bound=mu_mass,
        oracle_calls_actual=calls_actual,
        oracle_calls_model=oracle_call_model(depth, grid),
    )


@dataclass(frozen=True)
class SearchDynamics:
    """Per-depth convergence data for an iteration sweep."""

    iterations: tuple[int, ...]
    depths: tuple[int, ...]
    fractions: np.ndarray
    per_scenario_analytic: np.ndarray
    per_scenario_statevector: np.ndarray
    marked_mass_analytic: np.ndarray
    marked_mass_statevector: np.ndarray


def sweep_search(
    oracle: Oracle,
    dist: ScenarioDistribution,
    delta: float,
    max_iterations: int,
    threads: int = 1,
) -> SearchDynamics:
    """Run the search at every iteration count 0..max_iterations and collect
    per-scenario success (both routes) plus the aggregate marked mass.

    The schedule depends on the total depth, so each iteration count is its
    own independent run; sweep points parallelize freely."""
    analysis = analyze(oracle, dist)
    mask = oracle.marked_mask()
    fr = analysis.fractions_float()
    p = dist.probabilities

    def one(l: int):
        sched = angle_schedule(l, delta)
        state = prepare_initial(dist, oracle.c)
        run_search(state, oracle, sched)
        success_sv = state.per_scenario_success(dist, mask)
        success_an = np.array([success_probability(sched.depth, delta, f) for f in fr])
        return sched.depth, success_sv, success_an

    ls = list(range(max_iterations + 1))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, ls))
    else:
        results = [one(l) for l in ls]

    depths = [r[0] for r in results]
    sv_rows = [r[1] for r in results]
    an_rows = [r[2] for r in results]
    a_sv = [float(np.nansum(np.where(p > 0, sv * p, 0.0))) for sv in sv_rows]
    a_an = [float((an * p).sum()) for an in an_rows]
    return SearchDynamics(
        iterations=tuple(ls),
        depths=tuple(depths),
        fractions=fr,
        per_scenario_analytic=np.array(an_rows),
        per_scenario_statevector=np.array(sv_rows),
        marked_mass_analytic=np.array(a_an),
        marked_mass_statevector=np.array(a_sv),
    )
