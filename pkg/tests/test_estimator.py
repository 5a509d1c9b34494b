import math
from fractions import Fraction

import numpy as np
import pytest

from satprob import (
    InputError,
    MIN_SUCCESS_MASS,
    amplitude_from_outcome,
    analyze,
    angle_schedule,
    distributions as dists,
    estimate,
    estimation_error_bound,
    good_state_probability,
    make_constant_oracle,
    make_planted_oracle,
    make_threshold_oracle,
    min_depth,
    oracle_call_model,
    qae_error_bound,
    qae_parameters,
    reliability_oracle,
    sweep_search,
    triangle_graph,
)


# -- bounds ---------------------------------------------------------------------


def test_qae_error_bound_values():
    assert qae_error_bound(0.0, 8) == pytest.approx(math.pi**2 / 64, abs=1e-15)
    assert qae_error_bound(0.5, 8) == pytest.approx(math.pi / 8 + math.pi**2 / 64, abs=1e-15)


def test_qae_error_bound_dominated_by_worst_case():
    for a in np.linspace(0, 1, 33):
        for m in (8, 32, 128):
            assert qae_error_bound(float(a), m) <= math.pi / m + math.pi**2 / m**2 + 1e-15


def test_qae_error_bound_validation():
    with pytest.raises(InputError):
        qae_error_bound(1.5, 8)
    with pytest.raises(InputError):
        qae_error_bound(0.5, 1)


def test_estimation_error_bound_limits():
    assert estimation_error_bound(0.0, 1e-9, 0.5, 1 << 20) < 1e-5
    # precision-driven parameters keep the total bound within the target
    for eps in np.linspace(0.02, 0.5, 20):
        params = qae_parameters(float(eps))
        bound = estimation_error_bound(0.0, params.delta, 1.0, params.grid_size)
        assert bound <= eps + 1e-12


def test_oracle_call_model_values():
    assert oracle_call_model(1, 2) == 6
    assert oracle_call_model(3, 1) == 4


# -- good state probability --------------------------------------------------------


def test_good_state_probability_constant_false():
    a = good_state_probability(
        make_constant_oracle(2, 2, 0), dists.uniform(2), angle_schedule(2, 0.3)
    )
    assert a == pytest.approx(0.0, abs=1e-12)


def test_good_state_probability_zero_iterations():
    orc = make_planted_oracle(3, 3, seed=4, density=0.4)
    dist = dists.iid_bernoulli(3, 0.4)
    analysis = analyze(orc, dist)
    expected = float(
        sum(p * float(f) for p, f in zip(dist.probabilities, analysis.fractions))
    )
    a = good_state_probability(orc, dist, angle_schedule(0, 0.3))
    assert a == pytest.approx(expected, abs=1e-12)


def test_good_state_probability_enters_window_at_depth():
    orc = make_threshold_oracle(6, 6, 8, 3)
    dist = dists.uniform(6)
    analysis = analyze(orc, dist)
    delta = 0.3
    min_fraction = Fraction(1, 64)
    eps_t = analysis.unconverged_mass(min_fraction)
    depth = min_depth(float(min_fraction), delta)
    a = good_state_probability(orc, dist, angle_schedule((depth - 1) // 2, delta))
    mu = analysis.satisfiable_mass
    assert (mu - eps_t) * (1 - delta**2) - 1e-9 <= a <= mu + 1e-9


# -- full estimation ------------------------------------------------------------------


def test_estimate_constant_true_is_exact():
    report = estimate(
        make_constant_oracle(2, 2, 1), dists.uniform(2), delta=0.3, sample_bits=4, min_fraction=1
    )
    assert report.mode_outcome == 8  # M/2
    assert report.a_tilde_mode == pytest.approx(1.0, abs=1e-12)
    assert report.outcome_distribution[8] == pytest.approx(1.0, abs=1e-10)


def test_estimate_triangle_reliability_within_theorem_bound():
    orc = reliability_oracle(triangle_graph())
    report = estimate(orc, dists.uniform(3), delta=0.05, sample_bits=7)
    assert report.mu == pytest.approx(5 / 8, abs=0)
    assert report.epsilon_t == 0.0
    assert abs(report.a_tilde_mode - 5 / 8) <= report.epsilon_bound
    assert report.mass_within_epsilon_bound >= MIN_SUCCESS_MASS


def test_estimate_report_invariants():
    orc = make_planted_oracle(3, 3, seed=12, density=0.35)
    dist = dists.uniform(3)
    report = estimate(orc, dist, delta=0.2, sample_bits=5)
    lo, hi = report.a_window
    assert lo - 1e-9 <= report.a_exact <= hi + 1e-9
    assert report.success_mass >= MIN_SUCCESS_MASS
    assert abs(report.a_exact - report.a_analytic) <= 1e-6
    assert report.oracle_calls_model == (report.L_t + 1) * (2 * report.M - 1)
    # measured differs from the model by a small constant, never asserted equal
    assert report.oracle_calls_actual == report.L_t * (2 * report.M - 1)
    assert sum(report.outcome_distribution) == pytest.approx(1.0, abs=1e-10)


def test_estimate_epsilon_entry_point():
    orc = make_planted_oracle(2, 2, seed=3, density=0.5)
    report = estimate(orc, dists.uniform(2), epsilon=0.25)
    params = qae_parameters(0.25)
    assert report.delta == params.delta
    assert report.M == params.grid_size
    assert report.lambda_t == 0.25  # defaults to 2^-c
    assert report.epsilon_bound <= 0.25 + 1e-12


def test_estimate_symmetric_outcomes_agree():
    report = estimate(
        make_planted_oracle(2, 2, seed=9, density=0.6), dists.uniform(2), delta=0.3, sample_bits=5
    )
    m_dim = report.M
    for d in range(1, m_dim // 2):
        assert amplitude_from_outcome(d, m_dim) == pytest.approx(
            amplitude_from_outcome(m_dim - d, m_dim), abs=1e-12
        )


def test_estimate_requires_parameters():
    orc = make_constant_oracle(2, 2, 1)
    with pytest.raises(InputError):
        estimate(orc, dists.uniform(2))
    with pytest.raises(InputError):
        estimate(orc, dists.uniform(2), delta=0.3)


def test_lambda_t_monotonicity():
    orc = make_threshold_oracle(6, 6, 8, 3)
    dist = dists.uniform(6)
    analysis = analyze(orc, dist)
    delta = 0.3
    thresholds = [Fraction(k, 64) for k in (1, 2, 3, 4, 5)]
    depths = [min_depth(float(t), delta) for t in thresholds]
    slack = [analysis.unconverged_mass(t) for t in thresholds]
    assert all(a >= b for a, b in zip(depths, depths[1:]))
    assert all(a <= b + 1e-15 for a, b in zip(slack, slack[1:]))
    assert slack[0] == 0.0  # threshold at 2^-c always fully converged


def test_estimate_with_unconverged_budget():
    orc = make_threshold_oracle(6, 6, 8, 3)
    dist = dists.uniform(6)
    report = estimate(orc, dist, delta=0.3, sample_bits=4, max_unconverged=0.2)
    assert report.lambda_t == 1 / 32
    assert report.epsilon_t == pytest.approx(0.125, abs=1e-15)
    lo, hi = report.a_window
    assert lo - 1e-9 <= report.a_exact <= hi + 1e-9


# -- sweeps ------------------------------------------------------------------------


def test_sweep_search_threaded_matches_serial():
    orc = make_planted_oracle(3, 3, seed=2, density=0.4)
    dist = dists.uniform(3)
    serial = sweep_search(orc, dist, 0.3, 5)
    threaded = sweep_search(orc, dist, 0.3, 5, threads=4)
    np.testing.assert_array_equal(
        serial.per_scenario_statevector, threaded.per_scenario_statevector
    )
    np.testing.assert_allclose(
        serial.per_scenario_statevector, serial.per_scenario_analytic, atol=1e-6
    )
    np.testing.assert_allclose(
        serial.marked_mass_statevector, serial.marked_mass_analytic, atol=1e-6
    )
