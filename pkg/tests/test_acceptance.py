"""Acceptance suite: one test per criterion, each printing a pass line with
its measured margin. Expected values are frozen from independent enumeration
(pure-Python brute force in this module) rather than from the code paths
under test.
"""

import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from satprob import (
    MIN_SUCCESS_MASS,
    analyze,
    angle_schedule,
    choose_min_fraction,
    cli,
    distributions as dists,
    estimate,
    estimator,
    iterate_search,
    make_planted_oracle,
    make_single_completion_oracle,
    make_threshold_oracle,
    min_depth,
    oracle_call_model,
    phase_estimation,
    prepare_initial,
    qae_error_bound,
    qae_parameters,
    reliability_oracle,
    repeated_trials,
    success_probability,
    sweep_search,
    triangle_graph,
)

LAMBDA_GRID = [k / 64 for k in range(1, 65)]


def brute_force_mu_threshold() -> float:
    """Independent enumeration of the paper-figure instance."""
    satisfiable = 0
    for xi in range(64):
        if any(xi / 8 - 3 > phi for phi in range(64)):
            satisfiable += 1
    return satisfiable / 64


def brute_force_triangle_reliability() -> float:
    """Direct enumeration: terminals stay connected iff the direct edge
    survives or both detour edges survive (bits: 0=direct, 1 and 2=detour)."""
    good = sum(
        1 for z in range(8) if (z & 1) or ((z >> 1 & 1) and (z >> 2 & 1))
    )
    return good / 8


def test_criterion_1_fixed_point_floor():
    start = time.perf_counter()
    worst = 1.0
    for delta in (0.1, 0.3, 0.5):
        floor = 1.0 - delta**2
        for lam in LAMBDA_GRID:
            depth = min_depth(lam, delta)
            for lam2 in LAMBDA_GRID:
                if lam2 < lam:
                    continue
                p = success_probability(depth, delta, lam2)
                assert floor - 1e-9 <= p <= 1.0 + 1e-9
                worst = min(worst, p - floor)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"\nPASS criterion 1 (fixed-point floor): min margin {worst:.3e}, {elapsed:.2f}s")


def test_criterion_2_search_equivalence():
    start = time.perf_counter()
    shapes = [(2, 2), (3, 3), (4, 4), (2, 4), (4, 2), (3, 4), (4, 3), (2, 3), (3, 2), (3, 3)]
    densities = [0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.5, 0.3]
    worst_p = 0.0
    worst_mass = 0.0
    count = 0
    for i in range(20):
        b, c = shapes[i % len(shapes)]
        oracle = make_planted_oracle(b, c, seed=100 + i, density=densities[i % len(densities)])
        dist = dists.uniform(b) if i % 2 == 0 else dists.iid_bernoulli(b, 0.35)
        fractions = analyze(oracle, dist).fractions_float()
        mask = oracle.marked_mask()
        for delta in (0.1, 0.3):
            for l in range(0, 11):
                sched = angle_schedule(l, delta)
                state = prepare_initial(dist, c)
                drift = np.max(np.abs(state.scenario_masses() - dist.probabilities))
                worst_mass = max(worst_mass, float(drift))
                for _, st in iterate_search(state, oracle, sched):
                    drift = np.max(np.abs(st.scenario_masses() - dist.probabilities))
                    worst_mass = max(worst_mass, float(drift))
                got = state.per_scenario_success(dist, mask)
                want = np.array(
                    [success_probability(sched.depth, delta, f) for f in fractions]
                )
                err = float(np.max(np.abs(got - want)))
                worst_p = max(worst_p, err)
                count += 1
    assert worst_p <= 1e-6
    assert worst_mass <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    print(
        f"\nPASS criterion 2 (search equivalence): {count} runs, max P deviation "
        f"{worst_p:.3e}, max scenario-mass drift {worst_mass:.3e}, {elapsed:.1f}s"
    )


def test_criterion_3_paper_figure_instance():
    start = time.perf_counter()
    delta = 0.3
    oracle = make_threshold_oracle(6, 6, 8, 3)
    dist = dists.iid_bernoulli(6, 0.5)
    analysis = analyze(oracle, dist)
    mu = brute_force_mu_threshold()
    assert mu == 39 / 64
    assert analysis.satisfiable_mass == mu

    sweep = sweep_search(oracle, dist, delta, 12)
    depths = np.array(sweep.depths)

    # (a) every satisfiable scenario converges at its own minimum depth and stays
    floor = 1.0 - delta**2
    assert floor == pytest.approx(0.91, abs=1e-12)
    for xi, frac in enumerate(sweep.fractions):
        if frac == 0.0:
            continue
        own_depth = min_depth(frac, delta)
        beyond = depths >= own_depth
        assert beyond.any()
        curve = sweep.per_scenario_statevector[beyond, xi]
        assert np.all(curve >= floor - 1e-6)
        assert np.all(curve <= 1.0 + 1e-6)

    # (b) the aggregate enters the window at the chosen minimum depth
    min_fraction = choose_min_fraction(analysis, 0.01)
    eps_t = analysis.unconverged_mass(min_fraction)
    assert eps_t <= 0.01
    depth_min = min_depth(float(min_fraction), delta)
    assert depth_min == 17
    window_lo = (mu - eps_t) * (1.0 - delta**2)
    at_and_beyond = depths >= depth_min
    a_vals = sweep.marked_mass_statevector[at_and_beyond]
    assert a_vals.size > 0
    assert np.all(a_vals >= window_lo - 1e-6)
    assert np.all(a_vals <= mu + 1e-6)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    print(
        f"\nPASS criterion 3 (paper figure instance): mu={mu}, L_t={depth_min}, "
        f"eps_t={eps_t}, window=[{window_lo:.6f}, {mu:.6f}], {elapsed:.1f}s"
    )


def test_criterion_4_qae_distribution_bound():
    start = time.perf_counter()
    instances = []
    for i, m in enumerate((3, 4, 5, 6)):
        instances.append((2, m, 0.4 + 0.05 * i, 1, 0.3, 200 + i))
        instances.append((3, m, 0.25 + 0.05 * i, 2, 0.2, 300 + i))
        instances.append((3, m, 0.6, 1, 0.4, 400 + i))
    assert len(instances) >= 10
    worst_mass = 1.0
    for b, m, density, l, delta, seed in instances:
        oracle = make_planted_oracle(b, b, seed=seed, density=density)
        dist = dists.uniform(b)
        sched = angle_schedule(l, delta)
        a = estimator.analytic_marked_mass(analyze(oracle, dist), sched.depth, delta)
        probs = phase_estimation(oracle, dist, sched, m)
        grid_size = 1 << m
        bound = qae_error_bound(a, grid_size)
        grid_estimates = np.sin(np.arange(grid_size) * math.pi / grid_size) ** 2
        mass = float(probs[np.abs(grid_estimates - a) <= bound].sum())
        mode = int(np.argmax(probs))
        mode_err = abs(grid_estimates[mode] - a)
        assert mass >= MIN_SUCCESS_MASS, (b, m, density, mass)
        assert mode_err <= bound, (b, m, density, mode_err, bound)
        worst_mass = min(worst_mass, mass)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    print(
        f"\nPASS criterion 4 (estimation bound): {len(instances)} instances, "
        f"min in-window mass {worst_mass:.4f} >= {MIN_SUCCESS_MASS:.4f}, {elapsed:.1f}s"
    )


def test_criterion_5_end_to_end_reliability():
    start = time.perf_counter()
    mu = brute_force_triangle_reliability()
    assert mu == 5 / 8
    oracle = reliability_oracle(triangle_graph())
    report = estimate(
        oracle, dists.uniform(3), delta=0.05, sample_bits=6, min_fraction=Fraction(1, 8)
    )
    assert report.mu == mu
    assert report.epsilon_t == 0.0
    expected_bound = 0.05**2 * mu + math.pi / 64 + math.pi**2 / 64**2
    assert report.epsilon_bound == pytest.approx(expected_bound, abs=1e-15)
    assert report.mass_within_epsilon_bound >= MIN_SUCCESS_MASS
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    print(
        f"\nPASS criterion 5 (end-to-end reliability): mode estimate "
        f"{report.a_tilde_mode:.6f} vs exact {mu}, bound {report.epsilon_bound:.6f}, "
        f"in-bound mass {report.mass_within_epsilon_bound:.4f}, {elapsed:.1f}s"
    )


def test_criterion_6_classical_baseline():
    start = time.perf_counter()
    oracle = make_threshold_oracle(6, 6, 8, 3)
    dist = dists.uniform(6)
    mu = brute_force_mu_threshold()
    n, eps, trials = 400, 0.1, 2000
    reports = repeated_trials(oracle, dist, n, trials, master_seed=2024, epsilon=eps)
    estimates = np.array([r.mu_tilde for r in reports])
    failure_rate = float(np.mean(np.abs(estimates - mu) >= eps))
    bound = 0.0625  # 0.25 / (400 * 0.1^2)
    assert 0.25 / (n * eps**2) == pytest.approx(bound, abs=1e-12)
    assert failure_rate <= bound
    queries = np.array([r.queries_actual for r in reports], dtype=float)
    model = reports[0].queries_model
    ratio = float(queries.mean()) / model
    assert abs(ratio - 1.0) <= 0.05
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(
        f"\nPASS criterion 6 (classical baseline): failure rate {failure_rate:.4f} <= "
        f"{bound}, query ratio {ratio:.4f}, {elapsed:.1f}s"
    )


def test_criterion_7_quadratic_separation():
    start = time.perf_counter()
    eps = 0.1
    params = qae_parameters(eps)
    cs = [4, 6, 8, 10]
    quantum_model = []
    classical_model = []
    for c in cs:
        oracle = make_single_completion_oracle(2, c, seed=50 + c)
        analysis = analyze(oracle, dists.uniform(2))
        assert analysis.satisfiable_mass == 1.0
        assert analysis.inv_fraction_mean == float(1 << c)
        depth = min_depth(2.0**-c, params.delta)
        quantum_model.append(oracle_call_model(depth, params.grid_size))
        classical_model.append(
            (analysis.satisfiable_mass * analysis.inv_fraction_mean) / eps**2
        )
    sizes = np.array([2.0**c for c in cs])
    q_slope = float(np.polyfit(np.log(sizes), np.log(quantum_model), 1)[0])
    c_slope = float(np.polyfit(np.log(sizes), np.log(classical_model), 1)[0])
    assert abs(q_slope - 0.5) <= 0.05
    assert abs(c_slope - 1.0) <= 0.05
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0

    # measured ledger counts, additionally reported at desk scale
    measured = {}
    for c in (4, 6):
        oracle = make_single_completion_oracle(2, c, seed=50 + c)
        report = estimate(oracle, dists.uniform(2), epsilon=eps)
        measured[c] = report.oracle_calls_actual
    print(
        f"\nPASS criterion 7 (quadratic separation): quantum slope {q_slope:.4f}, "
        f"classical slope {c_slope:.4f}, {elapsed:.1f}s; measured quantum calls "
        f"{measured} vs models {dict(zip(cs, quantum_model))}"
    )


def test_criterion_8_determinism(tmp_path):
    start = time.perf_counter()
    config = {
        "oracle": {"kind": "planted", "b": 3, "c": 3, "seed": 4, "density": 0.4},
        "quantum": {"delta": 0.25, "m": 5, "l_max": 5},
        "classical": {"n_samples": 50, "trials": 5, "epsilon": 0.15},
        "compare": {
            "oracle": {"kind": "reliability", "edges": [[0, 1], [0, 2], [2, 1]], "terminals": [0, 1]},
            "epsilon_grid": [0.2, 0.1],
            "scaling_c": [4, 6],
            "scaling_b": 2,
            "measured_max_c": 4,
        },
        "seed": 99,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    graph_path = tmp_path / "graph.txt"
    graph_path.write_text("terminals 0 1\n0 1\n0 2\n2 1\n")

    jobs = [
        ["dynamics", "--config", cfg_path, "--out", None],
        ["qae", "--config", cfg_path, "--out", None],
        ["classical", "--config", cfg_path, "--out", None],
        ["compare", "--config", cfg_path, "--out", None],
        ["reliability", graph_path, "--config", cfg_path, "--out", None],
    ]
    digests = []
    for run_dir in (tmp_path / "run1", tmp_path / "run2"):
        for job in jobs:
            args = [str(run_dir / "x") if a is None else str(a) for a in job]
            assert cli.main(args) == 0
        files = sorted(p for p in (run_dir / "x").iterdir())
        digests.append({p.name: p.read_bytes() for p in files})
    assert digests[0].keys() == digests[1].keys()
    mismatched = [name for name in digests[0] if digests[0][name] != digests[1][name]]
    assert not mismatched
    elapsed = time.perf_counter() - start
    print(
        f"\nPASS criterion 8 (determinism): {len(digests[0])} output files "
        f"byte-identical across re-runs, {elapsed:.1f}s"
    )
