"""Command-line front end: experiment configs, sweeps, CSV/JSON emission,
and report-path figures.

Exit codes: 0 success, 2 config/input error, 3 capacity error, 4 internal
consistency error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, classical, distributions, estimator, oracles, schedule
from .config import ExperimentConfig, load_config
from .errors import CapacityError, ConsistencyError, InputError
from .figures import render_compare, render_dynamics
from .oracles import analyze, choose_min_fraction
from .tableio import write_csv

DYNAMICS_COLUMNS = [
    "l",
    "L",
    "xi",
    "lambda_xi",
    "P_analytic",
    "P_statevector",
    "a",
    "window_lo",
    "window_hi",
    "L_t_marker",
]

COMPARE_COLUMNS = [
    "section",
    "c",
    "b",
    "epsilon",
    "delta",
    "m",
    "M",
    "lambda_t",
    "L_t",
    "mu",
    "inv_lambda_mean",
    "classical_model_queries",
    "quantum_model_queries",
    "advantage_model",
    "classical_measured_queries",
    "quantum_measured_queries",
    "classical_mu_tilde",
    "quantum_a_tilde",
    "quantum_epsilon_bound",
]

_MEASURE_QUBIT_CAP = 20


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, Path):
        return str(value)
    return value


def _write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
    return path


def _stamp(cfg: ExperimentConfig) -> dict:
    return {"version": __version__, "config_hash": cfg.hash, "seed": cfg.seed, "config": cfg.effective}


def _resolve_min_fraction(quantum_cfg: dict, analysis, c: int) -> Fraction:
    lam = quantum_cfg.get("lambda_t")
    if lam is not None:
        return Fraction(lam).limit_denominator(1 << 30) if not isinstance(lam, Fraction) else lam
    budget = quantum_cfg.get("epsilon_t_max")
    if budget is not None:
        return choose_min_fraction(analysis, float(budget))
    return Fraction(1, 1 << c)


# -- dynamics -----------------------------------------------------------------


def cmd_dynamics(cfg: ExperimentConfig, out_dir: Path, threads: int) -> dict:
    oracle = cfg.build_oracle()
    dist = cfg.build_distribution(oracle)
    q = cfg.section("quantum")
    delta = float(q["delta"])
    l_max = int(q["l_max"])

    analysis = analyze(oracle, dist)
    min_fraction = _resolve_min_fraction(q, analysis, oracle.c)
    eps_t = analysis.unconverged_mass(min_fraction)
    depth_min = schedule.min_depth(float(min_fraction), delta)
    mu = analysis.satisfiable_mass
    window_lo = (mu - eps_t) * (1.0 - delta**2)

    sweep = estimator.sweep_search(oracle, dist, delta, l_max, threads=threads)
    fr = sweep.fractions
    rows = []
    for i, l in enumerate(sweep.iterations):
        depth = sweep.depths[i]
        for xi in range(1 << oracle.b):
            sv = sweep.per_scenario_statevector[i, xi]
            rows.append(
                {
                    "l": l,
                    "L": depth,
                    "xi": xi,
                    "lambda_xi": float(fr[xi]),
                    "P_analytic": float(sweep.per_scenario_analytic[i, xi]),
                    "P_statevector": None if math.isnan(sv) else float(sv),
                }
            )
        rows.append(
            {
                "l": l,
                "L": depth,
                "a": float(sweep.marked_mass_statevector[i]),
                "window_lo": window_lo,
                "window_hi": mu,
                "L_t_marker": depth_min,
            }
        )
    meta = {
        "config_hash": cfg.hash,
        "seed": cfg.seed,
        "version": __version__,
        "b": oracle.b,
        "c": oracle.c,
        "delta": delta,
        "mu": mu,
        "epsilon_t": eps_t,
        "lambda_t": float(min_fraction),
        "L_t": depth_min,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "dynamics.csv"
    write_csv(csv_path, DYNAMICS_COLUMNS, rows, meta)
    result = {"csv": csv_path, "L_t": depth_min, "mu": mu, "epsilon_t": eps_t}
    if cfg.effective.get("plot", True):
        result["figure"] = render_dynamics(csv_path, out_dir / f"dynamics.{cfg.effective['plot_format']}")
    return result


# -- qae ----------------------------------------------------------------------


def _quantum_report(cfg: ExperimentConfig, oracle, dist) -> estimator.QuantumRunReport:
    q = cfg.section("quantum")
    analysis = analyze(oracle, dist)
    kwargs: dict = {}
    if q.get("lambda_t") is not None or q.get("epsilon_t_max") is not None:
        kwargs["min_fraction"] = _resolve_min_fraction(q, analysis, oracle.c)
    if q.get("epsilon") is not None:
        return estimator.estimate(oracle, dist, epsilon=float(q["epsilon"]), **kwargs)
    return estimator.estimate(
        oracle, dist, delta=float(q["delta"]), sample_bits=int(q["m"]), **kwargs
    )


def cmd_qae(cfg: ExperimentConfig, out_dir: Path, threads: int) -> dict:
    oracle = cfg.build_oracle()
    dist = cfg.build_distribution(oracle)
    report = _quantum_report(cfg, oracle, dist)
    payload = dict(_stamp(cfg))
    payload["report"] = report.to_json_dict()
    path = _write_json(out_dir / "qae_report.json", payload)
    return {"json": path, "report": report}


# -- classical ------------------------------------------------------------------


def cmd_classical(cfg: ExperimentConfig, out_dir: Path, threads: int) -> dict:
    oracle = cfg.build_oracle()
    dist = cfg.build_distribution(oracle)
    cl = cfg.section("classical")
    n = int(cl["n_samples"])
    trials = int(cl["trials"])
    eps = float(cl["epsilon"])
    order = str(cl["search_order"])
    mu = analyze(oracle, dist).satisfiable_mass

    payload = dict(_stamp(cfg))
    payload["mu_exact"] = mu
    if trials <= 1:
        rng = np.random.default_rng(cfg.seed)
        report = classical.estimate_mu(
            oracle, dist, n, rng, search_order=order, epsilon=eps, seed=cfg.seed
        )
        payload["report"] = report.to_json_dict()
        result_report = report
    else:
        seeds = np.random.SeedSequence(cfg.seed).spawn(trials)

        def one(ss):
            rng = np.random.default_rng(ss)
            return classical.estimate_mu(
                oracle, dist, n, rng, search_order=order, epsilon=eps, seed=cfg.seed
            )

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                reports = list(pool.map(one, seeds))
        else:
            reports = [one(ss) for ss in seeds]
        estimates = np.array([r.mu_tilde for r in reports])
        queries = np.array([r.queries_actual for r in reports], dtype=np.float64)
        payload["report"] = reports[0].to_json_dict()
        payload["trials"] = {
            "count": trials,
            "mean_mu_tilde": float(estimates.mean()),
            "std_mu_tilde": float(estimates.std()),
            "empirical_failure_rate": float(np.mean(np.abs(estimates - mu) >= eps)),
            "epsilon": eps,
            "chebyshev_bound": classical.chebyshev_bound(n, eps),
            "mean_queries": float(queries.mean()),
            "queries_model": reports[0].queries_model,
        }
        result_report = reports[0]
    path = _write_json(out_dir / "classical_report.json", payload)
    return {"json": path, "report": result_report, "payload": payload}


# -- compare --------------------------------------------------------------------


def _measure_quantum(oracle, dist, eps: float, measured_max_c: int):
    params = schedule.qae_parameters(eps)
    total = oracle.b + oracle.c + 1 + params.sample_qubits
    if oracle.c > measured_max_c or total > _MEASURE_QUBIT_CAP:
        return None
    return estimator.estimate(oracle, dist, epsilon=eps)


def _compare_row(section: str, oracle, dist, eps: float, seed: int, measured_max_c: int) -> dict:
    analysis = analyze(oracle, dist)
    params = schedule.qae_parameters(eps)
    min_fraction = Fraction(1, 1 << oracle.c)
    depth = schedule.min_depth(float(min_fraction), params.delta)
    mu = analysis.satisfiable_mass
    inv_mean = analysis.inv_fraction_mean
    classical_model = (mu * inv_mean + (1.0 - mu) * (1 << oracle.c)) / eps**2
    quantum_model = estimator.oracle_call_model(depth, params.grid_size)
    row = {
        "section": section,
        "c": oracle.c,
        "b": oracle.b,
        "epsilon": eps,
        "delta": params.delta,
        "m": params.sample_qubits,
        "M": params.grid_size,
        "lambda_t": float(min_fraction),
        "L_t": depth,
        "mu": mu,
        "inv_lambda_mean": inv_mean,
        "classical_model_queries": classical_model,
        "quantum_model_queries": quantum_model,
        "advantage_model": classical_model / quantum_model,
    }
    n_cl = max(1, math.ceil(1.0 / eps**2))
    rng = np.random.default_rng(seed)
    cl_report = classical.estimate_mu(oracle, dist, n_cl, rng, epsilon=eps, seed=seed)
    row["classical_measured_queries"] = cl_report.queries_actual
    row["classical_mu_tilde"] = cl_report.mu_tilde
    q_report = _measure_quantum(oracle, dist, eps, measured_max_c)
    if q_report is not None:
        row["quantum_measured_queries"] = q_report.oracle_calls_actual
        row["quantum_a_tilde"] = q_report.a_tilde_mode
        row["quantum_epsilon_bound"] = q_report.epsilon_bound
    return row


def _fit_slope(sizes, queries) -> float:
    return float(np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(np.asarray(queries, dtype=float)), 1)[0])


def cmd_compare(cfg: ExperimentConfig, out_dir: Path, threads: int) -> dict:
    comp = cfg.section("compare")
    measured_max_c = int(comp["measured_max_c"])

    if comp.get("oracle") is not None:
        grid_oracle = oracles_from_spec(cfg, comp["oracle"])
    else:
        grid_oracle = cfg.build_oracle()
    grid_dist = cfg.build_distribution(grid_oracle)

    grid_jobs = [float(e) for e in comp["epsilon_grid"]]
    scaling_cs = [int(c) for c in comp["scaling_c"]]
    scaling_b = int(comp["scaling_b"])
    scaling_seed = int(comp["scaling_seed"])
    fixed_eps = float(comp["epsilon"])

    def grid_one(eps: float) -> dict:
        return _compare_row("epsilon_grid", grid_oracle, grid_dist, eps, cfg.seed, measured_max_c)

    def scaling_one(c: int) -> dict:
        oracle = oracles.make_single_completion_oracle(scaling_b, c, scaling_seed)
        dist = distributions.uniform(scaling_b)
        return _compare_row("c_scaling", oracle, dist, fixed_eps, cfg.seed, measured_max_c)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grid_rows = list(pool.map(grid_one, grid_jobs))
            scaling_rows = list(pool.map(scaling_one, scaling_cs))
    else:
        grid_rows = [grid_one(e) for e in grid_jobs]
        scaling_rows = [scaling_one(c) for c in scaling_cs]

    sizes = [2.0**r["c"] for r in scaling_rows]
    slopes = {
        "quantum_model": _fit_slope(sizes, [r["quantum_model_queries"] for r in scaling_rows]),
        "classical_model": _fit_slope(sizes, [r["classical_model_queries"] for r in scaling_rows]),
    }

    meta = {"config_hash": cfg.hash, "seed": cfg.seed, "version": __version__}
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "compare.csv"
    write_csv(csv_path, COMPARE_COLUMNS, grid_rows + scaling_rows, meta)
    payload = dict(_stamp(cfg))
    payload["epsilon_grid"] = grid_rows
    payload["c_scaling"] = scaling_rows
    payload["slopes"] = slopes
    json_path = _write_json(out_dir / "compare.json", payload)
    result = {"csv": csv_path, "json": json_path, "slopes": slopes}
    if cfg.effective.get("plot", True):
        result["figure"] = render_compare(csv_path, out_dir / f"compare.{cfg.effective['plot_format']}")
    return result


def oracles_from_spec(cfg: ExperimentConfig, spec: dict):
    from .config import build_oracle

    return build_oracle(spec, cfg.base_dir)


# -- reliability -----------------------------------------------------------------


def cmd_reliability(cfg: ExperimentConfig, out_dir: Path, threads: int, graph_path: str | None) -> dict:
    if graph_path is not None:
        graph = oracles.load_graph(graph_path)
    else:
        spec = cfg.effective["oracle"]
        if spec.get("kind") != "reliability":
            raise InputError(
                "reliability command needs a graph file argument or a reliability oracle config"
            )
        oracle_tmp = cfg.build_oracle()
        graph = oracle_tmp.graph  # type: ignore[attr-defined]
    if graph.edge_count > 6:
        raise CapacityError(
            f"reliability command enumerates all scenarios exactly; graph has "
            f"{graph.edge_count} edges, limit is 6"
        )
    oracle = oracles.reliability_oracle(graph)
    dist = distributions.uniform(oracle.b)
    exact = oracles.reliability_exact(graph)

    q_report = _quantum_report(cfg, oracle, dist)
    cl = cfg.section("classical")
    rng = np.random.default_rng(cfg.seed)
    cl_report = classical.estimate_mu(
        oracle,
        dist,
        int(cl["n_samples"]),
        rng,
        search_order=str(cl["search_order"]),
        epsilon=float(cl["epsilon"]),
        seed=cfg.seed,
    )

    exact_f = float(exact)
    checks = {
        "analysis_matches_enumeration": abs(q_report.mu - exact_f) < 1e-12,
        "quantum_mode_within_bound": abs(q_report.a_tilde_mode - exact_f) <= q_report.epsilon_bound,
        "success_mass_floor": q_report.success_mass >= estimator.MIN_SUCCESS_MASS - 1e-12,
        "classical_within_epsilon": abs(cl_report.mu_tilde - exact_f) < cl_report.epsilon,
    }
    payload = dict(_stamp(cfg))
    payload.update(
        {
            "graph": {
                "vertex_count": graph.vertex_count,
                "edges": [list(e) for e in graph.edges],
                "terminals": list(graph.terminals),
            },
            "reliability_exact": exact_f,
            "reliability_exact_fraction": str(exact),
            "quantum": q_report.to_json_dict(),
            "classical": cl_report.to_json_dict(),
            "checks": checks,
        }
    )
    path = _write_json(out_dir / "reliability.json", payload)
    return {"json": path, "checks": checks, "exact": exact_f}


# -- selftest ---------------------------------------------------------------------


def cmd_selftest(cfg: ExperimentConfig, out_dir: Path, threads: int) -> dict:
    import tempfile

    results: list[tuple[str, bool, str]] = []

    def check(name: str, fn) -> None:
        try:
            fn()
            results.append((name, True, ""))
        except Exception as exc:  # noqa: BLE001 - selftest reports all failures
            results.append((name, False, f"{type(exc).__name__}: {exc}"))

    def fixed_point_floor():
        for delta in (0.1, 0.3, 0.5):
            for k in range(1, 65, 3):
                depth = schedule.min_depth(k / 64, delta)
                for kk in range(k, 65, 3):
                    p = schedule.success_probability(depth, delta, kk / 64)
                    assert 1 - delta**2 - 1e-9 <= p <= 1 + 1e-9

    def search_equivalence():
        oracle = oracles.make_planted_oracle(3, 3, seed=5, density=0.3)
        dist = distributions.uniform(3)
        sweep = estimator.sweep_search(oracle, dist, 0.3, 6)
        err = np.nanmax(np.abs(sweep.per_scenario_statevector - sweep.per_scenario_analytic))
        assert err < 1e-6, f"max deviation {err}"

    def estimation_floor():
        oracle = oracles.make_planted_oracle(2, 2, seed=3, density=0.4)
        dist = distributions.uniform(2)
        report = estimator.estimate(oracle, dist, delta=0.2, sample_bits=5)
        assert report.success_mass >= estimator.MIN_SUCCESS_MASS

    def classical_edges():
        dist = distributions.uniform(2)
        rng = np.random.default_rng(0)
        rep_true = classical.estimate_mu(oracles.make_constant_oracle(2, 2, 1), dist, 16, rng)
        assert rep_true.mu_tilde == 1.0 and rep_true.queries_actual == 16
        rep_false = classical.estimate_mu(oracles.make_constant_oracle(2, 2, 0), dist, 16, rng)
        assert rep_false.mu_tilde == 0.0 and rep_false.queries_actual == 16 * 4

    def determinism():
        small = load_config(None, seed_override=cfg.seed)
        small = ExperimentConfig(
            effective={
                **small.effective,
                "oracle": {"kind": "planted", "b": 3, "c": 3, "seed": 1, "density": 0.3},
                "quantum": {**small.effective["quantum"], "l_max": 4},
                "plot": False,
            },
            base_dir=small.base_dir,
        )
        with tempfile.TemporaryDirectory() as tmp:
            p1 = Path(tmp) / "a"
            p2 = Path(tmp) / "b"
            cmd_dynamics(small, p1, threads=1)
            cmd_dynamics(small, p2, threads=max(2, threads))
            assert (p1 / "dynamics.csv").read_bytes() == (p2 / "dynamics.csv").read_bytes()

    check("fixed_point_floor", fixed_point_floor)
    check("search_equivalence", search_equivalence)
    check("estimation_floor", estimation_floor)
    check("classical_edge_cases", classical_edges)
    check("determinism", determinism)

    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    failed = [r for r in results if not r[1]]
    if failed:
        raise ConsistencyError(f"{len(failed)} selftest check(s) failed")
    return {"checks": results}


# -- entry point --------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="satprob",
        description="Estimate the probability that a random scenario admits a "
        "completing decision string: quantum-search simulation vs Monte-Carlo baseline.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON config file")
    common.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    common.add_argument("--out", type=str, default="out", help="output directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dynamics", parents=[common], help="per-scenario convergence sweep (CSV + figure)")
    sub.add_parser("qae", parents=[common], help="full estimation run (JSON report)")
    sub.add_parser("classical", parents=[common], help="Monte-Carlo baseline (JSON report)")
    sub.add_parser("compare", parents=[common], help="query-complexity comparison (CSV/JSON + figure)")
    rel = sub.add_parser("reliability", parents=[common], help="two-terminal reliability instance")
    rel.add_argument("graph", nargs="?", default=None, help="graph file (edge list with terminals header)")
    sub.add_parser("selftest", parents=[common], help="run the built-in invariant suite")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        out_dir = Path(args.out)
        threads = max(1, args.threads)
        if args.command == "dynamics":
            result = cmd_dynamics(cfg, out_dir, threads)
            print(f"wrote {result['csv']}" + (f" and {result['figure']}" if "figure" in result else ""))
        elif args.command == "qae":
            result = cmd_qae(cfg, out_dir, threads)
            rep = result["report"]
            print(
                f"estimate {rep.a_tilde_mode:.6f} (exact marked mass {rep.a_exact:.6f}, "
                f"mu {rep.mu:.6f}); wrote {result['json']}"
            )
        elif args.command == "classical":
            result = cmd_classical(cfg, out_dir, threads)
            print(f"estimate {result['report'].mu_tilde:.6f}; wrote {result['json']}")
        elif args.command == "compare":
            result = cmd_compare(cfg, out_dir, threads)
            print(
                f"model slopes: quantum {result['slopes']['quantum_model']:.3f}, "
                f"classical {result['slopes']['classical_model']:.3f}; wrote {result['json']}"
            )
        elif args.command == "reliability":
            result = cmd_reliability(cfg, out_dir, threads, args.graph)
            print(f"exact reliability {result['exact']}; wrote {result['json']}")
        elif args.command == "selftest":
            cmd_selftest(cfg, out_dir, threads)
            print("selftest passed")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
