"""Monte-Carlo baseline: sample scenarios, brute-force search each one.

Each sampled scenario is searched for a completing decision string in one of
three orders. `with_replacement` draws decisions uniformly at random until
the first hit, matching the 1/fraction expected-query model (a scenario with
no completing string is settled by the full exhaustive pass of 2^c
evaluations, which is the only way to certify emptiness). The bounded
orders, `sequential` and `random_permutation`, never exceed 2^c evaluations
per scenario.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import ScenarioDistribution
from .errors import InputError
from .oracles import Oracle, ScenarioAnalysis, analyze

SEARCH_ORDERS = ("sequential", "random_permutation", "with_replacement")

_DRAW_CHUNK = 64


@dataclass(frozen=True)
class ClassicalRunReport:
    N: int
    mu_tilde: float
    hits: int
    queries_actual: int
    queries_model: float
    epsilon: float
    chebyshev_bound: float
    search_order: str
    seed: int | None

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "mu_tilde": self.mu_tilde,
            "hits": self.hits,
            "queries_actual": self.queries_actual,
            "queries_model": self.queries_model,
            "epsilon": self.epsilon,
            "chebyshev_bound": self.chebyshev_bound,
            "search_order": self.search_order,
            "seed": self.seed,
        }


def chebyshev_bound(n_samples: int, epsilon: float, variance: float = 0.25) -> float:
    """Failure-probability bound sigma^2/(N eps^2), capped at 1."""
    if n_samples < 1:
        raise InputError(f"sample count must be >= 1, got {n_samples}")
    if epsilon <= 0.0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    return min(1.0, variance / (n_samples * epsilon**2))


def expected_query_model(analysis: ScenarioAnalysis, c: int, n_samples: int) -> float:
    """Expected total evaluations: satisfiable scenarios cost the mean
    inverse fraction, unsatisfiable ones cost the full 2^c sweep."""
    mu = analysis.satisfiable_mass
    return (mu * analysis.inv_fraction_mean + (1.0 - mu) * (1 << c)) * n_samples


def _search_one(row: np.ndarray, order: str, rng: np.random.Generator) -> tuple[bool, int]:
    """Search one scenario's decision space; returns (hit, evaluations)."""
    size = row.size
    if order == "sequential":
        idx = np.flatnonzero(row)
        if idx.size:
            return True, int(idx[0]) + 1
        return False, size
    if order == "random_permutation":
        perm = rng.permutation(size)
        hits = row[perm]
        idx = np.flatnonzero(hits)
        if idx.size:
            return True, int(idx[0]) + 1
        return False, size
    # with_replacement: geometric search when a completing string exists,
    # full exhaust otherwise
    if not row.any():
        return False, size
    queries = 0
    while True:
        draws = rng.integers(0, size, size=_DRAW_CHUNK)
        found = np.flatnonzero(row[draws])
        if found.size:
            return True, queries + int(found[0]) + 1
        queries += _DRAW_CHUNK


def estimate_mu(
    oracle: Oracle,
    dist: ScenarioDistribution,
    n_samples: int,
    rng: np.random.Generator,
    search_order: str = "with_replacement",
    epsilon: float = 0.1,
    seed: int | None = None,
) -> ClassicalRunReport:
    """Draw scenarios i.i.d. (no deduplication) and search each for a
    completing decision, charging every oracle evaluation to the ledger."""
    if n_samples < 1:
        raise InputError(f"sample count must be >= 1, got {n_samples}")
    if search_order not in SEARCH_ORDERS:
        raise InputError(f"search_order must be one of {SEARCH_ORDERS}, got {search_order!r}")
    if oracle.b != dist.b:
        raise InputError(f"oracle has b={oracle.b} but distribution has b={dist.b}")
    mask = oracle.marked_mask()
    scenarios = dist.sample(rng, n_samples)
    hits = 0
    queries = 0
    for xi in scenarios:
        hit, q = _search_one(mask[xi], search_order, rng)
        hits += int(hit)
        queries += q
    oracle.record_calls(queries)
    analysis = analyze(oracle, dist)
    return ClassicalRunReport(
        N=n_samples,
        mu_tilde=hits / n_samples,
        hits=hits,
        queries_actual=queries,
        queries_model=expected_query_model(analysis, oracle.c, n_samples),
        epsilon=epsilon,
        chebyshev_bound=chebyshev_bound(n_samples, epsilon),
        search_order=search_order,
        seed=seed,
    )


def repeated_trials(
    oracle: Oracle,
    dist: ScenarioDistribution,
    n_samples: int,
    trials: int,
    master_seed: int,
    search_order: str = "with_replacement",
    epsilon: float = 0.1,
) -> list[ClassicalRunReport]:
    """Independent seeded trials with per-trial RNG streams derived from the
    master seed; trial order (and thus output) is deterministic."""
    seeds = np.random.SeedSequence(master_seed).spawn(trials)
    reports = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        reports.append(
            estimate_mu(
                oracle,
                dist,
                n_samples,
                rng,
                search_order=search_order,
                epsilon=epsilon,
                seed=master_seed,
            )
        )
    return reports
