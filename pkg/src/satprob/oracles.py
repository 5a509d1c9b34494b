"""Black-box boolean oracles over (scenario, decision) bitstring pairs.

An oracle exposes a single bit f(scenario, decision) plus a query ledger.
This module also provides the exhaustive reference analysis: per-scenario
completing sets, satisfying fractions, the probability that a random scenario
is satisfiable, and the fraction histogram that drives search-depth choices.

Reference analysis (completing_set, analyze, reliability enumeration) reads
the oracle's truth table directly and does NOT touch the query ledger; only
algorithm-level evaluations (evaluate, and the statevector engine's logical
oracle applications) are charged.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .distributions import ScenarioDistribution
from .errors import CapacityError, InputError

MAX_GRAPH_EDGES = 12


class Oracle:
    """Base class: a deterministic boolean function of (scenario, decision).

    Subclasses implement _evaluate. The call counter is thread-safe; the
    truth-table bitmap is computed once and cached so the statevector engine
    can apply the oracle as a mask while still charging the ledger per
    logical black-box use.
    """

    def __init__(self, b: int, c: int):
        if b < 1 or c < 1:
            raise InputError(f"register sizes must be >= 1, got b={b}, c={c}")
        self.b = b
        self.c = c
        self._calls = 0
        self._lock = threading.Lock()
        self._mask: np.ndarray | None = None

    # -- query ledger ------------------------------------------------------

    @property
    def call_counter(self) -> int:
        with self._lock:
            return self._calls

    def record_calls(self, n: int) -> None:
        """Charge n logical black-box uses (engine fast path, batch search)."""
        if n < 0:
            raise InputError("cannot charge a negative number of calls")
        with self._lock:
            self._calls += n

    def reset_counter(self) -> None:
        with self._lock:
            self._calls = 0

    # -- evaluation --------------------------------------------------------

    def _evaluate(self, scenario: int, decision: int) -> int:
        raise NotImplementedError

    def evaluate(self, scenario: int, decision: int) -> int:
        """Query the black box once; increments the call counter."""
        if not 0 <= scenario < (1 << self.b):
            raise InputError(f"scenario {scenario} out of range for b={self.b}")
        if not 0 <= decision < (1 << self.c):
            raise InputError(f"decision {decision} out of range for c={self.c}")
        self.record_calls(1)
        return 1 if self._evaluate(scenario, decision) else 0

    def marked_mask(self) -> np.ndarray:
        """Boolean truth table of shape (2^b, 2^c); cached, ledger-free."""
        if self._mask is None:
            mask = self._build_mask()
            mask.flags.writeable = False
            self._mask = mask
        return self._mask

    def _build_mask(self) -> np.ndarray:
        mask = np.empty((1 << self.b, 1 << self.c), dtype=bool)
        for xi in range(1 << self.b):
            mask[xi] = [bool(self._evaluate(xi, phi)) for phi in range(1 << self.c)]
        return mask

    def completing_set(self, scenario: int) -> frozenset[int]:
        """All decisions accepted for this scenario, by exhaustive enumeration."""
        if not 0 <= scenario < (1 << self.b):
            raise InputError(f"scenario {scenario} out of range for b={self.b}")
        row = self.marked_mask()[scenario]
        return frozenset(int(i) for i in np.nonzero(row)[0])


class ThresholdOracle(Oracle):
    """Accepts iff scenario/divisor - offset > decision, with real division."""

    def __init__(self, b: int, c: int, divisor: float, offset: float):
        super().__init__(b, c)
        if divisor == 0:
            raise InputError("divisor must be nonzero")
        self.divisor = float(divisor)
        self.offset = float(offset)

    def _evaluate(self, scenario: int, decision: int) -> int:
        return 1 if scenario / self.divisor - self.offset > decision else 0

    def _build_mask(self) -> np.ndarray:
        xi = np.arange(1 << self.b, dtype=np.float64)
        phi = np.arange(1 << self.c, dtype=np.float64)
        return (xi[:, None] / self.divisor - self.offset) > phi[None, :]


class ConstantOracle(Oracle):
    def __init__(self, b: int, c: int, bit: int):
        super().__init__(b, c)
        if bit not in (0, 1):
            raise InputError(f"constant oracle bit must be 0 or 1, got {bit}")
        self.bit = bit

    def _evaluate(self, scenario: int, decision: int) -> int:
        return self.bit

    def _build_mask(self) -> np.ndarray:
        return np.full((1 << self.b, 1 << self.c), bool(self.bit))


class PlantedOracle(Oracle):
    """Oracle backed by an explicit marked-set bitmap (one row per scenario)."""

    def __init__(self, b: int, c: int, bitmap: np.ndarray):
        super().__init__(b, c)
        bitmap = np.asarray(bitmap, dtype=bool)
        if bitmap.shape != (1 << b, 1 << c):
            raise InputError(f"bitmap shape {bitmap.shape} does not match ({1 << b}, {1 << c})")
        bitmap = bitmap.copy()
        bitmap.flags.writeable = False
        self._mask = bitmap

    def _evaluate(self, scenario: int, decision: int) -> int:
        return 1 if self._mask[scenario, decision] else 0

    def save(self, path: str | Path) -> None:
        rows = ["".join("1" if v else "0" for v in row) for row in self._mask]
        doc = {"format": "satprob-planted-oracle", "version": 1, "b": self.b, "c": self.c, "rows": rows}
        Path(path).write_text(json.dumps(doc, indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PlantedOracle":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read planted-oracle file {path}: {exc}") from exc
        if doc.get("format") != "satprob-planted-oracle":
            raise InputError(f"{path} is not a planted-oracle file")
        b, c = int(doc["b"]), int(doc["c"])
        rows = doc["rows"]
        if len(rows) != 1 << b or any(len(r) != 1 << c for r in rows):
            raise InputError(f"planted-oracle file {path} has inconsistent row sizes")
        bitmap = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)
        return cls(b, c, bitmap)


def make_threshold_oracle(b: int, c: int, divisor: float, offset: float) -> ThresholdOracle:
    return ThresholdOracle(b, c, divisor, offset)


def make_constant_oracle(b: int, c: int, bit: int) -> ConstantOracle:
    return ConstantOracle(b, c, bit)


def make_planted_oracle(b: int, c: int, seed: int, density: float) -> PlantedOracle:
    """Random marked sets: each (scenario, decision) pair is marked with
    probability `density`, independently, reproducibly from the seed."""
    if not 0.0 <= density <= 1.0:
        raise InputError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    bitmap = rng.random((1 << b, 1 << c)) < density
    return PlantedOracle(b, c, bitmap)


def make_single_completion_oracle(b: int, c: int, seed: int) -> PlantedOracle:
    """Exactly one completing decision per scenario (satisfying fraction 2^-c)."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, 1 << c, size=1 << b)
    bitmap = np.zeros((1 << b, 1 << c), dtype=bool)
    bitmap[np.arange(1 << b), picks] = True
    return PlantedOracle(b, c, bitmap)


# -- graphs and the reliability oracle -------------------------------------


@dataclass(frozen=True)
class Graph:
    """Undirected graph with two distinguished terminal vertices."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    terminals: tuple[int, int]

    def __post_init__(self) -> None:
        u, v = self.terminals
        if u == v:
            raise InputError("terminal vertices must differ")
        for w in (u, v):
            if not 0 <= w < self.vertex_count:
                raise InputError(f"terminal {w} is not a valid vertex")
        for a, b in self.edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise InputError(f"edge ({a}, {b}) references an invalid vertex")

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: a `terminals u v` header line, then one
    `u v` pair per line. Blank lines and `#` comments are ignored."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("terminals"):
        raise InputError("graph file must start with a `terminals u v` line")
    head = lines[0].split()
    if len(head) != 3:
        raise InputError(f"malformed terminals line: {lines[0]!r}")
    try:
        terminals = (int(head[1]), int(head[2]))
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise InputError(f"malformed edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        raise InputError(f"non-integer vertex id in graph file: {exc}") from exc
    if not edges:
        raise InputError("graph file lists no edges")
    vertex_count = max(max(terminals), max(max(e) for e in edges)) + 1
    return Graph(vertex_count, tuple(edges), terminals)


def load_graph(path: str | Path) -> Graph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read graph file {path}: {exc}") from exc
    return parse_graph(text)


def _terminals_connected_union_find(graph: Graph, edge_bits: int) -> bool:
    parent = list(range(graph.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (a, b) in enumerate(graph.edges):
        if edge_bits >> i & 1:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    u, v = graph.terminals
    return find(u) == find(v)


def _terminals_connected_bfs(graph: Graph, edge_bits: int) -> bool:
    adj: dict[int, list[int]] = {}
    for i, (a, b) in enumerate(graph.edges):
        if edge_bits >> i & 1:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    u, v = graph.terminals
    seen = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return v in seen


class ReliabilityOracle(Oracle):
    """f(scenario, decision) = connected(scenario AND decision).

    Scenario bits flag surviving edges, decision bits flag chosen edges; the
    oracle accepts when the terminals are connected using edges that both
    survived and were chosen. Connectivity is evaluated by union-find over a
    precomputed table of all edge subsets.
    """

    def __init__(self, graph: Graph):
        if graph.edge_count > MAX_GRAPH_EDGES:
            raise CapacityError(
                f"graph has {graph.edge_count} edges; limit is {MAX_GRAPH_EDGES}"
            )
        super().__init__(graph.edge_count, graph.edge_count)
        self.graph = graph
        self._connected = np.array(
            [_terminals_connected_union_find(graph, z) for z in range(1 << graph.edge_count)],
            dtype=bool,
        )

    def _evaluate(self, scenario: int, decision: int) -> int:
        return 1 if self._connected[scenario & decision] else 0

    def _build_mask(self) -> np.ndarray:
        idx = np.arange(1 << self.b)
        return self._connected[idx[:, None] & idx[None, :]]


def reliability_oracle(graph: Graph) -> ReliabilityOracle:
    return ReliabilityOracle(graph)


def triangle_graph() -> Graph:
    """Three vertices, edges (u,v), (u,w), (w,v); terminals u=0, v=1."""
    return Graph(3, ((0, 1), (0, 2), (2, 1)), (0, 1))


def reliability_exact(graph: Graph) -> Fraction:
    """Two-terminal reliability with per-edge failure probability 1/2, by
    exhaustive enumeration with BFS connectivity (independent of the oracle's
    union-find route)."""
    count = sum(
        1 for z in range(1 << graph.edge_count) if _terminals_connected_bfs(graph, z)
    )
    return Fraction(count, 1 << graph.edge_count)


# -- exhaustive reference analysis ------------------------------------------


@dataclass(frozen=True)
class ScenarioAnalysis:
    """Exact brute-force summary of an oracle under a scenario distribution.

    fractions[xi] is the satisfying fraction |completing set| / 2^c as an
    exact rational; satisfiable_mass is the probability that a drawn scenario
    has a nonempty completing set; fraction_histogram maps each distinct
    fraction (including 0) to its probability mass; inv_fraction_mean is the
    expectation of 1/fraction conditioned on satisfiable scenarios.
    """

    b: int
    c: int
    fractions: tuple[Fraction, ...]
    scenario_probabilities: np.ndarray
    satisfiable_mass: float
    fraction_histogram: dict[Fraction, float]
    inv_fraction_mean: float

    def fractions_float(self) -> np.ndarray:
        return np.array([float(f) for f in self.fractions])

    def min_positive_fraction(self) -> Fraction | None:
        positive = [f for f, mass in self.fraction_histogram.items() if f > 0 and mass > 0]
        return min(positive) if positive else None

    def max_fraction(self) -> Fraction:
        return max(self.fraction_histogram)

    def unconverged_mass(self, min_fraction) -> float:
        """Probability mass of satisfiable scenarios whose fraction is
        strictly below the threshold (these searches miss the convergence
        floor at the chosen depth)."""
        lo = Fraction(1, 1 << self.c)
        thr = Fraction(min_fraction)
        if not lo <= thr <= 1:
            raise InputError(
                f"fraction threshold {min_fraction} outside [{lo}, 1]"
            )
        return float(
            sum(mass for f, mass in self.fraction_histogram.items() if 0 < f < thr)
        )


def analyze(oracle: Oracle, dist: ScenarioDistribution) -> ScenarioAnalysis:
    """Exhaustive enumeration over all (scenario, decision) pairs."""
    if oracle.b != dist.b:
        raise InputError(f"oracle has b={oracle.b} but distribution has b={dist.b}")
    mask = oracle.marked_mask()
    counts = mask.sum(axis=1)
    denom = 1 << oracle.c
    fractions = tuple(Fraction(int(k), denom) for k in counts)
    p = dist.probabilities
    satisfiable = counts > 0
    mu = float(p[satisfiable].sum())
    histogram: dict[Fraction, float] = {}
    for f, prob in zip(fractions, p):
        histogram[f] = histogram.get(f, 0.0) + float(prob)
    if mu > 0.0:
        fr = np.array([float(f) for f in fractions])
        inv_mean = float((p[satisfiable] / fr[satisfiable]).sum()) / mu
    else:
        inv_mean = 0.0
    return ScenarioAnalysis(
        b=oracle.b,
        c=oracle.c,
        fractions=fractions,
        scenario_probabilities=p,
        satisfiable_mass=mu,
        fraction_histogram=histogram,
        inv_fraction_mean=inv_mean,
    )


def choose_min_fraction(analysis: ScenarioAnalysis, max_unconverged: float) -> Fraction:
    """Largest fraction threshold whose unconverged mass stays within budget.

    Scanning thresholds at the histogram's own fraction values, pick the
    largest one leaving at most `max_unconverged` satisfiable mass below it.
    With no satisfiable scenarios every threshold is converged; returns 1.
    """
    positive = sorted(f for f, mass in analysis.fraction_histogram.items() if f > 0 and mass > 0)
    if not positive:
        return Fraction(1)
    best = positive[0]
    below = 0.0
    for f, prev in zip(positive[1:], positive[:-1]):
        below += analysis.fraction_histogram[prev]
        if below <= max_unconverged:
            best = f
        else:
            break
    return best
