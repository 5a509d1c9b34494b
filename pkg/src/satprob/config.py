"""Experiment configuration: defaults, JSON loading, and oracle construction.

A run is fully determined by the effective config (defaults deep-merged with
the user document) plus the seed; the sha256 of the canonical effective
config is embedded in every output file.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from . import distributions, oracles
from .errors import InputError

DEFAULT_CONFIG: dict = {
    "oracle": {"kind": "threshold", "b": 6, "c": 6, "divisor": 8, "offset": 3},
    "distribution": {"kind": "uniform"},
    "quantum": {
        "delta": 0.3,
        "lambda_t": None,
        "epsilon_t_max": None,
        "epsilon": None,
        "m": 6,
        "l_max": 12,
    },
    "classical": {
        "n_samples": 400,
        "trials": 1,
        "epsilon": 0.1,
        "search_order": "with_replacement",
    },
    "compare": {
        # the epsilon grid runs on its own small instance by default so the
        # measured quantum counts stay at desk scale; set "oracle": null to
        # reuse the top-level oracle instead
        "oracle": {
            "kind": "reliability",
            "edges": [[0, 1], [0, 2], [2, 1]],
            "terminals": [0, 1],
        },
        "epsilon_grid": [0.2, 0.1, 0.05],
        "scaling_c": [4, 6, 8, 10],
        "scaling_b": 2,
        "scaling_seed": 11,
        "epsilon": 0.1,
        "measured_max_c": 6,
    },
    "seed": 0,
    "plot": True,
    "plot_format": "svg",
}


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def config_hash(effective: dict) -> str:
    canonical = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    effective: dict
    base_dir: Path

    @property
    def seed(self) -> int:
        return int(self.effective["seed"])

    @property
    def hash(self) -> str:
        return config_hash(self.effective)

    def section(self, name: str) -> dict:
        return self.effective[name]

    def build_oracle(self) -> oracles.Oracle:
        return build_oracle(self.effective["oracle"], self.base_dir)

    def build_distribution(self, oracle: oracles.Oracle) -> distributions.ScenarioDistribution:
        return distributions.from_config(self.effective["distribution"], oracle.b)


def load_config(path: str | Path | None, seed_override: int | None = None) -> ExperimentConfig:
    if path is None:
        user: dict = {}
        base_dir = Path.cwd()
    else:
        p = Path(path)
        try:
            user = json.loads(p.read_text())
        except OSError as exc:
            raise InputError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise InputError(f"config file {path} must contain a JSON object")
        base_dir = p.parent
    effective = _deep_merge(DEFAULT_CONFIG, user)
    if seed_override is not None:
        effective["seed"] = int(seed_override)
    return ExperimentConfig(effective=effective, base_dir=base_dir)


def build_oracle(spec: dict, base_dir: Path) -> oracles.Oracle:
    kind = spec.get("kind")
    if kind == "threshold":
        return oracles.make_threshold_oracle(
            int(spec["b"]), int(spec["c"]), float(spec["divisor"]), float(spec["offset"])
        )
    if kind == "constant":
        return oracles.make_constant_oracle(int(spec["b"]), int(spec["c"]), int(spec["bit"]))
    if kind == "planted":
        return oracles.make_planted_oracle(
            int(spec["b"]), int(spec["c"]), int(spec["seed"]), float(spec["density"])
        )
    if kind == "planted_single":
        return oracles.make_single_completion_oracle(
            int(spec["b"]), int(spec["c"]), int(spec["seed"])
        )
    if kind == "planted_file":
        return oracles.PlantedOracle.load(base_dir / spec["path"])
    if kind == "reliability":
        if "graph" in spec:
            graph = oracles.load_graph(base_dir / spec["graph"])
        elif "edges" in spec:
            edges = tuple((int(a), int(b)) for a, b in spec["edges"])
            terminals = tuple(int(t) for t in spec["terminals"])
            vertex_count = max(max(terminals), max(max(e) for e in edges)) + 1
            graph = oracles.Graph(vertex_count, edges, terminals)  # type: ignore[arg-type]
        else:
            raise InputError('reliability oracle config needs "graph" or "edges"')
        return oracles.reliability_oracle(graph)
    raise InputError(f"unknown oracle kind: {kind!r}")
