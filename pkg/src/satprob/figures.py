"""Matplotlib rendering for the report path.

Figures are rendered from the emitted CSV files (never from in-memory state)
so they depict exactly what downstream consumers see. Output is
deterministic: fixed style, fixed hash salt, no timestamps in metadata.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InputError
from .tableio import parse_float, read_csv, require_columns

_RC = {
    "svg.hashsalt": "satprob",
    "svg.fonttype": "none",
    "figure.figsize": (7.0, 4.5),
    "axes.grid": True,
    "grid.alpha": 0.25,
    "font.size": 9,
}


def _save(fig, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None} if out_path.suffix == ".svg" else None)
    plt.close(fig)
    return out_path


def render_dynamics(csv_path: str | Path, out_path: str | Path) -> Path:
    """Per-scenario success curves vs iteration count, the aggregate marked
    mass, the convergence floor, the target window band, and the chosen
    minimum depth."""
    meta, columns, rows = read_csv(csv_path)
    require_columns(columns, ["l", "xi", "P_statevector", "a", "window_lo", "window_hi", "L_t_marker"], csv_path)
    delta = parse_float(meta.get("delta"), "dynamics metadata delta")

    curves: dict[int, list[tuple[int, float]]] = defaultdict(list)
    agg: list[tuple[int, float, float, float, int]] = []
    for row in rows:
        l = int(row["l"])
        if row.get("xi") is not None:
            curves[int(row["xi"])].append((l, parse_float(row["P_statevector"], "P_statevector")))
        else:
            agg.append(
                (
                    l,
                    parse_float(row["a"], "a"),
                    parse_float(row["window_lo"], "window_lo"),
                    parse_float(row["window_hi"], "window_hi"),
                    int(row["L_t_marker"]),
                )
            )
    if not agg:
        raise InputError(f"dynamics CSV {csv_path} has no aggregate rows")
    agg.sort()
    ls = [r[0] for r in agg]
    a_vals = [r[1] for r in agg]
    window_lo, window_hi, depth_min = agg[0][2], agg[0][3], agg[0][4]

    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for xi in sorted(curves):
            pts = sorted(curves[xi])
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color="tab:orange", lw=0.8, alpha=0.6, zorder=1)
        ax.plot(ls, a_vals, color="tab:blue", lw=2.0, label="aggregate marked mass", zorder=3)
        ax.axhline(1.0 - delta**2, color="black", ls="--", lw=1.0, label="convergence floor")
        ax.axhspan(window_lo, window_hi, color="tab:green", alpha=0.2, label="target window")
        ax.axvline((depth_min - 1) / 2.0, color="black", ls=":", lw=1.2, label="minimum depth")
        ax.set_xlabel("iterations")
        ax.set_ylabel("success probability")
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc="lower right")
        return _save(fig, out_path)


def render_compare(csv_path: str | Path, out_path: str | Path) -> Path:
    """Log-log query-count comparison: scaling with the decision-space size
    on the left, scaling with the precision target on the right."""
    meta, columns, rows = read_csv(csv_path)
    require_columns(
        columns,
        ["section", "c", "epsilon", "classical_model_queries", "quantum_model_queries"],
        csv_path,
    )
    scaling = [r for r in rows if r["section"] == "c_scaling"]
    grid = [r for r in rows if r["section"] == "epsilon_grid"]

    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
        for ax, key, series, xlabel in (
            (ax1, "c", scaling, "decision-space size 2^c"),
            (ax2, "epsilon", grid, "1/epsilon"),
        ):
            if not series:
                ax.set_visible(False)
                continue
            if key == "c":
                x = np.array([2.0 ** int(r["c"]) for r in series])
            else:
                x = np.array([1.0 / parse_float(r["epsilon"], "epsilon") for r in series])
            for col, color, label in (
                ("classical_model_queries", "tab:red", "classical model"),
                ("quantum_model_queries", "tab:blue", "quantum model"),
            ):
                y = np.array([parse_float(r[col], col) for r in series])
                order = np.argsort(x)
                if len(series) > 1:
                    slope = np.polyfit(np.log(x), np.log(y), 1)[0]
                    label = f"{label} (slope {slope:.2f})"
                ax.plot(x[order], y[order], "o-", color=color, label=label)
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_xlabel(xlabel)
            ax.set_ylabel("oracle queries")
            ax.legend()
        return _save(fig, out_path)
