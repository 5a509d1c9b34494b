/**
 * Convergence-dynamics figure: one success-probability curve per scenario,
 * the aggregate marked-mass trace, the convergence floor, the target window
 * band, and the chosen minimum search depth. Draws only what the CSV holds;
 * nothing is recomputed.
 */

import { ParseError, parseCsv, requireColumns, Table, toNumber } from "./csv";
import { el, line, polyline, rect, svgDocument, text } from "./svg";
import { linearScale } from "./scale";

const WIDTH = 720;
const HEIGHT = 460;
const MARGIN = { left: 54, right: 16, top: 18, bottom: 44 };

interface AggregatePoint {
  l: number;
  a: number;
}

export function renderDynamics(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(
    table,
    ["l", "xi", "P_statevector", "a", "window_lo", "window_hi", "L_t_marker"],
    "dynamics CSV"
  );
  const delta = toNumber(table.meta["delta"], "metadata delta");

  const curves = new Map<number, Array<[number, number]>>();
  const aggregate: AggregatePoint[] = [];
  let windowLo: number | null = null;
  let windowHi: number | null = null;
  let minDepth: number | null = null;
  for (const row of table.rows) {
    const l = toNumber(row["l"], "column l");
    if (row["xi"] !== null) {
      if (row["P_statevector"] === null) continue; // scenario outside the distribution
      const xi = toNumber(row["xi"], "column xi");
      const p = toNumber(row["P_statevector"], "column P_statevector");
      if (!curves.has(xi)) curves.set(xi, []);
      curves.get(xi)!.push([l, p]);
    } else {
      aggregate.push({ l, a: toNumber(row["a"], "column a") });
      windowLo = toNumber(row["window_lo"], "column window_lo");
      windowHi = toNumber(row["window_hi"], "column window_hi");
      minDepth = toNumber(row["L_t_marker"], "column L_t_marker");
    }
  }
  if (aggregate.length === 0 || windowLo === null || windowHi === null || minDepth === null) {
    throw new ParseError("dynamics CSV has no aggregate rows");
  }
  aggregate.sort((p, q) => p.l - q.l);

  const maxL = aggregate[aggregate.length - 1].l;
  const x = linearScale([0, Math.max(maxL, 1)], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([0, 1.02], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];

  // axes and ticks
  const axisColor = "#444444";
  parts.push(line(MARGIN.left, y.map(0), WIDTH - MARGIN.right, y.map(0), { stroke: axisColor }));
  parts.push(line(MARGIN.left, y.map(0), MARGIN.left, y.map(1.02), { stroke: axisColor }));
  for (const t of x.ticks) {
    parts.push(line(x.map(t), y.map(0), x.map(t), y.map(0) + 4, { stroke: axisColor }));
    parts.push(text(x.map(t), y.map(0) + 16, String(t), { "text-anchor": "middle" }));
  }
  for (const t of y.ticks.filter((v) => v <= 1.0)) {
    parts.push(line(MARGIN.left - 4, y.map(t), MARGIN.left, y.map(t), { stroke: axisColor }));
    parts.push(text(MARGIN.left - 7, y.map(t) + 3, t.toFixed(1), { "text-anchor": "end" }));
  }
  parts.push(
    text(WIDTH / 2, HEIGHT - 10, "search iterations", { "text-anchor": "middle" }),
    text(14, HEIGHT / 2, "success probability", {
      "text-anchor": "middle",
      transform: `rotate(-90 14 ${HEIGHT / 2})`,
    })
  );

  // target window band
  parts.push(
    rect(
      MARGIN.left,
      y.map(windowHi),
      WIDTH - MARGIN.right - MARGIN.left,
      Math.max(0, y.map(windowLo) - y.map(windowHi)),
      { class: "window-band", fill: "#2ca02c", "fill-opacity": "0.18" }
    )
  );

  // per-scenario curves, sorted for stable output
  for (const xi of [...curves.keys()].sort((a, b) => a - b)) {
    const pts = curves
      .get(xi)!
      .sort((p, q) => p[0] - q[0])
      .map(([l, p]) => [x.map(l), y.map(p)] as [number, number]);
    parts.push(
      polyline(pts, {
        class: "scenario-curve",
        "data-scenario": String(xi),
        stroke: "#ff7f0e",
        "stroke-width": "0.9",
        "stroke-opacity": "0.6",
      })
    );
  }

  // aggregate marked-mass trace
  parts.push(
    polyline(
      aggregate.map((p) => [x.map(p.l), y.map(p.a)] as [number, number]),
      { class: "a-trace", stroke: "#1f77b4", "stroke-width": "2.2" }
    )
  );

  // convergence floor at 1 - delta^2
  const floor = 1 - delta * delta;
  parts.push(
    line(MARGIN.left, y.map(floor), WIDTH - MARGIN.right, y.map(floor), {
      class: "floor-line",
      stroke: "#222222",
      "stroke-dasharray": "7 4",
    })
  );

  // chosen minimum depth, in iteration coordinates
  const depthIterations = (minDepth - 1) / 2;
  parts.push(
    line(x.map(depthIterations), y.map(0), x.map(depthIterations), y.map(1.02), {
      class: "depth-line",
      stroke: "#222222",
      "stroke-dasharray": "2 4",
    })
  );

  parts.push(
    el("g", { class: "legend", transform: `translate(${WIDTH - 220} ${HEIGHT - 96})` }, [
      rect(0, 0, 204, 52, { fill: "#ffffff", "fill-opacity": "0.85", stroke: "#cccccc" }),
      line(8, 12, 28, 12, { stroke: "#ff7f0e" }),
      text(34, 15, "per-scenario success"),
      line(8, 27, 28, 27, { stroke: "#1f77b4", "stroke-width": "2.2" }),
      text(34, 30, "aggregate marked mass"),
      line(8, 42, 28, 42, { stroke: "#222222", "stroke-dasharray": "7 4" }),
      text(34, 45, "convergence floor"),
    ])
  );

  return svgDocument(WIDTH, HEIGHT, parts);
}
