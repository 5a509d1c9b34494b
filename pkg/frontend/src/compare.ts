/**
 * Query-complexity comparison figure: log-log panels of oracle queries
 * against the decision-space size (left) and the precision target (right),
 * with fitted slopes annotated when a section has enough points.
 */

import { ParseError, parseCsv, requireColumns, Table, toNumber } from "./csv";
import { circle, line, polyline, svgDocument, text } from "./svg";
import { logLogSlope, logScale, Scale } from "./scale";

const PANEL_WIDTH = 380;
const HEIGHT = 400;
const MARGIN = { left: 64, right: 18, top: 20, bottom: 48 };

interface Series {
  label: string;
  cssClass: string;
  color: string;
  points: Array<[number, number]>;
}

function panel(
  offsetX: number,
  title: string,
  xLabel: string,
  series: Series[]
): string[] {
  const parts: string[] = [];
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const x = logScale(
    [Math.min(...xs) / 1.3, Math.max(...xs) * 1.3],
    [offsetX + MARGIN.left, offsetX + PANEL_WIDTH - MARGIN.right]
  );
  const y = logScale(
    [Math.min(...ys) / 1.5, Math.max(...ys) * 1.5],
    [HEIGHT - MARGIN.bottom, MARGIN.top]
  );
  const axisColor = "#444444";
  const x0 = offsetX + MARGIN.left;
  const x1 = offsetX + PANEL_WIDTH - MARGIN.right;
  parts.push(line(x0, HEIGHT - MARGIN.bottom, x1, HEIGHT - MARGIN.bottom, { stroke: axisColor }));
  parts.push(line(x0, HEIGHT - MARGIN.bottom, x0, MARGIN.top, { stroke: axisColor }));
  for (const t of x.ticks) {
    parts.push(line(x.map(t), HEIGHT - MARGIN.bottom, x.map(t), HEIGHT - MARGIN.bottom + 4, { stroke: axisColor }));
    parts.push(
      text(x.map(t), HEIGHT - MARGIN.bottom + 16, formatTick(t), { "text-anchor": "middle" })
    );
  }
  for (const t of y.ticks) {
    parts.push(line(x0 - 4, y.map(t), x0, y.map(t), { stroke: axisColor }));
    parts.push(text(x0 - 7, y.map(t) + 3, formatTick(t), { "text-anchor": "end" }));
  }
  parts.push(text(offsetX + PANEL_WIDTH / 2, HEIGHT - 12, xLabel, { "text-anchor": "middle" }));
  parts.push(text(offsetX + PANEL_WIDTH / 2, 12, title, { "text-anchor": "middle", "font-weight": "bold" }));

  let legendY = MARGIN.top + 8;
  for (const s of series) {
    const pts = [...s.points].sort((p, q) => p[0] - q[0]);
    const mapped = pts.map(([px, py]) => [x.map(px), y.map(py)] as [number, number]);
    if (mapped.length > 1) {
      parts.push(polyline(mapped, { class: s.cssClass, stroke: s.color, "stroke-width": "1.6" }));
    }
    for (const [cx, cy] of mapped) {
      parts.push(circle(cx, cy, 3, { class: s.cssClass, fill: s.color }));
    }
    let label = s.label;
    if (pts.length > 1) {
      const slope = logLogSlope(pts.map((p) => p[0]), pts.map((p) => p[1]));
      label += ` (slope ${slope.toFixed(2)})`;
      parts.push(
        text(x0 + 8, legendY, label, { class: "slope-annotation", fill: s.color })
      );
    } else {
      parts.push(text(x0 + 8, legendY, label, { fill: s.color }));
    }
    legendY += 14;
  }
  return parts;
}

function formatTick(t: number): string {
  if (t >= 1) {
    return t >= 10000 ? `1e${Math.round(Math.log10(t))}` : String(Math.round(t));
  }
  return String(t);
}

function seriesFrom(
  rows: Table["rows"],
  xOf: (row: Record<string, string | null>) => number
): Series[] {
  const defs: Array<[string, string, string]> = [
    ["classical_model_queries", "series-classical", "#d62728"],
    ["quantum_model_queries", "series-quantum", "#1f77b4"],
  ];
  return defs.map(([column, cssClass, color]) => ({
    label: column.replace("_queries", "").replace("_", " "),
    cssClass,
    color,
    points: rows.map((r) => [xOf(r), toNumber(r[column], `column ${column}`)] as [number, number]),
  }));
}

export function renderCompare(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(
    table,
    ["section", "c", "epsilon", "classical_model_queries", "quantum_model_queries"],
    "compare CSV"
  );
  const scaling = table.rows.filter((r) => r["section"] === "c_scaling");
  const grid = table.rows.filter((r) => r["section"] === "epsilon_grid");
  if (scaling.length === 0 && grid.length === 0) {
    throw new ParseError("compare CSV has no c_scaling or epsilon_grid rows");
  }
  const parts: string[] = [];
  let offset = 0;
  if (scaling.length > 0) {
    parts.push(
      ...panel(
        offset,
        "scaling with decision space",
        "decision-space size 2^c",
        seriesFrom(scaling, (r) => Math.pow(2, toNumber(r["c"], "column c")))
      )
    );
    offset += PANEL_WIDTH;
  }
  if (grid.length > 0) {
    parts.push(
      ...panel(
        offset,
        "scaling with precision",
        "1 / epsilon",
        seriesFrom(grid, (r) => 1 / toNumber(r["epsilon"], "column epsilon"))
      )
    );
    offset += PANEL_WIDTH;
  }
  return svgDocument(Math.max(offset, PANEL_WIDTH), HEIGHT, parts);
}
