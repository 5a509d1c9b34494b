/**
 * Minimal deterministic SVG string builder: fixed attribute order (insertion
 * order), fixed numeric formatting, no timestamps or generated ids.
 */

export type Attrs = Record<string, string | number>;

/** Coordinates rendered with two decimals, trimmed of trailing zeros. */
export function fmt(x: number): string {
  const fixed = x.toFixed(2);
  return fixed.replace(/\.?0+$/, "") || "0";
}

function renderAttrs(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${typeof value === "number" ? fmt(value) : value}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children?: string | string[]): string {
  const body = children === undefined ? "" : Array.isArray(children) ? children.join("") : children;
  if (body === "") return `<${tag}${renderAttrs(attrs)}/>`;
  return `<${tag}${renderAttrs(attrs)}>${body}</${tag}>`;
}

export function text(x: number, y: number, content: string, attrs: Attrs = {}): string {
  return el("text", { x, y, ...attrs }, escapeText(content));
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): string {
  return el("line", { x1, y1, x2, y2, ...attrs });
}

export function rect(x: number, y: number, width: number, height: number, attrs: Attrs = {}): string {
  return el("rect", { x, y, width, height, ...attrs });
}

export function polyline(points: Array<[number, number]>, attrs: Attrs = {}): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return el("polyline", { points: pts, fill: "none", ...attrs });
}

export function circle(cx: number, cy: number, r: number, attrs: Attrs = {}): string {
  return el("circle", { cx, cy, r, ...attrs });
}

export function escapeText(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function svgDocument(width: number, height: number, children: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">` +
    children.join("") +
    `</svg>\n`
  );
}
