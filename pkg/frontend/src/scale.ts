/** Linear and logarithmic axis scales with simple tick selection. */

export interface Scale {
  map(value: number): number;
  ticks: number[];
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= raw) return mag * mult;
  }
  return mag * 10;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickTarget = 6
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const step = niceStep(span, tickTarget);
  const ticks: number[] = [];
  for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-9; t += step) {
    ticks.push(Number(t.toFixed(10)));
  }
  return {
    map: (v: number) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks,
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale requires positive domain");
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const ticks: number[] = [];
  for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) ticks.push(d0, d1);
  return {
    map: (v: number) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks,
  };
}

/** Least-squares slope of ln(y) against ln(x). */
export function logLogSlope(xs: number[], ys: number[]): number {
  const lx = xs.map(Math.log);
  const ly = ys.map(Math.log);
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i += 1) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) ** 2;
  }
  return num / den;
}
