import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { renderCompare } from "../src/compare";
import { ParseError } from "../src/csv";
import { logLogSlope } from "../src/scale";

const FIXTURE = readFileSync(join(__dirname, "fixtures", "compare_default.csv"), "utf8");

const HEADER =
  "section,c,b,epsilon,delta,m,M,lambda_t,L_t,mu,inv_lambda_mean," +
  "classical_model_queries,quantum_model_queries,advantage_model," +
  "classical_measured_queries,quantum_measured_queries,classical_mu_tilde," +
  "quantum_a_tilde,quantum_epsilon_bound";

function scalingRow(c: number, classicalQ: number, quantumQ: number): string {
  return `c_scaling,${c},2,0.1,0.05,7,128,${2 ** -c},15,1.0,${2 ** c},${classicalQ},${quantumQ},1.0,,,,,`;
}

describe("renderCompare", () => {
  it("renders both series with slope annotations from the fixture", () => {
    const svg = renderCompare(FIXTURE);
    expect(svg).toContain('class="series-classical"');
    expect(svg).toContain('class="series-quantum"');
    expect(svg).toContain('class="slope-annotation"');
    expect(svg).toContain("scaling with decision space");
    expect(svg).toContain("scaling with precision");
  });

  it("is deterministic", () => {
    expect(renderCompare(FIXTURE)).toBe(renderCompare(FIXTURE));
  });

  it("annotates distinct slopes for the two series", () => {
    const csv = [HEADER, scalingRow(4, 1600, 4080), scalingRow(8, 25600, 15300), ""].join("\n");
    const svg = renderCompare(csv);
    const slopes = [...svg.matchAll(/slope ([-0-9.]+)/g)].map((m) => Number(m[1]));
    expect(slopes).toHaveLength(2);
    expect(Math.abs(slopes[0] - 1.0)).toBeLessThan(0.01); // classical
    expect(Math.abs(slopes[1] - 0.48)).toBeLessThan(0.05); // quantum
  });

  it("renders a single row as points without a fit", () => {
    const csv = [HEADER, scalingRow(4, 1600, 4080), ""].join("\n");
    const svg = renderCompare(csv);
    expect(svg).toContain('class="series-quantum"');
    expect(svg).not.toContain("slope");
  });

  it("raises on malformed decimals", () => {
    const bad = [HEADER, "c_scaling,4,2,0.1,0.05,7,128,0.0625,15,1.0,16,many,4080,1.0,,,,,", ""].join("\n");
    expect(() => renderCompare(bad)).toThrow(/malformed decimal/);
  });

  it("raises when no plottable sections exist", () => {
    expect(() => renderCompare(HEADER + "\n")).toThrow(ParseError);
  });
});

describe("logLogSlope", () => {
  it("recovers exact power laws", () => {
    const xs = [1, 2, 4, 8];
    expect(logLogSlope(xs, xs.map((x) => x ** 2))).toBeCloseTo(2.0, 10);
    expect(logLogSlope(xs, xs.map((x) => 5 * Math.sqrt(x)))).toBeCloseTo(0.5, 10);
  });
});
