/**
 * plot dynamics|compare --csv PATH --out PATH
 *
 * Reads a satprob CSV and writes a deterministic SVG figure.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { ParseError } from "./csv";
import { renderCompare } from "./compare";
import { renderDynamics } from "./dynamics";

const USAGE = "usage: plot dynamics|compare --csv PATH --out PATH";

function parseArgs(argv: string[]): { command: string; csv: string; out: string } {
  const [command, ...rest] = argv;
  if (command !== "dynamics" && command !== "compare") {
    throw new ParseError(USAGE);
  }
  let csv: string | null = null;
  let out: string | null = null;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new ParseError(`missing value for ${flag}\n${USAGE}`);
    if (flag === "--csv") csv = value;
    else if (flag === "--out") out = value;
    else throw new ParseError(`unknown flag ${flag}\n${USAGE}`);
  }
  if (csv === null || out === null) throw new ParseError(USAGE);
  return { command, csv, out };
}

export function main(argv: string[]): number {
  try {
    const { command, csv, out } = parseArgs(argv);
    let contents: string;
    try {
      contents = readFileSync(csv, "utf8");
    } catch (exc) {
      throw new ParseError(`cannot read CSV ${csv}: ${(exc as Error).message}`);
    }
    const svg = command === "dynamics" ? renderDynamics(contents) : renderCompare(contents);
    mkdirSync(dirname(out), { recursive: true });
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (exc) {
    if (exc instanceof ParseError) {
      console.error(`error: ${exc.message}`);
      return 2;
    }
    throw exc;
  }
}
