/**
 * Parser for the CLI's delimited output: RFC-4180 fields preceded by
 * `# key=value` metadata comment lines.
 */

export interface Table {
  meta: Record<string, string>;
  columns: string[];
  rows: Record<string, string | null>[];
}

export class ParseError extends Error {}

function splitRecords(text: string): string[][] {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    push();
    records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      push();
      i += 1;
    } else if (ch === "\r" && text[i + 1] === "\n") {
      endRecord();
      i += 2;
    } else if (ch === "\n") {
      endRecord();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (inQuotes) throw new ParseError("unterminated quoted field");
  if (field.length > 0 || record.length > 0) endRecord();
  return records;
}

export function parseCsv(text: string): Table {
  const meta: Record<string, string> = {};
  const lines = text.split(/\r?\n/);
  let bodyStart = 0;
  for (const line of lines) {
    if (!line.startsWith("#")) break;
    bodyStart += line.length + 1;
    const eq = line.indexOf("=");
    if (eq > 0) {
      meta[line.slice(1, eq).trim()] = line.slice(eq + 1).trim();
    }
  }
  const records = splitRecords(text.slice(bodyStart)).filter(
    (r) => !(r.length === 1 && r[0] === "")
  );
  if (records.length === 0) throw new ParseError("CSV has no header row");
  const columns = records[0];
  const rows = records.slice(1).map((record) => {
    const row: Record<string, string | null> = {};
    columns.forEach((col, idx) => {
      const value = record[idx] ?? "";
      row[col] = value === "" ? null : value;
    });
    return row;
  });
  return { meta, columns, rows };
}

export function requireColumns(table: Table, needed: string[], context: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new ParseError(`${context} is missing required column(s): ${missing.join(", ")}`);
  }
}

/** Strict decimal parsing: malformed numbers are an error, not NaN. */
export function toNumber(value: string | null | undefined, context: string): number {
  if (value === null || value === undefined || value === "") {
    throw new ParseError(`missing numeric value for ${context}`);
  }
  const num = Number(value);
  if (!Number.isFinite(num)) {
    throw new ParseError(`malformed decimal "${value}" in ${context}`);
  }
  return num;
}
