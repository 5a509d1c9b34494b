"""Deterministic CSV emission and parsing.

Files are RFC-4180 with '.' decimals and a fixed column order, preceded by
`# key=value` comment lines carrying run metadata (config hash, seed,
version, and the scalar parameters a plotter needs). Floats are written with
repr (shortest round-trip), so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .errors import InputError


def fmt_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: str | Path, columns: list[str], rows: list[dict], meta: dict) -> None:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={fmt_value(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_value(row.get(col)) for col in columns])
    Path(path).write_text(buf.getvalue())


def read_csv(path: str | Path) -> tuple[dict, list[str], list[dict]]:
    """Returns (meta, columns, rows); row values stay as strings, empty
    fields as None."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read CSV {path}: {exc}") from exc
    meta: dict[str, str] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if "=" in body:
            key, _, value = body.partition("=")
            meta[key.strip()] = value.strip()
        i += 1
    reader = csv.reader(io.StringIO("\n".join(lines[i:])))
    table = list(reader)
    if not table:
        raise InputError(f"CSV {path} has no header row")
    columns = table[0]
    rows = []
    for record in table[1:]:
        if not record:
            continue
        rows.append({col: (val if val != "" else None) for col, val in zip(columns, record)})
    return meta, columns, rows


def require_columns(columns: list[str], needed: list[str], path) -> None:
    missing = [c for c in needed if c not in columns]
    if missing:
        raise InputError(f"CSV {path} is missing required column(s): {', '.join(missing)}")


def parse_float(value: str, context: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed decimal {value!r} in {context}") from exc
