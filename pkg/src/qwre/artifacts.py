"""
CSV / JSON writers and readers for the CLI data artifacts.

Floats are written with 17 significant digits, enough for an exact double
round trip. Header metadata in CSV files goes on leading ``# key=value`` lines.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Mapping, Sequence, TextIO

import numpy as np

from .evolve import Distribution
from .limit import ConvergenceReport

__all__ = [
    "fmt",
    "write_table",
    "read_table",
    "distribution_rows",
    "emit_distribution",
    "parse_distribution",
    "emit_density",
    "emit_convergence",
]

DISTRIBUTION_COLUMNS = ("position", "probability")
DENSITY_COLUMNS = ("x", "density")
CONVERGENCE_COLUMNS = ("n", "ks", "mean", "variance")


def fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_table(
    out: TextIO,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    fmt_name: str = "csv",
    meta: Mapping[str, Any] | None = None,
) -> None:
    """Write rows as CSV (with ``# key=value`` metadata lines) or as a JSON object."""
    rows = [list(r) for r in rows]
    if fmt_name == "json":
        doc: dict[str, Any] = dict(meta or {})
        doc["columns"] = list(columns)
        doc["rows"] = [[_jsonable(v) for v in r] for r in rows]
        out.write(json.dumps(doc) + "\n")
        return
    if fmt_name != "csv":
        raise ValueError(f"unknown output format {fmt_name!r}")
    for k, v in (meta or {}).items():
        out.write(f"# {k}={fmt(v)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _jsonable(v: Any) -> Any:
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def read_table(text: str) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of the CSV branch of :func:`write_table`: (meta, columns, rows)."""
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    return meta, columns, [row for row in reader]


def distribution_rows(dist: Distribution):
    return zip(dist.positions.tolist(), dist.mass.tolist())


def emit_distribution(dist: Distribution, fmt_name: str = "csv", meta: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    m = {"time": dist.time}
    m.update(meta or {})
    write_table(buf, DISTRIBUTION_COLUMNS, distribution_rows(dist), fmt_name, m)
    return buf.getvalue()


def parse_distribution(text: str) -> Distribution:
    """Read a distribution written by :func:`emit_distribution` (CSV or JSON)."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        pairs = [(int(x), float(p)) for x, p in doc["rows"]]
        time = int(doc["time"])
    else:
        meta, columns, rows = read_table(text)
        if tuple(columns) != DISTRIBUTION_COLUMNS:
            raise ValueError(f"not a distribution table: columns {columns}")
        pairs = [(int(x), float(p)) for x, p in rows]
        time = int(meta["time"]) if "time" in meta else max(abs(x) for x, _ in pairs)
    return Distribution.from_mapping(time, dict(pairs))


def emit_density(xs, values, fmt_name: str = "csv", meta: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    write_table(buf, DENSITY_COLUMNS, zip(np.asarray(xs).tolist(), np.asarray(values).tolist()), fmt_name, meta)
    return buf.getvalue()


def emit_convergence(report: ConvergenceReport, fmt_name: str = "csv", meta: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    m = {"limit_mean": report.limit_mean, "limit_variance": report.limit_variance}
    m.update(meta or {})
    write_table(buf, CONVERGENCE_COLUMNS, report.rows(), fmt_name, m)
    return buf.getvalue()
