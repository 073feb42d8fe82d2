"""Deterministic report serialization.

Reports are plain dicts and lists of rows.  JSON output is written by a
small recursive renderer so float formatting (17 significant digits) and
key order (sorted) are fixed independently of interpreter defaults; CSV
output covers the tabular part of a report.  Running the same check twice
must produce byte-identical documents, so nothing here looks at the clock
or at any global state.
"""

import csv
import io
import json
import math
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError

JSON_INDENT = 2


def format_float(x: float) -> str:
    """Fixed 17-significant-digit rendering, enough to round-trip."""
    return "%.17g" % float(x)


def _coerce_scalar(value, where: str):
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError("non-finite value in report at %s" % where)
        return value
    if isinstance(value, str) or value is None:
        return value
    raise ConfigError("cannot serialize %r at %s" % (type(value).__name__,
                                                     where))


def _render(value, level: int, where: str, parts: list) -> None:
    pad = " " * (JSON_INDENT * level)
    inner = " " * (JSON_INDENT * (level + 1))
    if isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        keys = sorted(value)
        for key in keys:
            if not isinstance(key, str):
                raise ConfigError("report keys must be strings, got %r at %s"
                                  % (key, where))
        for i, key in enumerate(keys):
            parts.append(inner + json.dumps(key) + ": ")
            _render(value[key], level + 1, where + "." + key, parts)
            parts.append(",\n" if i + 1 < len(keys) else "\n")
        parts.append(pad + "}")
        return
    if isinstance(value, (list, tuple)):
        if not value:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(value):
            parts.append(inner)
            _render(item, level + 1, "%s[%d]" % (where, i), parts)
            parts.append(",\n" if i + 1 < len(value) else "\n")
        parts.append(pad + "]")
        return
    scalar = _coerce_scalar(value, where)
    if scalar is None:
        parts.append("null")
    elif isinstance(scalar, bool):
        parts.append("true" if scalar else "false")
    elif isinstance(scalar, int):
        parts.append(str(scalar))
    elif isinstance(scalar, float):
        parts.append(format_float(scalar))
    else:
        parts.append(json.dumps(scalar))


def render_json(report) -> str:
    """Serialize a report to deterministic JSON text."""
    parts: list = []
    _render(report, 0, "report", parts)
    parts.append("\n")
    return "".join(parts)


def _cell(value, where: str) -> str:
    scalar = _coerce_scalar(value, where)
    if scalar is None:
        return ""
    if isinstance(scalar, bool):
        return "true" if scalar else "false"
    if isinstance(scalar, float):
        return format_float(scalar)
    return str(scalar) if not isinstance(scalar, str) else scalar


def render_csv(rows: Sequence[dict],
               columns: Optional[Sequence[str]] = None) -> str:
    """Serialize a list of flat row dicts to deterministic CSV text."""
    rows = list(rows)
    if columns is None:
        seen: set = set()
        for row in rows:
            seen.update(row)
        columns = sorted(seen)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(columns))
    for i, row in enumerate(rows):
        writer.writerow([_cell(row.get(col), "row[%d].%s" % (i, col))
                         for col in columns])
    return buf.getvalue()


def _tabular_part(report) -> Sequence[dict]:
    if isinstance(report, (list, tuple)):
        return list(report)
    for key in ("witnesses", "rows"):
        if key in report and isinstance(report[key], (list, tuple)):
            return list(report[key])
    raise ConfigError("report has no tabular part for csv output")


def emit_report(report, path: Optional[str] = None,
                format: str = "json") -> str:
    """Render a report and optionally write it; returns the text.

    Accepts either a plain dict/list or an object with to_dict().  CSV
    format serializes the row table of the report; JSON serializes the
    whole document.  Write failures surface the path.
    """
    if hasattr(report, "to_dict"):
        report = report.to_dict()
    if format == "json":
        text = render_json(report)
    elif format == "csv":
        text = render_csv(_tabular_part(report))
    else:
        raise ConfigError("unknown report format: %r" % (format,))
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            raise ConfigError("cannot write report to %s: %s" % (path, exc))
    return text
