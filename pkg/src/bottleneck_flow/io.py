"""Deterministic CSV/JSON output (17 significant digits, fixed key order)."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

DIGITS = 17


def fmt(value) -> str:
    """Format one table cell; floats with 17 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return f"{v:.{DIGITS}g}"
    return str(value)


def _plain(obj):
    """Recursively convert numpy scalars/arrays and tuples for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # round-trip through the 17-digit repr so output is byte-stable
        return float(f"{v:.{DIGITS}g}") if math.isfinite(v) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def records_to_csv(records: list[dict]) -> str:
    """CSV from a list of flat dicts sharing the keys of the first record."""
    if not records:
        return ""
    header = list(records[0])
    return to_csv(header, ([r.get(k) for k in header] for r in records))


def write_text(text: str, path=None, stream=None):
    """Write ``text`` to ``path`` or, when no path is given, to ``stream``."""
    if path is None:
        stream.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
