"""Deterministic serialization of reports and plot-ready data files."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .intervals import IntervalUnion

__all__ = ["to_jsonable", "dumps", "dump_json", "config_hash", "format_number", "emit_plot_data"]


def _float(x: float):
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def to_jsonable(obj):
    """Convert nested results to JSON-ready values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and
    ``"nan"``; Fractions become ``"n/d"`` strings; sets become sorted lists.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, IntervalUnion):
        return obj.to_list()
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(x) for x in obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()] if obj.dtype != object else [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dump_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def config_hash(obj) -> str:
    """SHA-256 of the canonical compact JSON form."""
    text = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(text.encode()).hexdigest()


def format_number(x) -> str:
    """Locale-independent text with 17 significant digits."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return "%.17g" % x


def _rows(series):
    if hasattr(series, "to_rows"):
        return series.to_rows()
    if hasattr(series, "rows"):
        return series.rows()
    return series


def emit_plot_data(series, path, header: Optional[Sequence[str]] = None, delimiter: str = "\t") -> Path:
    """Write a table of numbers as delimited text.

    Parameters
    ----------
    series : array_like, StepFunction or SurvivorTrace
        Rows of numbers.  Step functions give ``(x_left, x_right, value)``
        and survivor traces ``(n, measure, log_measure)``.  A 1-D array is
        written as ``(n, value)``.
    header : sequence of str, optional
        Column names, written as a ``#`` comment line.

    Raises
    ------
    ValueError
        If `series` is empty.
    OSError
        If `path` cannot be written.
    """
    rows = _rows(series)
    rows = list(rows) if not isinstance(rows, np.ndarray) else rows
    if len(rows) == 0:
        raise ValueError("series is empty")
    arr = rows if isinstance(rows, np.ndarray) else np.asarray(rows, dtype=object)
    if arr.ndim == 1:
        arr = np.column_stack((np.arange(len(arr)), arr.astype(object)))
    lines = []
    if header:
        lines.append("# " + delimiter.join(header))
    for row in arr:
        lines.append(delimiter.join(format_number(x) for x in row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
