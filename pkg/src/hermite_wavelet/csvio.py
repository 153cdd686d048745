"""Plain CSV / JSON writers used by every export path."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["write_csv", "read_csv", "write_json", "fmt"]


def fmt(v) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path, header, columns) -> None:
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0]) if cols else 0
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(fmt(c[i]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Return ``(header, array)`` for a numeric CSV written by :func:`write_csv`."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]], dtype=float)
    return header, data.reshape(len(lines) - 1, len(header))


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")
