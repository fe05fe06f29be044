"""
Deterministic serialization of reports.

Floats are written with 17 significant digits, complex numbers as [re, im]
pairs, and object keys in insertion order, so equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
import json
import io
import math

import numpy as np

SCHEMA_VERSION = 1


def _float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x!r} in report")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def plain(obj):
    """Recursively convert numpy and complex values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [z.real, z.imag]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out: list, indent: int):
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, list):
        if all(not isinstance(v, (list, dict)) for v in obj):
            parts = []
            for v in obj:
                _emit(v, parts, 0)
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + "  " + _quote(k) + ": ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s: str) -> str:
    return json.dumps(s)


def dumps(report: dict) -> str:
    out: list[str] = []
    _emit(plain(report), out, 0)
    return "".join(out) + "\n"


def table_csv(header: list[str], rows: list[list]) -> str:
    """CSV projection of a convergence table; complex cells split into _re/_im columns."""
    rows = [plain(r) for r in rows]
    cols: list[str] = []
    for j, name in enumerate(header):
        if rows and isinstance(rows[0][j], list):
            cols += [f"{name}_re", f"{name}_im"]
        else:
            cols.append(name)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        cells = []
        for v in r:
            vs = v if isinstance(v, list) else [v]
            for c in vs:
                if isinstance(c, float):
                    cells.append(_float(c))
                elif c is None:
                    cells.append("")
                else:
                    cells.append(str(c).lower() if isinstance(c, bool) else c)
        w.writerow(cells)
    return buf.getvalue()
