"""Deterministic file writers shared by the report-producing modules.

Floats are written with 17 significant digits (``%.17g``), which
round-trips IEEE doubles exactly; JSON keys are sorted so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

FLOAT_FMT = "%.17g"


def format_value(x):
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return FLOAT_FMT % x
    return str(x)


def write_csv(path, header, rows):
    """Write rows (iterables of scalars) under a comma-joined header."""
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path
