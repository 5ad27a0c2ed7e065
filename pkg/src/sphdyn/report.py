"""Deterministic JSON and CSV output.

Floats are written with 17 significant digits so that every double
round-trips; infinities and NaN become the strings ``"inf"``, ``"-inf"`` and
``"nan"`` because JSON has no literal for them.  Keys keep insertion order.
"""
from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        text = format_float(obj)
        out.append(text if math.isfinite(obj) else json.dumps(text))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(str(k)) + ": ")
            _encode(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _encode(v, out, indent, level + 1)
        out.append(end + "]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), out, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    out: list[str] = []
    _encode(obj, out, indent, 0)
    return "".join(out) + "\n"


def emit_report(report, fmt: str = "json", destination=None, config: dict | None = None) -> str:
    """Serialize ``report`` (a dict, a dataclass with ``to_dict`` or CSV text) and write it.

    ``config`` is appended under the key ``"config"``.  ``destination`` is a
    path or ``None`` for standard output.  Returns the text written.
    """
    if fmt == "json":
        data = report.to_dict() if hasattr(report, "to_dict") else dict(report)
        if config is not None:
            data["config"] = config
        text = to_json(data)
    elif fmt == "csv":
        if not isinstance(report, str):
            raise TypeError("csv output needs preformatted text")
        text = report
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None:
        sys.stdout.write(text)
    else:
        Path(destination).write_text(text)
    return text
