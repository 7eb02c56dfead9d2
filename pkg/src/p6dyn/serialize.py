"""Deterministic JSON and CSV emission.

Floats are always rendered with 17 significant digits so that identical
invocations produce byte-identical artifacts; complex values appear as
[re, im] pairs upstream of this module.
"""

from __future__ import annotations

import math

__all__ = ["format_float", "dumps", "write_csv"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{_escape(str(k))}: {_encode(v, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close_pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(isinstance(v, (int, float, str, bool, type(None))) for v in obj)
        parts = [_encode(v, indent, level + 1) for v in obj]
        if flat:
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + close_pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps(obj, indent=2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_csv(path, header, rows, trailer_comments=()):
    """Plain CSV with fixed float formatting; comments go in a trailer."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [
                format_float(v) if isinstance(v, float) else str(v) for v in row
            ]
            fh.write(",".join(cells) + "\n")
        for comment in trailer_comments:
            fh.write(f"# {comment}\n")
