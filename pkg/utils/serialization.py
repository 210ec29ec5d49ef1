"""
JSON writer that renders every float with 17 significant digits.
"""
import json
import math
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = None) -> str:
    """Serialize dicts/lists/scalars; floats keep full double precision."""
    return _encode(obj, indent, 0)


def _encode(obj: Any, indent, level: int) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return _wrap("{", "}", items, indent, level)
    if isinstance(obj, (list, tuple)):
        items = [_encode(v, indent, level + 1) for v in obj]
        return _wrap("[", "]", items, indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _wrap(open_: str, close: str, items, indent, level: int) -> str:
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + item for item in items) + "\n" + end + close
