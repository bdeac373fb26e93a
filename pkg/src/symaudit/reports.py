"""Canonical report serialization.

Reports are JSON with sorted keys, compact separators and every float
rendered with 17 significant digits, so a given payload always produces the
same bytes.  CSV is emitted only for sweep tables.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = "1.0.0"
TOOL_VERSION = "1.0.0"


def report_schema_version() -> str:
    return SCHEMA_VERSION


def _canon(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    return repr(obj)


def _render(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            return f'"{obj!r}"'
        return format(obj, ".17g")
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, list):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{_render(str(k))}:{_render(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot render {type(obj)}")


def canonical_json(payload) -> str:
    return _render(_canon(payload))


def envelope(subcommand: str, config: dict, payload, wall_time_s: float | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "subcommand": subcommand,
        "config": _canon(config),
        "payload": _canon(payload),
        "wall_time_s": wall_time_s,
    }


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
