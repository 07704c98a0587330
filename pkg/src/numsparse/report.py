"""Canonical JSON reports.

Reports must be byte-identical across reruns with the same flags and seed,
so serialization is pinned down: keys sorted at every level, floats printed
with 12 significant digits, no locale or dict-order dependence. Wall-clock
metrics are the one sanctioned exception and live under keys starting with
``wall_ms``; :func:`deterministic_metrics` strips them for comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def _format(value, indent: int, pad: str) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} in report")
        return format(value, ".12g")
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    inner = pad + "  "
    if isinstance(value, dict):
        if not value:
            return "{}"
        keys = sorted(value)
        if any(not isinstance(k, str) for k in keys):
            raise TypeError("report keys must be strings")
        items = (f'{inner}"{k}": {_format(value[k], indent, inner)}' for k in keys)
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = (f"{inner}{_format(v, indent, inner)}" for v in value)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    try:
        import numpy as np

        if isinstance(value, np.integer):
            return str(int(value))
        if isinstance(value, np.floating):
            return _format(float(value), indent, pad)
        if isinstance(value, np.ndarray):
            return _format(value.tolist(), indent, pad)
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot serialize {type(value).__name__} in report")


def canonical_json(obj) -> str:
    """Serialize ``obj`` to the canonical report form (trailing newline)."""
    return _format(obj, 0, "") + "\n"


def deterministic_metrics(metrics: dict) -> dict:
    """Metrics with wall-clock keys removed; this is the part that must be
    byte-identical across reruns."""
    return {k: v for k, v in metrics.items() if not k.startswith("wall_ms")}


@dataclass
class RunReport:
    """One subcommand invocation: echoed configuration, metrics, seed."""

    subcommand: str
    seed: int
    config: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return canonical_json(
            {
                "subcommand": self.subcommand,
                "seed": self.seed,
                "config": self.config,
                "metrics": self.metrics,
            }
        )

    def metrics_json(self) -> str:
        """Canonical form of the deterministic metric block."""
        return canonical_json(deterministic_metrics(self.metrics))
