"""Calibrated oversampling constants.

The sample-count formulas fix everything except multiplicative constants;
those are pinned empirically by the ``calibrate`` subcommand and stored in a
small JSON config so the thresholds behind the validation gates stay
auditable. Resolution order: explicit path, then the NUMSPARSE_CONSTANTS
environment variable, then the packaged defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from importlib import resources

ENV_VAR = "NUMSPARSE_CONSTANTS"


@dataclass(frozen=True)
class CalibratedConstants:
    """Multipliers for the hybrid budget, the per-row l1 budget and the
    spectral pair count."""

    c_over: float = 1.0
    c_l1: float = 1.0
    c_mz: float = 1.0
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        from .report import canonical_json

        return canonical_json(asdict(self))


def default_constants_text() -> str:
    return resources.files("numsparse").joinpath("data/constants.json").read_text()


def load_constants(path: str | None = None) -> CalibratedConstants:
    """Load constants from ``path``, the environment override, or defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        text = default_constants_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)
    return CalibratedConstants(
        c_over=float(raw["c_over"]),
        c_l1=float(raw["c_l1"]),
        c_mz=float(raw["c_mz"]),
        meta=dict(raw.get("meta", {})),
    )


def save_constants(consts: CalibratedConstants, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(consts.to_json())
