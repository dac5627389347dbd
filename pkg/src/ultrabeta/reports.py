"""Result containers shared by the quadrature and Monte Carlo engines."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


def _encode_value(v):
    v = complex(v)
    if v.imag == 0.0:
        return v.real
    return [v.real, v.imag]


@dataclass(frozen=True)
class EstimateReport:
    """A numeric estimate with an error bar and run provenance."""

    value: complex
    standard_error: float
    n_samples: int
    seed: int | None = None
    wall_time: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        # NaN marks an undefined error bar (single-draw estimates)
        if not (self.standard_error >= 0.0 or math.isnan(self.standard_error)):
            raise ValueError("standard_error must be >= 0 or NaN")

    def to_dict(self) -> dict:
        return {
            "value": _encode_value(self.value),
            "se": float(self.standard_error),
            "n": int(self.n_samples),
            "seed": self.seed,
            "diag": dict(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())
