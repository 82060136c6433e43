"""
Parameter file model.

{"alpha": <angle>, "C0": [re, im], "C1": [re, im], "gamma": <angle>, "z0": [re, im]}
Centres and z0 may also be written {"polar": [r, theta]}.
"""
from __future__ import annotations

import cmath
import json
import math
from pathlib import Path
from typing import Any, Tuple, Union

from pydantic import BaseModel, ConfigDict, field_validator

from pwrot.models.angle import AngleSpec, parse_angle_spec


def _parse_point(raw: Any) -> Tuple[float, float]:
    if isinstance(raw, dict) and set(raw) == {"polar"}:
        radius, theta = (float(v) for v in raw["polar"])
        z = cmath.rect(radius, theta)
        values = (z.real, z.imag)
    elif isinstance(raw, (list, tuple)) and len(raw) == 2:
        values = (float(raw[0]), float(raw[1]))
    elif isinstance(raw, complex):
        values = (raw.real, raw.imag)
    else:
        raise ValueError(f"point must be [re, im] or {{\"polar\": [r, theta]}}, got {raw!r}")
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"point must be finite, got {raw!r}")
    return values


class MapParameters(BaseModel):
    """Raw map parameters; the line D passes through z0 with direction e^{i gamma}."""
    model_config = ConfigDict(frozen=True)

    alpha: AngleSpec
    C0: Tuple[float, float]
    C1: Tuple[float, float]
    gamma: AngleSpec
    z0: Tuple[float, float] = (0.0, 0.0)

    @field_validator("alpha", "gamma", mode="before")
    @classmethod
    def _angle(cls, raw: Any) -> AngleSpec:
        return parse_angle_spec(raw)

    @field_validator("C0", "C1", "z0", mode="before")
    @classmethod
    def _point(cls, raw: Any) -> Tuple[float, float]:
        return _parse_point(raw)

    @property
    def c0(self) -> complex:
        return complex(*self.C0)

    @property
    def c1(self) -> complex:
        return complex(*self.C1)

    @property
    def line_point(self) -> complex:
        return complex(*self.z0)


def load_parameters(path: Union[str, Path]) -> MapParameters:
    """Read and validate a parameter file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read parameter file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"parameter file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValueError(f"parameter file {path} must hold a JSON object")
    return MapParameters(**data)
