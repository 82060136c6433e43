"""
Angle specifications.

An angle is given as a fraction a of a full turn (alpha = 2*pi*a): an exact
rational p/q, an exact quadratic surd (p + q*sqrt(d))/r, or decimal radians.
Exact forms keep continued fractions free of floating drift.
"""
from __future__ import annotations

import math
from typing import Any, Dict, List, Union

from pydantic import BaseModel, ConfigDict, model_validator

TWO_PI = 2.0 * math.pi


def floor_surd(p: int, q: int, d: int, r: int) -> int:
    """Exact floor of (p + q*sqrt(d)) / r for r > 0 and non-square d."""
    s = math.isqrt(q * q * d)
    if q >= 0:
        return (p + s) // r
    return (p - s - 1) // r


class RationalSpec(BaseModel):
    """a = p/q, stored reduced with 0 <= p < q."""
    model_config = ConfigDict(frozen=True)

    p: int
    q: int

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        p, q = int(data["p"]), int(data["q"])
        if q == 0:
            raise ValueError("rational angle needs q != 0")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        p, q = p // g, q // g
        return {"p": p % q, "q": q}

    @property
    def exact(self) -> bool:
        return True

    def turns(self) -> float:
        return self.p / self.q

    def radians(self) -> float:
        return TWO_PI * self.p / self.q

    def negated(self) -> "RationalSpec":
        return RationalSpec(p=-self.p, q=self.q)

    def to_json(self) -> Dict[str, List[int]]:
        return {"rat": [self.p, self.q]}


class SurdSpec(BaseModel):
    """a = (p + q*sqrt(d)) / r, stored with r > 0 and reduced into [0, 1)."""
    model_config = ConfigDict(frozen=True)

    p: int
    q: int
    d: int
    r: int

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        p, q, d, r = (int(data[key]) for key in ("p", "q", "d", "r"))
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise ValueError(f"surd angle needs a positive non-square d, got {d}")
        if q == 0:
            raise ValueError("surd angle needs q != 0 (use a rational spec)")
        if r == 0:
            raise ValueError("surd angle needs r != 0")
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        p, q, r = p // g, q // g, r // g
        p -= floor_surd(p, q, d, r) * r
        return {"p": p, "q": q, "d": d, "r": r}

    @property
    def exact(self) -> bool:
        return True

    def turns(self) -> float:
        value = (self.p + self.q * math.sqrt(self.d)) / self.r
        return value - math.floor(value)

    def radians(self) -> float:
        return TWO_PI * self.turns()

    def negated(self) -> "SurdSpec":
        return SurdSpec(p=-self.p, q=-self.q, d=self.d, r=self.r)

    def to_json(self) -> Dict[str, List[int]]:
        return {"surd": [self.p, self.q, self.d, self.r]}


class DecimalSpec(BaseModel):
    """Decimal radians; a = radians / (2*pi) reduced into [0, 1)."""
    model_config = ConfigDict(frozen=True)

    radians_value: float

    @model_validator(mode="before")
    @classmethod
    def _check(cls, data: Any) -> Any:
        if isinstance(data, dict) and not math.isfinite(float(data["radians_value"])):
            raise ValueError("angle must be finite")
        return data

    @property
    def exact(self) -> bool:
        return False

    def turns(self) -> float:
        value = self.radians_value / TWO_PI
        value -= math.floor(value)
        return 0.0 if value >= 1.0 else value

    def radians(self) -> float:
        return TWO_PI * self.turns()

    def negated(self) -> "DecimalSpec":
        return DecimalSpec(radians_value=-self.radians_value)

    def to_json(self) -> float:
        return self.radians_value


AngleSpec = Union[RationalSpec, SurdSpec, DecimalSpec]


def parse_angle_spec(raw: Any) -> AngleSpec:
    """
    Parse the JSON angle forms: a number (radians), {"rat": [p, q]} or
    {"surd": [p, q, d, r]}. Strings of those forms are accepted for the CLI.
    """
    if isinstance(raw, (RationalSpec, SurdSpec, DecimalSpec)):
        return raw
    if isinstance(raw, bool):
        raise ValueError(f"invalid angle spec: {raw!r}")
    if isinstance(raw, (int, float)):
        return DecimalSpec(radians_value=float(raw))
    if isinstance(raw, str):
        return parse_angle_text(raw)
    if isinstance(raw, dict) and len(raw) == 1:
        if "rat" in raw and len(raw["rat"]) == 2:
            p, q = raw["rat"]
            return RationalSpec(p=p, q=q)
        if "surd" in raw and len(raw["surd"]) == 4:
            p, q, d, r = raw["surd"]
            return SurdSpec(p=p, q=q, d=d, r=r)
    raise ValueError(f"invalid angle spec: {raw!r}")


def parse_angle_text(text: str) -> AngleSpec:
    """
    Command-line angle forms: "rat:p/q", "surd:p,q,d,r", or a decimal number
    of radians.
    """
    text = text.strip()
    if text.startswith("rat:"):
        p, _, q = text[4:].partition("/")
        return RationalSpec(p=int(p), q=int(q))
    if text.startswith("surd:"):
        parts = [int(part) for part in text[5:].split(",")]
        if len(parts) != 4:
            raise ValueError(f"surd spec needs four integers, got {text!r}")
        p, q, d, r = parts
        return SurdSpec(p=p, q=q, d=d, r=r)
    try:
        return DecimalSpec(radians_value=float(text))
    except ValueError:
        raise ValueError(f"invalid angle spec: {text!r}")
