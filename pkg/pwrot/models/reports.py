"""
Report models - the JSON documents emitted by the CLI and returned by the
report service. Every top-level report carries schema = "pwrot/1".
"""
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, computed_field

SCHEMA = "pwrot/1"


class OriginShiftRecord(BaseModel):
    """Bound recomputed after moving the origin along D"""
    p_point: Tuple[float, float]
    norm_shifted: float
    l0_shifted: int
    q_l0_shifted: int
    M_shifted: float


class BoundReport(BaseModel):
    """Certified limit-set radius"""
    schema_id: str = SCHEMA
    delta: float
    norm: float
    classification: str
    case: str  # 'Irrational' | 'Rational'
    l0: Optional[int] = None
    q_l0: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    xbar: Optional[float] = None
    phi: Optional[float] = None
    M: float
    M_shifted: Optional[float] = None
    # Radius about the original origin; min(M, M_shifted + |p_point|)
    M_certified: float
    origin_shift: Optional[OriginShiftRecord] = None

    def to_dict(self) -> dict:
        data = self.model_dump(mode="json")
        data = {"schema": data.pop("schema_id"), **data}
        return data


class CertificateReport(BaseModel):
    """Outcome of an escape or attract certificate run"""
    schema_id: str = SCHEMA
    mode: str  # 'escape' | 'attract'
    passed: bool
    samples: int
    horizon: int
    blocks_used: int
    min_gain: Optional[float] = None
    worst_sample: Optional[int] = None
    K_x0: Optional[float] = None
    x0: Optional[float] = None
    M: float
    start_radius: float
    target_radius: float
    blocks_to_target: Optional[int] = None
    entry_block: Optional[int] = None
    final_max_radius: Optional[float] = None
    # attract only: largest climb of the sup above its running minimum
    max_rise: Optional[float] = None
    rise_tolerance: Optional[float] = None
    offending: List[int] = []
    conjugacy: Optional[str] = None

    def to_dict(self) -> dict:
        data = self.model_dump(mode="json")
        data = {"schema": data.pop("schema_id"), **data}
        return data


class IslandRecord(BaseModel):
    """One verified periodic island"""
    word: str
    period: int
    z: Tuple[float, float]
    weight: float

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


class VerifyCheck(BaseModel):
    """Single named check of a verify suite"""
    name: str
    expected: Any
    computed: Any
    tolerance: Optional[float] = None
    passed: bool


class VerifySuiteResult(BaseModel):
    """Named collection of checks; passes iff every check passes"""
    schema_id: str = SCHEMA
    suite: str
    checks: List[VerifyCheck] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        data = self.model_dump(mode="json")
        data = {"schema": data.pop("schema_id"), **data}
        return data
