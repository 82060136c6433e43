"""
Continued fractions of the rotation number a = alpha / (2*pi).

Rational and surd angles expand exactly (Euclid, and the classical
(P + sqrt(D)) / Q recurrence on integers). Decimal angles expand an interval
around the float and stop as soon as the two ends disagree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np

from pwrot.errors import (
    BijectiveMapError,
    NotFoundWithinDepthError,
    PrecisionExhaustedError,
    PreconditionViolatedError,
    RationalAngleError,
)
from pwrot.models.angle import AngleSpec, DecimalSpec, RationalSpec, SurdSpec, floor_surd
from pwrot.utils.logger import get_logger

logger = get_logger(__name__)

GAP_TOL = 1e-12


@dataclass(frozen=True)
class Convergents:
    partial_quotients: Tuple[int, ...]
    p: Tuple[int, ...]
    q: Tuple[int, ...]
    exact: bool
    spec: AngleSpec
    trusted_depth: Optional[int] = None

    def __len__(self) -> int:
        return len(self.partial_quotients)

    def ratio(self, l: int) -> Fraction:
        return Fraction(self.p[l], self.q[l])

    def rows(self) -> List[Tuple[int, int, int]]:
        return list(zip(self.partial_quotients, self.p, self.q))


@dataclass(frozen=True)
class L0Selection:
    l0: int
    q_l0: int
    lhs_at_l0: float
    threshold: float


@dataclass(frozen=True)
class GapReport:
    gaps: Tuple[float, ...]
    distinct: Tuple[float, ...]
    min_gap: float
    predicted_min_gap: float
    min_gap_scaled: float  # on the circle of length 2*pi
    lower_bound: float  # 1 / (2 q_l)

    @property
    def three_distance_holds(self) -> bool:
        return len(self.distinct) <= 3


@dataclass(frozen=True)
class BirkhoffCheck:
    birkhoff_avg: float
    deviation: float
    bound: float
    bound_satisfied: bool


def convergent_table(quotients: List[int]) -> Tuple[List[int], List[int]]:
    """p_l, q_l from the recurrence seeded with p_{-2}=0, q_{-2}=1, p_{-1}=1, q_{-1}=0."""
    p_prev2, q_prev2, p_prev1, q_prev1 = 0, 1, 1, 0
    ps, qs = [], []
    for a_l in quotients:
        p_l = a_l * p_prev1 + p_prev2
        q_l = a_l * q_prev1 + q_prev2
        ps.append(p_l)
        qs.append(q_l)
        p_prev2, q_prev2, p_prev1, q_prev1 = p_prev1, q_prev1, p_l, q_l
    return ps, qs


def _rational_quotients(spec: RationalSpec, depth: int) -> List[int]:
    num, den = spec.p, spec.q
    quotients = []
    while den != 0 and len(quotients) < depth:
        a_l, rem = divmod(num, den)
        quotients.append(a_l)
        num, den = den, rem
    return quotients


def _surd_floor(P: int, D: int, Q: int) -> int:
    """Exact floor of (P + sqrt(D)) / Q, D non-square."""
    if Q > 0:
        return floor_surd(P, 1, D, Q)
    return floor_surd(-P, -1, D, -Q)


def _surd_quotients(spec: SurdSpec, depth: int) -> List[int]:
    # (p + q sqrt(d)) / r  ->  (P + sqrt(D)) / Q with Q | D - P^2
    if spec.q > 0:
        P, D, Q = spec.p, spec.q * spec.q * spec.d, spec.r
    else:
        P, D, Q = -spec.p, spec.q * spec.q * spec.d, -spec.r
    if (D - P * P) % Q != 0:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    quotients = []
    for _ in range(depth):
        a_l = _surd_floor(P, D, Q)
        quotients.append(a_l)
        P = a_l * Q - P
        Q = (D - P * P) // Q
    return quotients


def _decimal_quotients(spec: DecimalSpec, depth: int) -> Tuple[List[int], bool]:
    """Quotients shared by both ends of the float's uncertainty interval."""
    a = spec.turns()
    eps = 4.0 * max(math.ulp(1.0), math.ulp(abs(spec.radians_value)) / (2.0 * math.pi))
    lo, hi = Fraction(a) - Fraction(eps), Fraction(a) + Fraction(eps)
    quotients: List[int] = []
    while len(quotients) < depth:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            return quotients, False
        quotients.append(a_lo)
        frac_lo, frac_hi = lo - a_lo, hi - a_hi
        if frac_lo == 0 or frac_hi == 0:
            return quotients, len(quotients) >= depth
        lo, hi = 1 / frac_hi, 1 / frac_lo
    return quotients, True


def cf_expand(spec: AngleSpec, depth: int, strict: bool = True) -> Convergents:
    """
    Expand a = alpha / (2*pi) to `depth` partial quotients (fewer when a
    rational terminates).

    Args:
        spec: Angle specification.
        depth: Number of partial quotients a_0 .. a_{depth-1}.
        strict: For decimal specs, raise PrecisionExhaustedError when the
                float cannot certify `depth` quotients; otherwise return the
                trusted prefix with trusted_depth set.

    Returns:
        Convergents table.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")

    trusted_depth = None
    if isinstance(spec, RationalSpec):
        quotients = _rational_quotients(spec, depth)
    elif isinstance(spec, SurdSpec):
        quotients = _surd_quotients(spec, depth)
    else:
        quotients, complete = _decimal_quotients(spec, depth)
        if not complete:
            trusted_depth = len(quotients)
            ps, qs = convergent_table(quotients)
            partial = Convergents(tuple(quotients), tuple(ps), tuple(qs), False, spec, trusted_depth)
            message = f"decimal angle certifies only {trusted_depth} of {depth} partial quotients"
            if strict:
                raise PrecisionExhaustedError(message, trusted_depth=trusted_depth, partial=partial)
            logger.warning(message)
            return partial

    ps, qs = convergent_table(quotients)
    return Convergents(tuple(quotients), tuple(ps), tuple(qs), spec.exact, spec, trusted_depth)


def l0_lhs(norm_T: float, abs_delta: float, q: int) -> float:
    """(1/q) * ((8 + pi/(2q)) |||T||| + 4|delta|)."""
    return ((8.0 + math.pi / (2.0 * q)) * norm_T + 4.0 * abs_delta) / q


def select_l0(norm_T: float, abs_delta: float, conv: Convergents) -> L0Selection:
    """Smallest index whose block-drift error falls strictly below |delta|/pi."""
    if abs_delta <= 0:
        raise BijectiveMapError("l0 selection needs a non-bijective map")
    if len(conv) == 0:
        raise ValueError("empty convergent table")
    threshold = abs_delta / math.pi
    for l, q_l in enumerate(conv.q):
        if q_l <= 0:
            continue
        lhs = l0_lhs(norm_T, abs_delta, q_l)
        if lhs < threshold:
            return L0Selection(l0=l, q_l0=q_l, lhs_at_l0=lhs, threshold=threshold)
    raise NotFoundWithinDepthError(
        f"no convergent up to q={conv.q[-1]} satisfies the l0 inequality; deepen the expansion"
    )


def three_gaps(conv: Convergents, l: int, strict: bool = True) -> GapReport:
    """
    Gap lengths of {k a mod 1 : 0 <= k < q_l} on the unit circle. More than
    three distinct gaps, or a gap below 1/(2 q_l), is logged and raises
    PreconditionViolatedError unless strict is off.
    """
    if isinstance(conv.spec, RationalSpec):
        raise RationalAngleError("three gaps needs an irrational rotation number")
    if not 1 <= l < len(conv):
        raise ValueError(f"l must satisfy 1 <= l < {len(conv)}")
    a = conv.spec.turns()
    q_l = conv.q[l]
    points = np.sort(np.mod(np.arange(q_l, dtype=float) * a, 1.0))
    gaps = np.diff(np.append(points, points[0] + 1.0))

    distinct: List[float] = []
    for gap in np.sort(gaps):
        if not distinct or gap - distinct[-1] > GAP_TOL:
            distinct.append(float(gap))

    min_gap = float(gaps.min())
    report = GapReport(
        gaps=tuple(float(g) for g in gaps),
        distinct=tuple(distinct),
        min_gap=min_gap,
        predicted_min_gap=abs(conv.q[l - 1] * a - conv.p[l - 1]),
        min_gap_scaled=2.0 * math.pi * min_gap,
        lower_bound=1.0 / (2.0 * q_l),
    )
    if not report.three_distance_holds or min_gap < report.lower_bound:
        message = (f"gap structure broken at l={l}: {len(distinct)} distinct gaps, "
                   f"min gap {min_gap:.6g} vs 1/(2 q_l) = {report.lower_bound:.6g}")
        logger.warning(message)
        if strict:
            raise PreconditionViolatedError(message)
    return report


def denjoy_koksma_check(
    f: Callable[[np.ndarray], np.ndarray],
    variation: float,
    mean: float,
    a: float,
    x: float,
    q_l: int,
) -> BirkhoffCheck:
    """
    Birkhoff average of a 2*pi-periodic f along x + 2*pi*k*a, k < q_l, against
    its mean; the deviation must stay within variation / q_l.
    """
    samples = np.asarray(f(x + 2.0 * math.pi * a * np.arange(q_l, dtype=float)), dtype=float)
    avg = float(samples.mean())
    deviation = abs(avg - mean)
    bound = variation / q_l
    return BirkhoffCheck(
        birkhoff_avg=avg,
        deviation=deviation,
        bound=bound,
        bound_satisfied=deviation <= bound + 1e-12,
    )
