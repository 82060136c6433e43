"""
Certified limit-set radii.

irrational_bound: M = q_l0 |||T||| (2 q_l0 / pi + 1) with l0 from the
continued fraction of a. rational_bound: even q > 2,
M = q |||T||| (1/(2 tan|phi|) + 1/(2 tan(pi/q)) + 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from pwrot.core_map import PiecewiseRotation, classify, shift_origin, side, triple_norm
from pwrot.diophantine import Convergents, select_l0
from pwrot.errors import BijectiveMapError, RationalAngleError, UnsupportedAngleError
from pwrot.models.angle import RationalSpec
from pwrot.models.reports import BoundReport, OriginShiftRecord
from pwrot.rational_structure import reduced_phi, xbar_closed_form
from pwrot.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class OriginShift:
    p_point: complex
    T_shifted: PiecewiseRotation


def irrational_radius(norm_T: float, q_l0: int) -> float:
    return q_l0 * norm_T * (2.0 * q_l0 / math.pi + 1.0)


def rational_radius(norm_T: float, q: int, phi: float) -> float:
    return xbar_closed_form(norm_T, q, phi) + q * norm_T


def optimize_origin(T: PiecewiseRotation) -> OriginShift:
    """
    Point p of D minimizing max(|C0 - p|, |C1 - p|), and T conjugated by
    z -> z - p.

    With p = t e^{i gamma}, |C_j - p|^2 = (t - t_j)^2 + d_j^2; the minimax of
    the two parabolas sits at one vertex or at their crossing.
    """
    u = T.line_direction
    t0, t1 = (T.C0 * u.conjugate()).real, (T.C1 * u.conjugate()).real
    d0, d1 = side(T, T.C0), side(T, T.C1)

    def cost(t: float) -> float:
        return max((t - t0) ** 2 + d0 * d0, (t - t1) ** 2 + d1 * d1)

    candidates = []
    if t1 != t0:
        candidates.append((t1 * t1 + d1 * d1 - t0 * t0 - d0 * d0) / (2.0 * (t1 - t0)))
    candidates.extend([t0, t1])
    best = min(candidates, key=cost)

    p_point = best * u
    return OriginShift(p_point=p_point, T_shifted=shift_origin(T, p_point))


def irrational_bound(T: PiecewiseRotation, conv: Convergents, shift: bool = True) -> BoundReport:
    """
    Limit-set radius for an irrational rotation number.

    Args:
        T: Normalized map.
        conv: Continued fraction of a = alpha / (2*pi), deep enough for l0.
        shift: Also evaluate the bound after the optimal origin shift.

    Returns:
        BoundReport; M_certified is the smaller of M and M_shifted + |p|.
    """
    if isinstance(conv.spec, RationalSpec):
        raise RationalAngleError("irrational bound needs an irrational rotation number")
    cls = classify(T)
    if cls.kind == "Bijective":
        raise BijectiveMapError(f"delta = {cls.delta:.3e} is within the bijectivity tolerance")

    norm = triple_norm(T)
    abs_delta = abs(cls.delta)
    selection = select_l0(norm, abs_delta, conv)
    M = irrational_radius(norm, selection.q_l0)
    logger.debug("l0=%s q_l0=%s lhs=%.6f threshold=%.6f", selection.l0, selection.q_l0,
                 selection.lhs_at_l0, selection.threshold)

    record: Optional[OriginShiftRecord] = None
    M_certified = M
    if shift:
        shifted = optimize_origin(T)
        norm_shifted = triple_norm(shifted.T_shifted)
        selection_shifted = select_l0(norm_shifted, abs_delta, conv)
        M_shifted = irrational_radius(norm_shifted, selection_shifted.q_l0)
        record = OriginShiftRecord(
            p_point=(shifted.p_point.real, shifted.p_point.imag),
            norm_shifted=norm_shifted,
            l0_shifted=selection_shifted.l0,
            q_l0_shifted=selection_shifted.q_l0,
            M_shifted=M_shifted,
        )
        M_certified = min(M, M_shifted + abs(shifted.p_point))
        logger.info(
            "Origin shift p=%s: norm %.6f -> %.6f, l0 %s -> %s, M %.1f -> %.1f",
            shifted.p_point, norm, norm_shifted, selection.l0, selection_shifted.l0, M, M_shifted,
        )

    return BoundReport(
        delta=cls.delta,
        norm=norm,
        classification=cls.kind,
        case="Irrational",
        l0=selection.l0,
        q_l0=selection.q_l0,
        M=M,
        M_shifted=record.M_shifted if record else None,
        M_certified=M_certified,
        origin_shift=record,
    )


def rational_bound(T: PiecewiseRotation) -> BoundReport:
    """Limit-set radius for alpha = 2*pi*p/q with q even, q > 2."""
    spec = T.alpha_spec
    if not isinstance(spec, RationalSpec):
        raise UnsupportedAngleError("rational bound needs an exact rational angle")
    if spec.q % 2 != 0 or spec.q <= 2:
        raise UnsupportedAngleError(f"rational bound needs an even denominator q > 2, got q={spec.q}")
    cls = classify(T)
    if cls.kind == "Bijective":
        raise BijectiveMapError(f"delta = {cls.delta:.3e} is within the bijectivity tolerance")

    phi = reduced_phi(T)
    if abs(math.tan(phi)) < 1e-15:
        raise BijectiveMapError("phi vanishes, tan(|phi|) = 0")

    norm = triple_norm(T)
    return BoundReport(
        delta=cls.delta,
        norm=norm,
        classification=cls.kind,
        case="Rational",
        p=spec.p,
        q=spec.q,
        phi=phi,
        xbar=xbar_closed_form(norm, spec.q, phi),
        M=rational_radius(norm, spec.q, phi),
        M_certified=rational_radius(norm, spec.q, phi),
    )


def bound(T: PiecewiseRotation, conv: Optional[Convergents] = None, shift: bool = True) -> BoundReport:
    """Dispatch on the angle form: rational specs take the rational bound."""
    if isinstance(T.alpha_spec, RationalSpec):
        return rational_bound(T)
    if conv is None:
        raise ValueError("irrational bound needs a convergent table")
    return irrational_bound(T, conv, shift=shift)
