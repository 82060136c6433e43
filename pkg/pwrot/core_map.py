"""
Piecewise rotations of the plane.

T rotates by alpha about C0 on the open half-plane P0 = {Im(e^{-i gamma} z) > 0}
and about C1 on the closed half-plane P1. Maps are kept normalized: the
discontinuity line D = e^{i gamma} R passes through the origin.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from pwrot.config import get_config
from pwrot.errors import DegenerateMapError, PreconditionViolatedError
from pwrot.models.angle import AngleSpec, DecimalSpec
from pwrot.models.params import MapParameters
from pwrot.utils.logger import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi
AXIS_SNAP = 4e-15
AXIS_COS_SIN = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))

ArrayOrFloat = Union[float, np.ndarray]


class HalfPlane(IntEnum):
    P0 = 0
    P1 = 1


def reduce_angle(theta: float) -> float:
    """Reduce an angle into [0, 2*pi)."""
    value = math.fmod(theta, TWO_PI)
    if value < 0.0:
        value += TWO_PI
    if value >= TWO_PI:
        value = 0.0
    return value


@dataclass(frozen=True)
class PiecewiseRotation:
    """
    Normalized two-piece rotation.

    alpha and gamma are stored reduced to [0, 2*pi). alpha_spec keeps the exact
    form of alpha when one is known; continued fractions and the rational-angle
    machinery read it.
    """
    alpha: float
    C0: complex
    C1: complex
    gamma: float
    alpha_spec: Optional[AngleSpec] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c0, c1 = complex(self.C0), complex(self.C1)
        values = (float(self.alpha), float(self.gamma), c0.real, c0.imag, c1.real, c1.imag)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("map parameters must be finite")
        if c0 == c1:
            raise DegenerateMapError("C0 and C1 coincide")
        alpha = reduce_angle(float(self.alpha))
        if abs(math.sin(alpha / 2.0)) < 1e-15:
            raise DegenerateMapError("alpha is a multiple of 2*pi")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", reduce_angle(float(self.gamma)))
        object.__setattr__(self, "C0", c0)
        object.__setattr__(self, "C1", c1)

    @classmethod
    def from_spec(cls, alpha_spec: AngleSpec, C0: complex, C1: complex, gamma: float) -> "PiecewiseRotation":
        return cls(alpha=alpha_spec.radians(), C0=C0, C1=C1, gamma=gamma, alpha_spec=alpha_spec)

    @cached_property
    def rotation(self) -> complex:
        return cmath.exp(1j * self.alpha)

    @cached_property
    def line_direction(self) -> complex:
        return cmath.exp(1j * self.gamma)

    @cached_property
    def _cos_sin_gamma(self) -> Tuple[float, float]:
        # D along an axis: exact direction cosines keep points of D in P1
        quarter = round(self.gamma / (math.pi / 2.0))
        if abs(self.gamma - quarter * (math.pi / 2.0)) < AXIS_SNAP:
            return AXIS_COS_SIN[quarter % 4]
        return math.cos(self.gamma), math.sin(self.gamma)

    @property
    def beta(self) -> float:
        return cmath.phase(self.C1 - self.C0)

    @property
    def c0(self) -> float:
        return cmath.phase(self.C0)

    @property
    def c1(self) -> float:
        return cmath.phase(self.C1)

    @property
    def spec(self) -> AngleSpec:
        """Exact angle form if known, else the stored radians."""
        if self.alpha_spec is not None:
            return self.alpha_spec
        return DecimalSpec(radians_value=self.alpha)

    def centers(self) -> Tuple[complex, complex]:
        return self.C0, self.C1

    def to_dict(self) -> dict:
        return {
            "alpha": self.spec.to_json(),
            "C0": [self.C0.real, self.C0.imag],
            "C1": [self.C1.real, self.C1.imag],
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class Classification:
    delta: float
    kind: str  # Injective | Surjective | Bijective
    tolerance_used: float
    strip_width: float


def normalize(raw: MapParameters, vertical: bool = False) -> PiecewiseRotation:
    """
    Conjugate by f(z) = z - z0 so that D passes through 0; with vertical=True
    also rotate so that gamma = pi/2. Translation leaves delta unchanged.
    """
    z0 = raw.line_point
    T = PiecewiseRotation.from_spec(raw.alpha, raw.c0 - z0, raw.c1 - z0, raw.gamma.radians())
    if vertical:
        T = rotate_to_vertical(T)
    return T


def side(T: PiecewiseRotation, z):
    """Signed distance Im(e^{-i gamma} z) to D; positive on P0. Works on arrays."""
    cos_g, sin_g = T._cos_sin_gamma
    return z.imag * cos_g - z.real * sin_g


def half_plane(T: PiecewiseRotation, z: complex) -> HalfPlane:
    return HalfPlane.P0 if side(T, z) > 0.0 else HalfPlane.P1


def is_boundary_fragile(T: PiecewiseRotation, z: complex, eps: Optional[float] = None) -> bool:
    """Within tolerances.boundary_eps of D unless eps is given."""
    if eps is None:
        eps = get_config().tolerances.boundary_eps
    return abs(side(T, z)) < eps


def apply(T: PiecewiseRotation, z: complex) -> complex:
    center = T.C0 if side(T, z) > 0.0 else T.C1
    return T.rotation * (z - center) + center


def apply_n(T: PiecewiseRotation, z: complex, n: int) -> complex:
    if n < 0:
        raise ValueError("n must be >= 0")
    rot, c0, c1 = T.rotation, T.C0, T.C1
    cos_g, sin_g = T._cos_sin_gamma
    for _ in range(n):
        center = c0 if z.imag * cos_g - z.real * sin_g > 0.0 else c1
        z = rot * (z - center) + center
    return z


def apply_array(T: PiecewiseRotation, z: np.ndarray) -> np.ndarray:
    """Vectorised T on a complex array."""
    center = np.where(side(T, z) > 0.0, T.C0, T.C1)
    return T.rotation * (z - center) + center


def apply_n_array(T: PiecewiseRotation, z: np.ndarray, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    for _ in range(n):
        z = apply_array(T, z)
    return z


def delta(T: PiecewiseRotation) -> float:
    """Injectivity discriminant -2|C1-C0| sin(alpha/2) cos(gamma + alpha/2 - beta)."""
    return -2.0 * abs(T.C1 - T.C0) * math.sin(T.alpha / 2.0) * math.cos(T.gamma + T.alpha / 2.0 - T.beta)


def triple_norm(T: PiecewiseRotation) -> float:
    """sup | |T(z)| - |z| | = 2|sin(alpha/2)| max(|C0|, |C1|)."""
    return 2.0 * abs(math.sin(T.alpha / 2.0)) * max(abs(T.C0), abs(T.C1))


def bijectivity_tolerance(T: PiecewiseRotation, factor: Optional[float] = None) -> float:
    """factor * (1 + |C1 - C0|), factor from tolerances.bijectivity_factor by default."""
    if factor is None:
        factor = get_config().tolerances.bijectivity_factor
    return factor * (1.0 + abs(T.C1 - T.C0))


def image_gap_width(T: PiecewiseRotation) -> float:
    """Distance between the parallel lines r0(D) and r1(D)."""
    k0 = (1.0 - T.rotation) * T.C0
    k1 = (1.0 - T.rotation) * T.C1
    direction = cmath.exp(1j * (T.gamma + T.alpha))
    return abs(((k1 - k0) / direction).imag)


def classify(T: PiecewiseRotation, tolerance: Optional[float] = None) -> Classification:
    if tolerance is None:
        tolerance = bijectivity_tolerance(T)
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    d = delta(T)
    if abs(d) <= tolerance:
        kind = "Bijective"
    elif d < 0:
        kind = "Injective"
    else:
        kind = "Surjective"
    return Classification(delta=d, kind=kind, tolerance_used=tolerance, strip_width=image_gap_width(T))


def g_aux(T: PiecewiseRotation, x: ArrayOrFloat) -> ArrayOrFloat:
    """
    Leading term of |T(z)| - |z| for z = r e^{ix}, r large: the C0 branch on
    gamma < x < gamma + pi (mod 2*pi), the C1 branch elsewhere.
    """
    s = math.sin(T.alpha / 2.0)
    x_arr = np.asarray(x, dtype=float)
    phase = np.mod(x_arr - T.gamma, TWO_PI)
    on_p0 = (phase > 0.0) & (phase < math.pi)
    g0 = -2.0 * abs(T.C0) * s * np.sin(x_arr + T.alpha / 2.0 - T.c0)
    g1 = -2.0 * abs(T.C1) * s * np.sin(x_arr + T.alpha / 2.0 - T.c1)
    out = np.where(on_p0, g0, g1)
    if out.ndim == 0:
        return float(out)
    return out


def g_jumps(T: PiecewiseRotation) -> Tuple[float, float]:
    """Jump magnitudes of g at gamma and gamma + pi."""
    s = math.sin(T.alpha / 2.0)
    jumps = []
    for x in (T.gamma, T.gamma + math.pi):
        g0 = -2.0 * abs(T.C0) * s * math.sin(x + T.alpha / 2.0 - T.c0)
        g1 = -2.0 * abs(T.C1) * s * math.sin(x + T.alpha / 2.0 - T.c1)
        jumps.append(abs(g0 - g1))
    return jumps[0], jumps[1]


def g_total_variation(T: PiecewiseRotation) -> float:
    """
    Var(g) = 4|sin(alpha/2)|(|C0| + |C1|) + 4|sin(alpha/2)||C1 - C0||sin(gamma + alpha/2 - beta)|.

    The first term is the integral of |g'| (each half-period of |cos| integrates
    to 2), the second the two equal jumps.
    """
    s = abs(math.sin(T.alpha / 2.0))
    smooth = 4.0 * s * (abs(T.C0) + abs(T.C1))
    jumps = 4.0 * s * abs(T.C1 - T.C0) * abs(math.sin(T.gamma + T.alpha / 2.0 - T.beta))
    return smooth + jumps


def g_integral(T: PiecewiseRotation) -> float:
    """Integral of g over one period, -2*delta."""
    return -2.0 * delta(T)


def shift_origin(T: PiecewiseRotation, p: complex, tol: float = 1e-9) -> PiecewiseRotation:
    """Conjugate by z -> z - p for a point p on D; the result stays normalized."""
    if abs(side(T, p)) > tol * (1.0 + abs(p)):
        raise PreconditionViolatedError(f"origin shift {p} is not on the line D")
    return replace(T, C0=T.C0 - p, C1=T.C1 - p)


def conjugate(T: PiecewiseRotation, rho: float = 1.0, theta: float = 0.0, reflect: bool = False) -> PiecewiseRotation:
    """
    Exact parameters of f o T o f^{-1} for f(z) = rho e^{i theta} z, or
    rho e^{i theta} conj(z) when reflect is set. Injectivity is preserved:
    delta scales by rho in both cases.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    scale = rho * cmath.exp(1j * theta)
    if not reflect:
        return replace(T, C0=scale * T.C0, C1=scale * T.C1, gamma=T.gamma + theta)
    spec = T.alpha_spec.negated() if T.alpha_spec is not None else None
    return PiecewiseRotation(
        alpha=-T.alpha,
        C0=scale * T.C0.conjugate(),
        C1=scale * T.C1.conjugate(),
        gamma=theta - T.gamma + math.pi,
        alpha_spec=spec,
    )


def mirror(T: PiecewiseRotation, rho: float = 1.0, theta: float = 0.0) -> PiecewiseRotation:
    """
    Reflected parameter set (alpha -> -alpha, C_j -> rho e^{i theta} conj(C_j),
    gamma -> theta - gamma). Compared with conjugate(reflect=True) the half-plane
    labels are exchanged, so delta -> -rho * delta: an injective map becomes a
    surjective one with the same |delta| and rotation number denominator.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    scale = rho * cmath.exp(1j * theta)
    spec = T.alpha_spec.negated() if T.alpha_spec is not None else None
    return PiecewiseRotation(
        alpha=-T.alpha,
        C0=scale * T.C0.conjugate(),
        C1=scale * T.C1.conjugate(),
        gamma=theta - T.gamma,
        alpha_spec=spec,
    )


def rotate_to_vertical(T: PiecewiseRotation) -> PiecewiseRotation:
    """Rotation conjugacy making D the imaginary axis (gamma = pi/2)."""
    return conjugate(T, theta=math.pi / 2.0 - T.gamma)
