"""
Rational angles alpha = 2*pi*p/q, q even, q > 2.

Far from the origin T^q is a piecewise translation. Working in coordinates
where D is the imaginary axis and phi = beta - alpha/2 lies in (-pi/2, pi/2]
(delta < 0 iff phi > 0), the plane outside B(0, q|||T|||) splits into q
cones C_k between the rays u_k = exp(i(pi/2 + 2*pi*k/q)). Inside cone k the
translation is v_k; along ray k a strip carries v_{k-1}, w_k or v_k. The
widths of the w_k part are measured numerically and drive the escape
polygons P_x and the step K_x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from pwrot.config import get_config
from pwrot.core_map import (
    PiecewiseRotation,
    apply_n,
    apply_n_array,
    classify,
    conjugate,
    delta,
    rotate_to_vertical,
    triple_norm,
)
from pwrot.errors import (
    CertificateFailedError,
    InsideCoreError,
    NonConvergentError,
    PreconditionViolatedError,
    UnsupportedAngleError,
    WrongSignError,
)
from pwrot.models.angle import RationalSpec
from pwrot.models.reports import CertificateReport
from pwrot.utils.logger import get_logger
from pwrot.utils.parallel import ordered_map, resolve_threads, split_ranges

logger = get_logger(__name__)

LABELS = ("VKminus", "WK", "VK")
UNMATCHED = "Unmatched"


def reduced_phi(T: PiecewiseRotation) -> float:
    """beta - alpha/2 - gamma + pi/2 reduced mod pi into (-pi/2, pi/2]."""
    value = math.remainder(T.beta - T.alpha / 2.0 - T.gamma + math.pi / 2.0, math.pi)
    if value <= -math.pi / 2.0:
        value += math.pi
    return value


def xbar_closed_form(norm_T: float, q: int, phi: float) -> float:
    """Worst-case threshold q|||T||| (1/(2 tan|phi|) + 1/(2 tan(pi/q)))."""
    big_q = q * norm_T
    return big_q * (1.0 / (2.0 * math.tan(abs(phi))) + 1.0 / (2.0 * math.tan(math.pi / q)))


@dataclass(frozen=True, eq=False)
class RationalZoneMap:
    """
    Cone/strip data of a rational map in normalized coordinates.

    T is the conjugated map (gamma = pi/2, cos(phi) > 0). A point z of the
    caller's plane corresponds to to_normalized(z); moduli are preserved.
    """
    T: PiecewiseRotation
    p: int
    q: int
    theta: float
    flipped: bool
    norm: float
    big_q: float
    phi: float
    delta: float
    v: float
    w: float
    rays: np.ndarray = field(repr=False)
    apices: np.ndarray = field(repr=False)
    v_vecs: np.ndarray = field(repr=False)
    w_vecs: np.ndarray = field(repr=False)

    def eta(self, i: int) -> int:
        return 0 if i <= self.q // 2 else 1

    def to_normalized(self, z):
        z = np.exp(1j * self.theta) * np.asarray(z, dtype=np.complex128)
        if self.flipped:
            z = np.conj(z)
        return z if z.ndim else complex(z)

    def from_normalized(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.flipped:
            z = np.conj(z)
        z = np.exp(-1j * self.theta) * z
        return z if z.ndim else complex(z)

    def cone_of(self, z):
        """Index c with arg(z) in [pi/2 + 2*pi*c/q, pi/2 + 2*pi*(c+1)/q)."""
        turn = np.mod(np.angle(z) - math.pi / 2.0, 2.0 * math.pi) / (2.0 * math.pi / self.q)
        return np.floor(turn).astype(int) % self.q

    def nearest_ray(self, z):
        turn = np.mod(np.angle(z) - math.pi / 2.0, 2.0 * math.pi) / (2.0 * math.pi / self.q)
        return np.rint(turn).astype(int) % self.q


@dataclass(frozen=True)
class ZoneInfo:
    cone: int
    ray: int
    in_E: bool
    in_G: bool


@dataclass(frozen=True)
class Translation:
    t: complex
    label: str
    ray: int
    cone: int


@dataclass(frozen=True, eq=False)
class StripWidths:
    """
    Signed offsets of the w_k zone along ray k: the zone is h in [-b_k, a_k]
    on the line R u_k + h i u_k, h > 0 pointing into cone k. The zone may
    sit entirely on one side of the ray, so either offset can be negative.
    """
    a: np.ndarray
    b: np.ndarray
    measured: bool = True

    def zone_widths(self, big_q: float) -> Tuple[np.ndarray, np.ndarray]:
        """Parts of the w_k zone inside cone k and inside cone k-1, clamped to [0, big_q]."""
        in_cone = np.maximum(self.a, 0.0) - np.maximum(-self.b, 0.0)
        in_prev = np.minimum(self.a, 0.0) - np.minimum(-self.b, 0.0)
        return np.clip(in_cone, 0.0, big_q), np.clip(in_prev, 0.0, big_q)


@dataclass(frozen=True)
class EscapePolygon:
    x: float
    family: str  # 'P' for delta < 0, 'Q' for delta > 0
    vertices: Tuple[complex, ...]
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    delta_angles: Tuple[float, ...]


@dataclass(frozen=True)
class XbarStep:
    xbar: float
    K_x: float
    delta_angles: Tuple[float, ...]


def _rational_spec(T: PiecewiseRotation) -> RationalSpec:
    spec = T.alpha_spec
    if not isinstance(spec, RationalSpec):
        raise UnsupportedAngleError("rational structure needs an exact rational angle")
    if spec.q % 2 != 0 or spec.q <= 2:
        raise UnsupportedAngleError(f"rational structure needs an even denominator q > 2, got q={spec.q}")
    return spec


def _wrapped_phi(T: PiecewiseRotation) -> float:
    return math.remainder(T.beta - T.alpha / 2.0, 2.0 * math.pi)


def zone_map(T: PiecewiseRotation) -> RationalZoneMap:
    """Normalize T (gamma = pi/2, then z -> conj(z) if needed) and build the zone data."""
    _rational_spec(T)
    theta = math.pi / 2.0 - T.gamma
    Tn = rotate_to_vertical(T)
    flipped = math.cos(_wrapped_phi(Tn)) < 0.0
    if flipped:
        Tn = conjugate(Tn, reflect=True)
    spec = _rational_spec(Tn)
    phi = _wrapped_phi(Tn)
    q = spec.q

    norm = triple_norm(Tn)
    big_q = q * norm
    sin_half = math.sin(Tn.alpha / 2.0)
    v = 2.0 * sin_half * abs(Tn.C1 - Tn.C0) / math.sin(math.pi / q)
    w = v * math.cos(math.pi / q)

    k = np.arange(q)
    step = 2.0 * math.pi * k / q
    rays = np.exp(1j * (math.pi / 2.0 + step))
    apices = (big_q / math.sin(math.pi / q)) * np.exp(1j * (math.pi / 2.0 + math.pi / q + step))
    v_vecs = v * np.exp(1j * (phi + math.pi / q + step))
    w_vecs = w * np.exp(1j * (phi + step))

    return RationalZoneMap(
        T=Tn,
        p=spec.p,
        q=q,
        theta=theta,
        flipped=flipped,
        norm=norm,
        big_q=big_q,
        phi=phi,
        delta=delta(Tn),
        v=v,
        w=w,
        rays=rays,
        apices=apices,
        v_vecs=v_vecs,
        w_vecs=w_vecs,
    )


def _check_outside_core(zm: RationalZoneMap, z: complex) -> None:
    if abs(z) <= zm.big_q:
        raise InsideCoreError(f"|z| = {abs(z):.6g} is inside B(0, q|||T|||) = {zm.big_q:.6g}")


def classify_zone(zm: RationalZoneMap, z: complex) -> ZoneInfo:
    """Cone of z, and whether it lies in E (deep in the cone) or in the strip G of its nearest ray."""
    _check_outside_core(zm, z)
    cone = int(zm.cone_of(z))
    ray = int(zm.nearest_ray(z))
    h_low = (z * np.conj(zm.rays[cone])).imag
    h_high = -(z * np.conj(zm.rays[(cone + 1) % zm.q])).imag
    in_E = bool(h_low > zm.big_q and h_high > zm.big_q)
    h_ray = abs((z * np.conj(zm.rays[ray])).imag)
    return ZoneInfo(cone=cone, ray=ray, in_E=in_E, in_G=bool(h_ray <= zm.big_q))


def _label_codes(zm: RationalZoneMap, t: np.ndarray, ray: np.ndarray) -> np.ndarray:
    """0 = v_{k-1}, 1 = w_k, 2 = v_k, -1 = unmatched (k = ray)."""
    tol = get_config().tolerances.translation * max(1.0, zm.v)
    candidates = np.stack(
        [zm.v_vecs[(ray - 1) % zm.q], zm.w_vecs[ray], zm.v_vecs[ray]], axis=-1
    )
    distance = np.abs(candidates - t[..., None])
    best = np.argmin(distance, axis=-1)
    matched = np.take_along_axis(distance, best[..., None], axis=-1)[..., 0] <= tol
    return np.where(matched, best, -1)


def probe_translation(zm: RationalZoneMap, z: complex) -> Translation:
    """t = T^q(z) - z labelled against {v_{k-1}, w_k, v_k} for the nearest ray k."""
    _check_outside_core(zm, z)
    t = apply_n(zm.T, complex(z), zm.q) - z
    ray = int(zm.nearest_ray(z))
    code = int(_label_codes(zm, np.array([t]), np.array([ray]))[0])
    label = LABELS[code] if code >= 0 else UNMATCHED
    return Translation(t=t, label=label, ray=ray, cone=int(zm.cone_of(z)))


def translation_codes(zm: RationalZoneMap, z: np.ndarray) -> np.ndarray:
    """Vectorised probe_translation: 0 = v_{k-1}, 1 = w_k, 2 = v_k, -1 = unmatched."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z) <= zm.big_q):
        raise InsideCoreError(f"probes must lie outside B(0, q|||T|||) = {zm.big_q:.6g}")
    t = apply_n_array(zm.T, z, zm.q) - z
    return _label_codes(zm, t, zm.nearest_ray(z))


def _labels_on_segments(zm: RationalZoneMap, ks: np.ndarray, radius: float, h: np.ndarray) -> np.ndarray:
    u = zm.rays[ks]
    points = radius * u[:, None] + h * 1j * u[:, None]
    t = apply_n_array(zm.T, points, zm.q) - points
    return _label_codes(zm, t, np.broadcast_to(ks[:, None], points.shape))


def _bisect(zm, ks, radius, lo, hi, predicate, iterations) -> Tuple[np.ndarray, np.ndarray]:
    """Shrink [lo, hi] with predicate false at lo and true at hi."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        codes = _labels_on_segments(zm, ks, radius, mid[:, None])[:, 0]
        if np.any(codes < 0):
            bad = ks[codes < 0].tolist()
            raise NonConvergentError(f"unmatched translation while bisecting rays {bad}")
        inside = predicate(codes)
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    return lo, hi


def measure_all_strip_widths(zm: RationalZoneMap, probe_radius: Optional[float] = None,
                             rays: Optional[List[int]] = None) -> StripWidths:
    """
    Signed offsets of the w_k zone around each ray.

    Samples R u_k + h i u_k for h in [-q|||T|||, q|||T|||]; labels must run
    v_{k-1}, w_k, v_k in that order. a_k is where v_k starts, b_k minus
    where v_{k-1} ends. Both are signed.
    """
    settings = get_config().strips
    big_q = zm.big_q
    if probe_radius is None:
        probe_radius = settings.probe_factor * big_q / math.sin(math.pi / zm.q)
    if probe_radius <= big_q:
        raise InsideCoreError(f"probe radius {probe_radius:.6g} is inside B(0, q|||T|||)")

    ks = np.arange(zm.q) if rays is None else np.asarray(rays, dtype=int)
    h = np.linspace(-big_q, big_q, settings.sweep_steps + 1)
    codes = _labels_on_segments(zm, ks, probe_radius, h[None, :])

    unmatched = np.any(codes < 0, axis=1)
    unordered = np.any(np.diff(codes, axis=1) < 0, axis=1)
    if np.any(unmatched | unordered):
        bad = ks[unmatched | unordered].tolist()
        raise NonConvergentError(f"translation labels out of order along rays {bad}")

    step = h[1] - h[0]
    tol = settings.bisection_rel_tol * big_q
    iterations = max(1, math.ceil(math.log2(step / tol)))

    # lower edge: first sample whose label is no longer v_{k-1}
    left = codes > 0
    first = np.argmax(left, axis=1)
    h_lo = np.where(left[:, 0], -big_q, np.where(left.any(axis=1), 0.0, big_q))
    need = left.any(axis=1) & ~left[:, 0]
    if np.any(need):
        lo, hi = _bisect(zm, ks[need], probe_radius, h[first[need] - 1], h[first[need]],
                         lambda c: c > 0, iterations)
        h_lo[need] = hi

    # upper edge: last sample whose label is not yet v_k
    right = codes < 2
    last = right.shape[1] - 1 - np.argmax(right[:, ::-1], axis=1)
    h_hi = np.where(right[:, -1], big_q, np.where(right.any(axis=1), 0.0, -big_q))
    need = right.any(axis=1) & ~right[:, -1]
    if np.any(need):
        lo, hi = _bisect(zm, ks[need], probe_radius, h[last[need]], h[last[need] + 1],
                         lambda c: c == 2, iterations)
        h_hi[need] = lo

    a = h_hi
    b = -h_lo
    logger.debug("strip offsets at R=%.6g: a=%s b=%s", probe_radius, a, b)
    return StripWidths(a=a, b=b, measured=True)


def measure_strip_widths(zm: RationalZoneMap, k: int, probe_radius: Optional[float] = None) -> Tuple[float, float]:
    """Widths of the w_k zone inside cone k and inside cone k-1."""
    widths = measure_all_strip_widths(zm, probe_radius=probe_radius, rays=[k % zm.q])
    in_cone, in_prev = widths.zone_widths(zm.big_q)
    return float(in_cone[0]), float(in_prev[0])


def strip_widths(zm: RationalZoneMap, probe_radius: Optional[float] = None) -> StripWidths:
    """Measured widths, or the worst case a_k = q|||T|||, b_k = 0 when labels misbehave."""
    try:
        return measure_all_strip_widths(zm, probe_radius=probe_radius)
    except NonConvergentError as exc:
        logger.warning("Strip widths not measurable (%s); using worst-case widths", exc)
        return StripWidths(a=np.full(zm.q, zm.big_q), b=np.zeros(zm.q), measured=False)


def delta_closed_form(zm: RationalZoneMap, widths: StripWidths, x: float) -> np.ndarray:
    """
    tan(delta_k) = r sin(pi/q) / (2(x sin(pi/q) - s cos(pi/q)) - r cos(pi/q)),
    r = |a_k - b_{k+1}|, s = min(a_k, b_{k+1}).
    """
    b_next = np.roll(widths.b, -1)
    r = np.abs(widths.a - b_next)
    s = np.minimum(widths.a, b_next)
    sn, cs = math.sin(math.pi / zm.q), math.cos(math.pi / zm.q)
    return np.arctan2(r * sn, 2.0 * (x * sn - s * cs) - r * cs)


def polygon(zm: RationalZoneMap, x: float, widths: Optional[StripWidths] = None) -> EscapePolygon:
    """P_x (delta < 0) or Q_x (delta > 0): vertices A_k = (x + i a_k) u_k, B_k = (x - i b_{k+1}) u_{k+1}."""
    if x <= zm.big_q:
        raise InsideCoreError(f"polygon index {x:.6g} must exceed q|||T||| = {zm.big_q:.6g}")
    if widths is None:
        widths = strip_widths(zm)
    u = zm.rays
    u_next = np.roll(u, -1)
    b_next = np.roll(widths.b, -1)
    A = (x + 1j * widths.a) * u
    B = (x - 1j * b_next) * u_next

    # angle between each edge A_k B_k and the edge of the regular q-gon
    bisector = np.exp(1j * (math.pi / 2.0 + math.pi / zm.q + 2.0 * math.pi * np.arange(zm.q) / zm.q))
    rel = (B - A) / (1j * bisector)
    deltas = np.arctan2(np.abs(rel.imag), rel.real)

    vertices = np.empty(2 * zm.q, dtype=np.complex128)
    vertices[0::2] = A
    vertices[1::2] = B
    return EscapePolygon(
        x=x,
        family="P" if zm.delta < 0 else "Q",
        vertices=tuple(complex(v) for v in vertices),
        a=tuple(float(v) for v in widths.a),
        b=tuple(float(v) for v in widths.b),
        delta_angles=tuple(float(d) for d in deltas),
    )


def polygon_boundary(poly: EscapePolygon, zm: RationalZoneMap, per_segment: int = 8) -> np.ndarray:
    """Sample the closed curve A_0 B_0 A_1 B_1 ...; B_k A_{k+1} runs along ray k+1."""
    vertices = np.asarray(poly.vertices)
    t = np.linspace(0.0, 1.0, per_segment, endpoint=False)
    following = np.roll(vertices, -1)
    return (vertices[:, None] + t[None, :] * (following - vertices)[:, None]).reshape(-1)


def modulus_floor(zm: RationalZoneMap, widths: StripWidths, x: float) -> float:
    """Lower bound for |z| on the boundary of P_x: x cos(pi/q) + min(0, a_k, b_k) sin(pi/q)."""
    low = min(0.0, float(np.min(widths.a)), float(np.min(widths.b)))
    return x * math.cos(math.pi / zm.q) + low * math.sin(math.pi / zm.q)


def polygon_index(zm: RationalZoneMap, widths: StripWidths, z):
    """
    The largest x with z on the boundary of P_x.

    Only the pieces next to the cone of z are tried: the ray segments
    x u_k + [-b_k, a_k] i u_k, and the edges A_k B_k, whose supporting line
    through z gives a quadratic in x (frame of u_k, theta = 2 pi / q). A root
    counts when z falls between the edge ends. Points that match no piece
    fall back to max_k Re(z conj(u_k)).
    """
    z_arr = np.asarray(z, dtype=np.complex128)
    flat = z_arr.reshape(-1)
    q = zm.q
    ks = (zm.cone_of(flat)[:, None] + np.arange(-1, 3)[None, :]) % q
    local = flat[:, None] * np.conj(zm.rays[ks])
    s, h = local.real, local.imag
    a = widths.a[ks]
    b = widths.b[ks]
    b_next = widths.b[(ks + 1) % q]
    eps = get_config().tolerances.translation * max(1.0, zm.big_q)

    on_ray = (s > 0.0) & (h >= -b - eps) & (h <= a + eps)
    best = np.where(on_ray, s, -np.inf).max(axis=1)

    theta = 2.0 * math.pi / q
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    lin = (cos_t - 1.0) * (h - a) - s * sin_t - (b_next * cos_t + a)
    const = b_next * sin_t * (h - a) + (b_next * cos_t + a) * s
    disc = lin * lin - 4.0 * sin_t * const
    root = np.sqrt(np.maximum(disc, 0.0))
    for sign in (1.0, -1.0):
        x = (-lin + sign * root) / (2.0 * sin_t)
        dx = x * (cos_t - 1.0) + b_next * sin_t
        dy = x * sin_t - b_next * cos_t - a
        t = ((s - x) * dx + (h - a) * dy) / (dx * dx + dy * dy)
        valid = (disc >= 0.0) & (x > 0.0) & (t >= -1e-9) & (t <= 1.0 + 1e-9)
        best = np.maximum(best, np.where(valid, x, -np.inf).max(axis=1))

    fallback = (flat[:, None] * np.conj(zm.rays)[None, :]).real.max(axis=1)
    result = np.where(np.isfinite(best), best, fallback).reshape(z_arr.shape)
    if result.ndim == 0:
        return float(result)
    return result


def xbar_and_step(zm: RationalZoneMap, x: float, widths: Optional[StripWidths] = None) -> XbarStep:
    """x_bar and K_x = min_k min(v sin(phi - delta_k(x)), w sin(phi))."""
    if zm.phi <= 0.0:
        raise WrongSignError("x_bar and K_x are defined for delta < 0")
    xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
    if x <= xbar:
        raise PreconditionViolatedError(f"x = {x:.6g} must exceed x_bar = {xbar:.6g}")
    if widths is None:
        widths = strip_widths(zm)
    deltas = np.asarray(polygon(zm, x, widths).delta_angles)
    K_x = float(np.min(np.minimum(zm.v * np.sin(zm.phi - deltas), zm.w * math.sin(zm.phi))))
    if K_x <= 0.0:
        raise PreconditionViolatedError(f"edge tilt reaches phi at x = {x:.6g}; no positive step")
    return XbarStep(xbar=xbar, K_x=K_x, delta_angles=tuple(float(d) for d in deltas))


def _conjugacy_note(zm: RationalZoneMap) -> str:
    return "rotation+reflection" if zm.flipped else "rotation"


def _escape_chunk(zm, widths, samples, target, horizon):
    z = samples.copy()
    x = polygon_index(zm, widths, z)
    min_gain = np.full(z.shape, np.inf)
    blocks = np.zeros(z.shape, dtype=int)
    active = np.abs(z) <= target
    for _ in range(horizon):
        if not active.any():
            break
        moved = apply_n_array(zm.T, z[active], zm.q)
        x_new = polygon_index(zm, widths, moved)
        min_gain[active] = np.minimum(min_gain[active], x_new - x[active])
        z[active] = moved
        x[active] = x_new
        blocks[active] += 1
        active &= np.abs(z) <= target
    return min_gain, blocks, np.abs(z)


def escape_certificate(
    zm: RationalZoneMap,
    M: float,
    n_samples: Optional[int] = None,
    horizon: Optional[int] = None,
    threads: Optional[int] = None,
    raise_on_failure: bool = True,
) -> CertificateReport:
    """
    Iterate samples on the circle of radius start_factor * M in q-blocks.
    Each block must raise the polygon index by at least K_{x0}; every final
    radius must clear the modulus floor of P_{x0 + n K_{x0}}, and samples must reach
    target_factor * M whenever the horizon covers the guaranteed number of
    blocks.
    """
    settings = get_config().certificates
    n_samples = n_samples or settings.samples
    horizon = horizon if horizon is not None else settings.horizon
    if classify(zm.T).kind != "Injective" or zm.phi <= 0.0:
        raise WrongSignError("escape certificate needs delta < 0")
    xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
    if M < (xbar + zm.big_q) * (1.0 - 1e-12):
        raise PreconditionViolatedError(f"M = {M:.6g} is below the rational bound {xbar + zm.big_q:.6g}")

    widths = strip_widths(zm)
    start = settings.start_factor * M
    target = settings.target_factor * M
    angles = 2.0 * math.pi * np.arange(n_samples) / n_samples
    samples = start * np.exp(1j * angles)
    x0 = polygon_index(zm, widths, samples)
    K = xbar_and_step(zm, float(np.min(x0)), widths).K_x
    cos_q = math.cos(math.pi / zm.q)
    # floor(x) = x cos(pi/q) + offset, with offset <= 0
    offset = modulus_floor(zm, widths, 0.0)
    needed = np.ceil(np.maximum((target - offset) / cos_q - x0, 0.0) / K).astype(int)

    chunks = split_ranges(n_samples, resolve_threads(threads))
    results = ordered_map(
        lambda r: _escape_chunk(zm, widths, samples[r.start:r.stop], target, horizon),
        chunks,
        threads,
    )
    min_gain = np.concatenate([r[0] for r in results])
    blocks = np.concatenate([r[1] for r in results])
    radii = np.concatenate([r[2] for r in results])

    tol = 1e-9 * np.maximum(1.0, x0 + blocks * K)
    gain_ok = min_gain >= K - tol
    radius_ok = radii >= (x0 + blocks * K) * cos_q + offset - tol
    reached_ok = (radii > target) | (horizon < needed)
    ok = gain_ok & radius_ok & reached_ok
    offending = np.flatnonzero(~ok).tolist()
    worst = int(np.argmin(min_gain))
    logger.info("Escape certificate: %s samples, K_x0=%.6g, min gain %.6g, %s offending",
                n_samples, K, float(min_gain[worst]), len(offending))

    report = CertificateReport(
        mode="escape",
        passed=not offending,
        samples=n_samples,
        horizon=horizon,
        blocks_used=int(blocks.max()) if blocks.size else 0,
        min_gain=float(min_gain[worst]),
        worst_sample=worst,
        K_x0=K,
        x0=float(np.min(x0)),
        M=M,
        start_radius=start,
        target_radius=target,
        blocks_to_target=int(needed.max()),
        final_max_radius=float(radii.max()),
        offending=offending,
        conjugacy=_conjugacy_note(zm),
    )
    if offending and raise_on_failure:
        raise CertificateFailedError(f"{len(offending)} escape samples failed", report=report, offending=offending)
    return report


def _attract_chunk(zm, samples, horizon):
    z = samples.copy()
    sup = np.empty(horizon + 1)
    sup[0] = np.abs(z).max()
    for n in range(1, horizon + 1):
        z = apply_n_array(zm.T, z, zm.q)
        sup[n] = np.abs(z).max()
    return sup, np.abs(z)


def _attract_allowance(zm: RationalZoneMap, widths: StripWidths, start: float, bound: float) -> Optional[int]:
    """
    Blocks the sup needs to fall from start into bound when the enclosing
    index drops by L = min_k min(v sin(|phi| - delta_k), w sin|phi|) per
    block, delta_k taken where Q_x just fits in the bound. None when no
    positive rate exists there.
    """
    x_target = math.sqrt(max(bound * bound - zm.big_q * zm.big_q, 0.0))
    if x_target <= zm.big_q:
        return None
    deltas = np.asarray(polygon(zm, x_target, widths).delta_angles)
    rate = float(np.min(np.minimum(zm.v * np.sin(abs(zm.phi) - deltas), zm.w * math.sin(abs(zm.phi)))))
    if rate <= 0.0:
        return None
    offset = modulus_floor(zm, widths, 0.0)
    x_start = (start - offset) / math.cos(math.pi / zm.q)
    return max(0, math.ceil((x_start - x_target) / rate))


def attract_certificate(
    zm: RationalZoneMap,
    M: float,
    n_samples: Optional[int] = None,
    horizon: Optional[int] = None,
    threads: Optional[int] = None,
    seed: int = 0,
    raise_on_failure: bool = True,
) -> CertificateReport:
    """
    Push samples of B(0, 2M) forward in q-blocks. The largest modulus must
    enter B(0, 1.01 * sqrt(x_bar^2 + (q|||T|||)^2)) and stay there. Entry is
    only demanded when the horizon covers the blocks the inward drift needs.

    The sup may never climb back above its running minimum by more than the
    modulus spread of the Q_x boundary that fits the bound: a shrinking
    enclosing polygon cannot move its farthest point out further than that.
    """
    settings = get_config().certificates
    n_samples = n_samples or settings.samples
    horizon = horizon if horizon is not None else settings.horizon
    if classify(zm.T).kind != "Surjective" or zm.phi >= 0.0:
        raise WrongSignError("attract certificate needs delta > 0")

    xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
    bound = math.hypot(xbar, zm.big_q) * 1.01
    start = 2.0 * M
    widths = strip_widths(zm)
    needed = _attract_allowance(zm, widths, start, bound)
    x_bound = math.sqrt(max(bound * bound - zm.big_q * zm.big_q, 0.0))
    rise_tolerance = bound - max(modulus_floor(zm, widths, x_bound), 0.0)

    rng = np.random.default_rng(seed)
    radius = start * np.sqrt(rng.uniform(0.0, 1.0, n_samples))
    samples = radius * np.exp(2j * math.pi * rng.uniform(0.0, 1.0, n_samples))

    chunks = split_ranges(n_samples, resolve_threads(threads))
    results = ordered_map(lambda r: _attract_chunk(zm, samples[r.start:r.stop], horizon), chunks, threads)
    sup = np.max(np.stack([r[0] for r in results]), axis=0)
    final = np.concatenate([r[1] for r in results])

    max_rise = float(np.max(sup - np.minimum.accumulate(sup)))
    monotone = max_rise <= rise_tolerance
    inside = sup <= bound
    entry = int(np.argmax(inside)) if inside.any() else None
    if entry is not None:
        settled = bool(inside[entry:].all())
    else:
        settled = needed is not None and horizon < needed
    passed = monotone and settled
    offending = np.flatnonzero(final > bound).tolist() if entry is not None else []
    logger.info("Attract certificate: bound %.6g, entry block %s (needs %s), final sup %.6g, max rise %.6g",
                bound, entry, needed, sup[-1], max_rise)

    report = CertificateReport(
        mode="attract",
        passed=passed,
        samples=n_samples,
        horizon=horizon,
        blocks_used=horizon,
        entry_block=entry,
        M=M,
        start_radius=start,
        target_radius=bound,
        blocks_to_target=needed,
        final_max_radius=float(sup[-1]),
        max_rise=max_rise,
        rise_tolerance=rise_tolerance,
        offending=offending,
        conjugacy=_conjugacy_note(zm),
    )
    if not passed and raise_on_failure:
        raise CertificateFailedError("attract certificate failed", report=report, offending=offending)
    return report
