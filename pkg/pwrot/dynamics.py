"""
Orbits, codings and periodic islands.

A binary word u = u_0 ... u_{n-1} fixes a composition of the two rotations;
its fixed point z_u is periodic for T exactly when the orbit of z_u follows
u. The ball of radius w(z_u) = min_k d(T^k z_u, D) around z_u is then an
island of bounded orbits.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from pwrot.config import get_config
from pwrot.core_map import (
    PiecewiseRotation,
    apply,
    apply_array,
    apply_n,
    apply_n_array,
    conjugate,
    delta,
    half_plane,
    side,
    triple_norm,
)
from pwrot.errors import (
    PreconditionViolatedError,
    ResonantLengthError,
    WeightExhaustedError,
)
from pwrot.models.angle import AngleSpec, RationalSpec, parse_angle_spec
from pwrot.utils.logger import get_logger
from pwrot.utils.parallel import ordered_map, resolve_threads, split_ranges

logger = get_logger(__name__)

Word = Union[str, Sequence[int]]
Region = Tuple[float, float, float, float]


@dataclass(frozen=True)
class OrbitTrace:
    points: Tuple[complex, ...]
    args: Tuple[float, ...]
    coding: Tuple[int, ...]
    boundary_fragile: Tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class PeriodicOrbit:
    word: str
    z_u: complex
    verified: bool
    weight: float

    @property
    def period(self) -> int:
        return len(self.word)


class PerturbationMode(str, Enum):
    ROTATE_LINE = "RotateLine"
    ROTATE_CENTERS = "RotateCenters"


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    mode: PerturbationMode = PerturbationMode.ROTATE_LINE

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")
        object.__setattr__(self, "mode", PerturbationMode(self.mode))


@dataclass(frozen=True)
class PerturbationResult:
    w_eps: float
    survives: bool
    new_point: complex
    measured_weight: Optional[float]
    T_eps: PiecewiseRotation


@dataclass(frozen=True)
class DriftCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class ContainmentReport:
    samples: int
    steps: int
    bound: float
    max_radius: float
    bounded: bool
    rotation_error: float
    rotation_ok: bool
    power_max_radius: float
    power_bounded: bool

    @property
    def passed(self) -> bool:
        return self.bounded and self.rotation_ok and self.power_bounded


@dataclass(frozen=True)
class LargeIsland:
    T: PiecewiseRotation
    orbit: PeriodicOrbit
    guaranteed_radius: float
    epsilon: float
    rho: float


@dataclass(frozen=True)
class RadialTrend:
    samples: int
    steps: int
    radius: float
    mean_drift: float
    expected_drift: float
    repulsive: bool


def _parse_word(word: Word) -> Tuple[int, ...]:
    letters = tuple(int(c) for c in word)
    if not letters or any(c not in (0, 1) for c in letters):
        raise ValueError(f"word must be a non-empty binary word, got {word!r}")
    return letters


def _word_text(letters: Iterable[int]) -> str:
    return "".join(str(c) for c in letters)


def orbit(T: PiecewiseRotation, z: complex, n: int) -> OrbitTrace:
    """z_0 = z, ..., z_n = T^n(z) with arguments, coding and fragility flags."""
    if n < 0:
        raise ValueError("n must be >= 0")
    eps = get_config().tolerances.boundary_eps
    points = [complex(z)]
    for _ in range(n):
        points.append(apply(T, points[-1]))
    return OrbitTrace(
        points=tuple(points),
        args=tuple(cmath.phase(p) for p in points),
        coding=tuple(int(half_plane(T, p)) for p in points),
        boundary_fragile=tuple(abs(side(T, p)) < eps for p in points),
    )


def block_drift(T: PiecewiseRotation, z: complex, q_l: int) -> DriftCheck:
    """
    |(|T^q z| - |z|)/q + delta/pi| against (1/q)((8 + pi/(2q)) |||T||| + 4|delta|),
    for |z| > q |||T||| (2q/pi + 1).
    """
    if q_l < 1:
        raise ValueError("q_l must be >= 1")
    norm = triple_norm(T)
    threshold = q_l * norm * (2.0 * q_l / math.pi + 1.0)
    if abs(z) <= threshold:
        raise PreconditionViolatedError(f"|z| = {abs(z):.6g} must exceed {threshold:.6g}")
    d = delta(T)
    lhs = abs((abs(apply_n(T, z, q_l)) - abs(z)) / q_l + d / math.pi)
    rhs = ((8.0 + math.pi / (2.0 * q_l)) * norm + 4.0 * abs(d)) / q_l
    return DriftCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def _resonance_check(T: PiecewiseRotation, n: int) -> complex:
    denominator = 1.0 - cmath.exp(1j * n * T.alpha)
    spec = T.alpha_spec
    exact_resonance = isinstance(spec, RationalSpec) and (n * spec.p) % spec.q == 0
    if exact_resonance or abs(denominator) < get_config().tolerances.resonance:
        raise ResonantLengthError(f"exp(i n alpha) = 1 for word length n = {n}")
    return denominator


def word_translation(T: PiecewiseRotation, word: Word) -> complex:
    """
    Constant term of r_{u_{n-1}} o ... o r_{u_0}(z) = e^{i n alpha} z + c:
    c = sum_k e^{i(n-k-1) alpha} (1 - e^{i alpha}) C_{u_k}.
    """
    letters = _parse_word(word)
    n = len(letters)
    centers = np.array([T.C1 if c else T.C0 for c in letters])
    weights = np.exp(1j * T.alpha * (n - 1 - np.arange(n)))
    return complex((1.0 - T.rotation) * np.sum(weights * centers))


def almost_periodic_point(T: PiecewiseRotation, word: Word) -> complex:
    """Fixed point z_u of the word composition."""
    letters = _parse_word(word)
    denominator = _resonance_check(T, len(letters))
    return word_translation(T, letters) / denominator


def verify_periodic(T: PiecewiseRotation, word: Word) -> Optional[PeriodicOrbit]:
    """z_u as a verified periodic orbit with its weight, or None if the orbit leaves the word."""
    letters = _parse_word(word)
    z_u = almost_periodic_point(T, letters)
    tol = get_config().tolerances.periodic * max(1.0, abs(z_u))

    z = z_u
    weight = math.inf
    for letter in letters:
        if int(half_plane(T, z)) != letter:
            return None
        weight = min(weight, abs(side(T, z)))
        z = apply(T, z)
    if abs(z - z_u) > tol:
        return None
    return PeriodicOrbit(word=_word_text(letters), z_u=z_u, verified=True, weight=weight)


def enumerate_words(n_max: int) -> List[str]:
    """Binary Lyndon words of length 1..n_max (primitive words up to rotation), by length."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    words: List[str] = []
    w = [-1]
    while w:
        w[-1] += 1
        words.append(_word_text(w))
        m = len(w)
        while len(w) < n_max:
            w.append(w[len(w) - m])
        while w and w[-1] == 1:
            w.pop()
    return sorted(words, key=lambda word: (len(word), word))


def _minimal_rotation(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word)))


def _grid(region: Region, grid_step: float) -> Tuple[np.ndarray, np.ndarray]:
    x0, y0, x1, y1 = region
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"region must be a non-empty rectangle, got {region}")
    if grid_step <= 0:
        raise ValueError("grid_step must be > 0")
    xs = x0 + grid_step * np.arange(int(math.floor((x1 - x0) / grid_step)) + 1)
    ys = y0 + grid_step * np.arange(int(math.floor((y1 - y0) / grid_step)) + 1)
    return xs, ys


def _harvest_rows(T: PiecewiseRotation, xs: np.ndarray, ys: np.ndarray, max_period: int) -> set:
    """Canonical codings of period <= max_period seen on a block of grid rows."""
    settings = get_config()
    eps = settings.tolerances.boundary_eps
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    z = apply_n_array(T, z, max_period * settings.islands.transient_periods)

    length = 2 * max_period
    codes = np.empty((length, z.size), dtype=np.uint8)
    fragile = np.zeros(z.size, dtype=bool)
    for k in range(length):
        distance = side(T, z)
        fragile |= np.abs(distance) < eps
        codes[k] = np.where(distance > 0.0, 0, 1)
        z = apply_array(T, z)

    found = set()
    for column in np.flatnonzero(~fragile):
        coding = (codes[:, column] + ord("0")).tobytes().decode()
        for n in range(1, max_period + 1):
            if coding[n:] == coding[:-n]:
                found.add(_minimal_rotation(coding[:n]))
                break
    return found


def island_search(
    T: PiecewiseRotation,
    max_period: int,
    region: Region,
    grid_step: float,
    exhaustive: bool = False,
    threads: Optional[int] = None,
) -> List[PeriodicOrbit]:
    """
    Verified periodic orbits of period <= max_period.

    Candidate words come from the codings of grid orbits after a transient
    (or from all primitive words when exhaustive). Output is sorted by weight
    descending, then word and point, whatever the worker count.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if exhaustive:
        limit = get_config().islands.exhaustive_limit
        if max_period > limit:
            raise ValueError(f"exhaustive search is limited to max_period <= {limit}")
        candidates = set(enumerate_words(max_period))
    else:
        xs, ys = _grid(region, grid_step)
        chunks = split_ranges(len(ys), resolve_threads(threads))
        found = ordered_map(
            lambda rows: _harvest_rows(T, xs, ys[rows.start:rows.stop], max_period), chunks, threads
        )
        candidates = set().union(*found) if found else set()

    orbits = []
    for word in sorted(candidates):
        try:
            result = verify_periodic(T, word)
        except ResonantLengthError:
            logger.debug("Skipping resonant word %s", word)
            continue
        if result is not None:
            orbits.append(result)
    orbits.sort(key=lambda o: (-o.weight, o.word, o.z_u.real, o.z_u.imag))
    logger.info("Island search: %s candidate words, %s verified", len(candidates), len(orbits))
    return orbits


def perturbed_map(T: PiecewiseRotation, spec: PerturbationSpec) -> PiecewiseRotation:
    if spec.mode is PerturbationMode.ROTATE_LINE:
        return replace(T, gamma=T.gamma + spec.epsilon)
    rot = cmath.exp(1j * spec.epsilon)
    return replace(T, C0=rot * T.C0, C1=rot * T.C1)


def perturb_and_check(T: PiecewiseRotation, spec: PerturbationSpec, orbit_u: PeriodicOrbit) -> PerturbationResult:
    """
    Guaranteed weight w_eps = w - 2(|z_u| + n|||T|||)|sin(eps/2)| after
    rotating D (or the centres) by eps, checked on the perturbed map.
    """
    if not orbit_u.verified:
        raise PreconditionViolatedError("perturbation needs a verified periodic orbit")
    n = orbit_u.period
    w_eps = orbit_u.weight - 2.0 * (abs(orbit_u.z_u) + n * triple_norm(T)) * abs(math.sin(spec.epsilon / 2.0))
    if w_eps <= 0.0:
        raise WeightExhaustedError(f"perturbation too large: w_eps = {w_eps:.6g}", w_eps=w_eps)

    T_eps = perturbed_map(T, spec)
    if spec.mode is PerturbationMode.ROTATE_LINE:
        new_point = orbit_u.z_u
    else:
        new_point = cmath.exp(1j * spec.epsilon) * orbit_u.z_u

    checked = verify_periodic(T_eps, orbit_u.word)
    tol = get_config().tolerances.periodic * max(1.0, abs(new_point))
    survives = (
        checked is not None
        and abs(checked.z_u - new_point) <= tol
        and checked.weight >= w_eps - tol
    )
    return PerturbationResult(
        w_eps=w_eps,
        survives=survives,
        new_point=new_point,
        measured_weight=checked.weight if checked else None,
        T_eps=T_eps,
    )


def island_containment_check(
    T: PiecewiseRotation,
    orbit_u: PeriodicOrbit,
    samples: int = 100,
    steps: int = 10_000,
    seed: int = 0,
) -> ContainmentReport:
    """
    Sample the open ball B(z_u, w): every orbit stays below n|||T||| + |z_u| + w,
    T^n acts there as the rotation by n*alpha about z_u, and the T^n orbits
    are bounded.
    """
    if not orbit_u.verified or orbit_u.weight <= 0.0:
        raise PreconditionViolatedError("containment check needs a verified island of positive weight")
    n = orbit_u.period
    z_u, w = orbit_u.z_u, orbit_u.weight
    rng = np.random.default_rng(seed)
    radius = 0.999 * w * np.sqrt(rng.uniform(0.0, 1.0, samples))
    z0 = z_u + radius * np.exp(2j * math.pi * rng.uniform(0.0, 1.0, samples))
    bound = n * triple_norm(T) + abs(z_u) + w

    expected = cmath.exp(1j * n * T.alpha) * (z0 - z_u) + z_u
    rotation_error = float(np.max(np.abs(apply_n_array(T, z0, n) - expected)))

    z = z0.copy()
    max_radius = float(np.max(np.abs(z)))
    power_max = max_radius
    for k in range(1, steps + 1):
        z = apply_array(T, z)
        current = float(np.max(np.abs(z)))
        max_radius = max(max_radius, current)
        if k % n == 0:
            power_max = max(power_max, current)

    return ContainmentReport(
        samples=samples,
        steps=steps,
        bound=bound,
        max_radius=max_radius,
        bounded=max_radius < bound,
        rotation_error=rotation_error,
        rotation_ok=rotation_error < 1e-9,
        power_max_radius=power_max,
        power_bounded=power_max < bound,
    )


def large_island_map(alpha: Union[AngleSpec, float], target_radius: float) -> LargeIsland:
    """
    Non-bijective map whose fixed-point island has radius target_radius.

    Starts from the bijective map with centres -1, 1 and gamma = pi/2 - alpha/2,
    where C0 is a fixed point of weight sin(gamma); rotates D by eps so that the
    guaranteed weight halves, then scales everything by rho.
    """
    if target_radius <= 0:
        raise ValueError("target_radius must be > 0")
    spec = parse_angle_spec(alpha)
    alpha_rad = spec.radians()
    if not 0.0 < alpha_rad < math.pi:
        raise PreconditionViolatedError("large island construction needs 0 < alpha < pi")

    base = PiecewiseRotation.from_spec(spec, -1.0 + 0j, 1.0 + 0j, math.pi / 2.0 - alpha_rad / 2.0)
    fixed = verify_periodic(base, "0")
    norm = triple_norm(base)
    epsilon = 2.0 * math.asin(fixed.weight / (4.0 * (abs(fixed.z_u) + norm)))
    perturbed = perturb_and_check(base, PerturbationSpec(epsilon=epsilon), fixed)

    rho = target_radius / perturbed.w_eps
    T = conjugate(perturbed.T_eps, rho=rho)
    island = verify_periodic(T, "0")
    logger.info("Large island: eps=%.6g rho=%.6g delta=%.6g weight=%.6g",
                epsilon, rho, delta(T), island.weight if island else float("nan"))
    return LargeIsland(T=T, orbit=island, guaranteed_radius=target_radius, epsilon=epsilon, rho=rho)


def radial_trend(T: PiecewiseRotation, samples: int, radius: float, steps: int) -> RadialTrend:
    """Mean radial drift per step of orbits started on the circle of the given radius."""
    if samples < 1 or steps < 1:
        raise ValueError("samples and steps must be >= 1")
    z0 = radius * np.exp(2j * math.pi * np.arange(samples) / samples)
    z = apply_n_array(T, z0, steps)
    mean_drift = float(np.mean(np.abs(z) - np.abs(z0)) / steps)
    return RadialTrend(
        samples=samples,
        steps=steps,
        radius=radius,
        mean_drift=mean_drift,
        expected_drift=-delta(T) / math.pi,
        repulsive=mean_drift > 0.0,
    )
