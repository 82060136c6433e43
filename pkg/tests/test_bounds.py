import math

import numpy as np
import pytest

from pwrot.bounds import (
    bound,
    irrational_bound,
    irrational_radius,
    optimize_origin,
    rational_bound,
    rational_radius,
)
from pwrot.core_map import PiecewiseRotation, side, triple_norm
from pwrot.diophantine import cf_expand
from pwrot.dynamics import island_search, orbit
from pwrot.errors import BijectiveMapError, RationalAngleError, UnsupportedAngleError


@pytest.fixture
def irrational_conv(irrational_map):
    return cf_expand(irrational_map.alpha_spec, 12)


class TestIrrationalBound:
    def test_worked_example(self, irrational_map, irrational_conv):
        report = irrational_bound(irrational_map, irrational_conv, shift=False)
        assert report.case == "Irrational"
        assert report.classification == "Injective"
        assert report.l0 == 8
        assert report.q_l0 == 577
        assert 571100 <= report.M <= 571283
        assert report.M_certified == report.M
        assert report.origin_shift is None

    def test_origin_shift_improves_the_radius(self, irrational_map, irrational_conv):
        report = irrational_bound(irrational_map, irrational_conv)
        shift = report.origin_shift
        assert shift.p_point[0] == pytest.approx(0.0, abs=1e-12)
        assert shift.p_point[1] == pytest.approx(0.27518, abs=1e-4)
        assert shift.norm_shifted == pytest.approx(2.2496, abs=5e-3)
        assert report.M_shifted < report.M
        assert report.M_certified == pytest.approx(report.M_shifted + math.hypot(*shift.p_point))
        assert report.M_certified <= report.M

    def test_rational_spec_rejected(self, rational_map):
        with pytest.raises(RationalAngleError):
            irrational_bound(rational_map, cf_expand(rational_map.alpha_spec, 10))

    def test_bijective_rejected(self, bijective_irrational):
        with pytest.raises(BijectiveMapError):
            irrational_bound(bijective_irrational, cf_expand(bijective_irrational.alpha_spec, 12))


class TestRationalBound:
    def test_square_case(self, attract_q4):
        report = rational_bound(attract_q4)
        assert report.case == "Rational"
        assert report.q == 4
        assert report.M == pytest.approx(8 * math.sqrt(2))

    def test_hexagon_case(self, attract_q6):
        report = rational_bound(attract_q6)
        assert report.phi == pytest.approx(-math.pi / 6)
        assert report.xbar == pytest.approx(6 * math.sqrt(3))
        assert report.M == pytest.approx(6 + 6 * math.sqrt(3))
        assert report.M_certified == report.M

    def test_worked_example(self, rational_map):
        report = rational_bound(rational_map)
        assert report.q == 478
        assert report.p == 169
        assert report.M == pytest.approx(120968.0, rel=5e-4)

    def test_odd_denominator_unsupported(self, pentagon_map):
        with pytest.raises(UnsupportedAngleError):
            rational_bound(pentagon_map)

    def test_irrational_angle_unsupported(self, irrational_map):
        with pytest.raises(UnsupportedAngleError):
            rational_bound(irrational_map)

    def test_bijective_rejected(self, zero_delta_q4):
        with pytest.raises(BijectiveMapError):
            rational_bound(zero_delta_q4)


class TestDispatch:
    def test_rational_ignores_the_table(self, attract_q6):
        assert bound(attract_q6).M == pytest.approx(6 + 6 * math.sqrt(3))

    def test_irrational_needs_a_table(self, irrational_map, irrational_conv):
        with pytest.raises(ValueError):
            bound(irrational_map)
        assert bound(irrational_map, irrational_conv).l0 == 8

    def test_report_document(self, attract_q6):
        document = bound(attract_q6).to_dict()
        assert next(iter(document)) == "schema"
        assert document["schema"] == "pwrot/1"
        assert document["case"] == "Rational"


def test_optimal_origin_lies_on_the_line(irrational_map):
    shift = optimize_origin(irrational_map)
    assert abs(side(irrational_map, shift.p_point)) < 1e-12
    radius = max(abs(irrational_map.C0 - shift.p_point), abs(irrational_map.C1 - shift.p_point))
    assert radius <= max(abs(irrational_map.C0), abs(irrational_map.C1))
    assert triple_norm(shift.T_shifted) < triple_norm(irrational_map)


def test_origin_shift_never_increases_the_norm():
    rng = np.random.default_rng(21)
    for _ in range(1_000):
        C0, C1 = rng.uniform(-5, 5, 2) @ [1, 1j], rng.uniform(-5, 5, 2) @ [1, 1j]
        T = PiecewiseRotation(alpha=rng.uniform(0.1, 2 * math.pi - 0.1), C0=C0, C1=C1,
                              gamma=rng.uniform(0, 2 * math.pi))
        shift = optimize_origin(T)
        assert abs(side(T, shift.p_point)) <= 1e-9 * max(1.0, abs(shift.p_point))
        assert triple_norm(shift.T_shifted) <= triple_norm(T) * (1 + 1e-12)


class TestRadiusMonotonicity:
    def test_irrational_radius(self):
        assert irrational_radius(1.0, 3) < irrational_radius(1.0, 4) < irrational_radius(1.0, 50)
        assert irrational_radius(0.5, 7) < irrational_radius(1.0, 7) < irrational_radius(2.0, 7)

    def test_rational_radius(self):
        phi = math.pi / 7
        assert rational_radius(1.0, 4, phi) < rational_radius(1.0, 6, phi) < rational_radius(1.0, 478, phi)
        assert rational_radius(0.5, 6, phi) < rational_radius(1.0, 6, phi) < rational_radius(2.0, 6, phi)
        radii = [rational_radius(1.0, 6, value) for value in (0.05, 0.3, 0.8, 1.5)]
        assert radii == sorted(radii, reverse=True)
        assert rational_radius(1.0, 6, -0.3) == pytest.approx(rational_radius(1.0, 6, 0.3))


@pytest.mark.parametrize("max_period", [8, 12])
def test_no_periodic_orbit_leaves_the_bound(escape_q6, max_period):
    M = rational_bound(escape_q6).M
    orbits = island_search(escape_q6, max_period, (-1.0, -1.0, 1.0, 1.0), 1.0, exhaustive=True)
    for found in orbits:
        points = orbit(escape_q6, found.z_u, found.period).points
        assert max(abs(p) for p in points) <= M
