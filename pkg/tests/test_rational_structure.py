import cmath
import math

import numpy as np
import pytest

from pwrot.bounds import rational_bound
from pwrot.core_map import classify, mirror
from pwrot.errors import (
    InsideCoreError,
    PreconditionViolatedError,
    UnsupportedAngleError,
    WrongSignError,
)
from pwrot.models.angle import RationalSpec
from pwrot.rational_structure import (
    attract_certificate,
    classify_zone,
    delta_closed_form,
    escape_certificate,
    measure_strip_widths,
    modulus_floor,
    polygon,
    polygon_boundary,
    polygon_index,
    probe_translation,
    strip_widths,
    translation_codes,
    xbar_and_step,
    xbar_closed_form,
    zone_map,
)


@pytest.fixture
def escape_zones(escape_q6):
    return zone_map(escape_q6)


@pytest.fixture
def attract_zones(attract_q6):
    return zone_map(attract_q6)


@pytest.fixture
def rational_zones(rational_map):
    return zone_map(rational_map)


def far_points(zm, n, seed=0):
    rng = np.random.default_rng(seed)
    R = 2 * zm.big_q / math.sin(math.pi / zm.q)
    return rng.uniform(R, 2 * R, n) * np.exp(2j * math.pi * rng.uniform(0, 1, n))


def inside_polygon(vertices, points):
    """Points on the inner side of every edge of a counter-clockwise convex polygon."""
    vertices = np.asarray(vertices)
    edges = np.roll(vertices, -1) - vertices
    rel = np.asarray(points)[:, None] - vertices[None, :]
    cross = edges.real * rel.imag - edges.imag * rel.real
    return np.all(cross >= -1e-9, axis=1)


class TestZoneMap:
    def test_escape_hexagon_is_reflected(self, escape_zones):
        zm = escape_zones
        assert zm.flipped
        assert zm.T.alpha_spec == RationalSpec(p=5, q=6)
        assert zm.T.gamma == pytest.approx(math.pi / 2)
        assert zm.phi == pytest.approx(math.pi / 6)
        assert zm.v == pytest.approx(4.0)
        assert zm.w == pytest.approx(2 * math.sqrt(3))
        assert zm.big_q == pytest.approx(6.0)

    def test_attract_hexagon(self, attract_zones):
        assert not attract_zones.flipped
        assert attract_zones.phi == pytest.approx(-math.pi / 6)

    def test_frames_round_trip(self, escape_zones):
        z = 3.0 - 7.0j
        assert escape_zones.from_normalized(escape_zones.to_normalized(z)) == pytest.approx(z)
        assert abs(escape_zones.to_normalized(z)) == pytest.approx(abs(z))

    def test_odd_denominator(self, pentagon_map):
        with pytest.raises(UnsupportedAngleError):
            zone_map(pentagon_map)

    def test_zones(self, escape_zones):
        deep = classify_zone(escape_zones, 100 * cmath.exp(1j * (math.pi / 2 + math.pi / 6)))
        assert deep.cone == 0
        assert deep.in_E and not deep.in_G
        u1 = escape_zones.rays[1]
        strip = classify_zone(escape_zones, 100 * u1 + 1j * u1)
        assert strip.in_G and strip.ray == 1


class TestTranslations:
    @pytest.mark.parametrize("zones", ["escape_zones", "attract_zones"])
    def test_every_far_point_is_labelled(self, request, zones):
        zm = request.getfixturevalue(zones)
        codes = translation_codes(zm, far_points(zm, 2000))
        assert np.all(codes >= 0)

    def test_large_denominator_is_labelled(self, rational_zones):
        codes = translation_codes(rational_zones, far_points(rational_zones, 100_000, seed=5))
        assert np.all(codes >= 0)
        assert set(np.unique(codes)) <= {0, 1, 2}

    def test_single_point(self, escape_zones):
        z = far_points(escape_zones, 1, seed=3)[0]
        hit = probe_translation(escape_zones, complex(z))
        assert hit.label in ("VKminus", "WK", "VK")
        assert abs(hit.t) == pytest.approx(escape_zones.v if hit.label != "WK" else escape_zones.w)

    def test_inside_core(self, escape_zones):
        with pytest.raises(InsideCoreError):
            probe_translation(escape_zones, 1 + 1j)
        with pytest.raises(InsideCoreError):
            translation_codes(escape_zones, np.array([100.0 + 0j, 2.0 + 0j]))
        with pytest.raises(InsideCoreError):
            classify_zone(escape_zones, 0.5j)


class TestStrips:
    def test_offsets_are_ordered(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        assert widths.measured
        assert np.all(np.abs(widths.a) <= zm.big_q)
        assert np.all(np.abs(widths.b) <= zm.big_q)
        assert np.all(widths.a + widths.b >= 0)

    def test_zone_can_sit_off_the_ray(self, escape_zones):
        widths = strip_widths(escape_zones)
        assert widths.b.min() < 0

    def test_zone_widths_split_the_strip(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        in_cone, in_prev = widths.zone_widths(zm.big_q)
        assert np.all((in_cone >= 0) & (in_cone <= zm.big_q))
        assert np.all((in_prev >= 0) & (in_prev <= zm.big_q))
        assert np.allclose(in_cone + in_prev, widths.a + widths.b)
        a0, b0 = measure_strip_widths(zm, 0)
        assert a0 == pytest.approx(in_cone[0])
        assert b0 == pytest.approx(in_prev[0])

    def test_measuring_radius_inside_core(self, escape_zones):
        with pytest.raises(InsideCoreError):
            measure_strip_widths(escape_zones, 0, probe_radius=1.0)


class TestPolygons:
    def test_closed_form_angles(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        for x in (11.0, 20.0, 40.0):
            poly = polygon(zm, x, widths)
            assert len(poly.vertices) == 2 * zm.q
            assert poly.family == "P"
            assert np.allclose(delta_closed_form(zm, widths, x), poly.delta_angles, atol=1e-9)

    def test_angles_below_phi_past_xbar(self, escape_zones):
        zm = escape_zones
        xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
        assert xbar == pytest.approx(6 * math.sqrt(3))
        assert np.all(delta_closed_form(zm, strip_widths(zm), 1.01 * xbar) < zm.phi)

    def test_index_on_the_boundary(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        for x in (20.0, 40.0):
            boundary = polygon_boundary(polygon(zm, x, widths), zm)
            assert np.allclose(polygon_index(zm, widths, boundary), x, rtol=1e-9)

    def test_polygons_are_nested(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
        levels = [1.05 * xbar, 1.5 * xbar, 2.0 * xbar, 4.0 * xbar]
        for inner, outer in zip(levels[:-1], levels[1:]):
            points = polygon_boundary(polygon(zm, inner, widths), zm, per_segment=16)
            assert inside_polygon(polygon(zm, outer, widths).vertices, points).all()
            assert np.all(polygon_index(zm, widths, points) < outer)

    def test_boundary_clears_modulus_floor(self, escape_zones):
        zm = escape_zones
        widths = strip_widths(zm)
        for x in (12.0, 20.0, 40.0):
            points = polygon_boundary(polygon(zm, x, widths), zm, per_segment=16)
            assert np.all(np.abs(points) >= modulus_floor(zm, widths, x) - 1e-9)
            assert np.all(np.abs(points) <= math.hypot(x, zm.big_q) + 1e-9)

    def test_inside_core(self, escape_zones):
        with pytest.raises(InsideCoreError):
            polygon(escape_zones, 5.0)

    def test_step(self, escape_zones):
        zm = escape_zones
        xbar = xbar_closed_form(zm.norm, zm.q, zm.phi)
        step = xbar_and_step(zm, 1.01 * xbar)
        assert 0 < step.K_x <= zm.w * math.sin(zm.phi) + 1e-12
        with pytest.raises(PreconditionViolatedError):
            xbar_and_step(zm, xbar)

    def test_step_needs_negative_delta(self, attract_zones):
        with pytest.raises(WrongSignError):
            xbar_and_step(attract_zones, 100.0)

    def test_threshold_close_to_bound(self, rational_map):
        report = rational_bound(rational_map)
        radius = math.hypot(report.xbar, report.q * report.norm)
        assert 0.985 * report.M <= radius <= report.M


class TestCertificates:
    def test_escape(self, escape_q6, escape_zones):
        M = rational_bound(escape_q6).M
        report = escape_certificate(escape_zones, M, n_samples=36, horizon=80)
        assert report.passed
        assert report.offending == []
        assert report.K_x0 > 0
        assert report.final_max_radius > report.target_radius
        assert report.conjugacy == "rotation+reflection"

    def test_escape_below_bound(self, escape_q6, escape_zones):
        with pytest.raises(PreconditionViolatedError):
            escape_certificate(escape_zones, 1.0, n_samples=8, horizon=5)

    def test_escape_large_denominator(self, rational_map, rational_zones):
        M = rational_bound(rational_map).M
        report = escape_certificate(rational_zones, M, n_samples=24, horizon=4, raise_on_failure=False)
        assert report.offending == []
        assert report.passed
        assert report.min_gain >= report.K_x0 * (1 - 1e-9)

    def test_attract(self, attract_q6, attract_zones):
        M = rational_bound(attract_q6).M
        report = attract_certificate(attract_zones, M, n_samples=100, horizon=300, raise_on_failure=False)
        assert report.mode == "attract"
        assert report.start_radius == pytest.approx(2 * M)
        assert report.passed
        assert report.entry_block is not None
        assert report.max_rise <= report.rise_tolerance
        assert report.final_max_radius <= report.target_radius

    def test_attract_short_horizon(self, rational_map):
        S = mirror(rational_map)
        assert classify(S).kind == "Surjective"
        M = rational_bound(S).M
        report = attract_certificate(zone_map(S), M, n_samples=6, horizon=4, raise_on_failure=False)
        assert report.blocks_to_target is not None
        assert report.blocks_to_target > report.horizon
        assert report.entry_block is None
        assert report.max_rise <= report.rise_tolerance
        assert report.passed

    def test_wrong_signs(self, escape_zones, attract_zones):
        with pytest.raises(WrongSignError):
            escape_certificate(attract_zones, 100.0)
        with pytest.raises(WrongSignError):
            attract_certificate(escape_zones, 100.0)
