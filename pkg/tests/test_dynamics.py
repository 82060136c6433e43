import cmath
import math

import numpy as np
import pytest

from pwrot.core_map import classify, triple_norm
from pwrot.diophantine import cf_expand
from pwrot.dynamics import (
    PerturbationMode,
    PerturbationSpec,
    almost_periodic_point,
    block_drift,
    enumerate_words,
    island_containment_check,
    island_search,
    large_island_map,
    orbit,
    perturb_and_check,
    radial_trend,
    verify_periodic,
    word_translation,
)
from pwrot.errors import PreconditionViolatedError, ResonantLengthError, WeightExhaustedError
from pwrot.models.angle import RationalSpec

PENTAGON_WEIGHT = math.sin(3 * math.pi / 10)
REGION = (-3.0, -3.0, 3.0, 3.0)


def compose(T, word, z):
    for letter in word:
        center = T.C1 if letter == "1" else T.C0
        z = cmath.exp(1j * T.alpha) * (z - center) + center
    return z


class TestOrbits:
    def test_coding_and_fragility(self, attract_q6):
        trace = orbit(attract_q6, -0.5 + 0j, 3)
        assert len(trace) == 4
        assert trace.coding[0] == 0
        assert trace.args[0] == pytest.approx(math.pi)
        assert orbit(attract_q6, 0j, 0).boundary_fragile == (True,)

    def test_negative_length(self, attract_q6):
        with pytest.raises(ValueError):
            orbit(attract_q6, 1j, -1)

    @pytest.mark.parametrize("l", [6, 7, 8])
    def test_block_drift_far_away(self, irrational_map, l):
        q_l = cf_expand(irrational_map.alpha_spec, 10).q[l]
        radius = 1.5 * q_l * triple_norm(irrational_map) * (2 * q_l / math.pi + 1)
        for theta in np.linspace(0.3, 6.0, 5):
            assert block_drift(irrational_map, radius * cmath.exp(1j * theta), q_l).holds

    def test_block_drift_inside_threshold(self, irrational_map):
        with pytest.raises(PreconditionViolatedError):
            block_drift(irrational_map, 10.0 + 0j, 99)


class TestPeriodicPoints:
    def test_pentagon_fixed_points(self, pentagon_map):
        zero = verify_periodic(pentagon_map, "0")
        one = verify_periodic(pentagon_map, "1")
        assert zero.z_u == pytest.approx(-1 + 0j)
        assert one.z_u == pytest.approx(1 + 0j)
        assert zero.weight == pytest.approx(PENTAGON_WEIGHT)
        assert one.weight == pytest.approx(PENTAGON_WEIGHT)
        assert zero.period == 1

    def test_resonant_length(self, pentagon_map):
        with pytest.raises(ResonantLengthError):
            almost_periodic_point(pentagon_map, "00101")

    @pytest.mark.parametrize("word", ["0", "01", "0110", "111010"])
    def test_translation_matches_composition(self, irrational_map, word):
        T = irrational_map
        z = 0.3 + 0.2j
        expected = compose(T, word, z)
        assert cmath.exp(1j * len(word) * T.alpha) * z + word_translation(T, word) == pytest.approx(expected)

    def test_fixed_point_of_composition(self, irrational_map):
        z_u = almost_periodic_point(irrational_map, "0110")
        assert compose(irrational_map, "0110", z_u) == pytest.approx(z_u)

    def test_bad_word(self, pentagon_map):
        with pytest.raises(ValueError):
            verify_periodic(pentagon_map, "012")

    def test_enumerate_words(self):
        assert enumerate_words(3) == ["0", "1", "01", "001", "011"]
        assert sum(1 for w in enumerate_words(5) if len(w) == 5) == 6


class TestIslandSearch:
    def test_pentagon_islands(self, pentagon_map):
        orbits = island_search(pentagon_map, 5, REGION, 0.25)
        words = {o.word: o for o in orbits}
        assert "0" in words and "1" in words
        assert words["0"].weight == pytest.approx(PENTAGON_WEIGHT)
        weights = [o.weight for o in orbits]
        assert weights == sorted(weights, reverse=True)
        assert all(o.verified for o in orbits)

    def test_independent_of_worker_count(self, pentagon_map):
        single = island_search(pentagon_map, 4, REGION, 0.25, threads=1)
        several = island_search(pentagon_map, 4, REGION, 0.25, threads=3)
        assert [(o.word, o.z_u) for o in single] == [(o.word, o.z_u) for o in several]

    def test_exhaustive_skips_resonant_words(self, pentagon_map):
        orbits = island_search(pentagon_map, 5, REGION, 1.0, exhaustive=True)
        assert {"0", "1"} <= {o.word for o in orbits}
        assert all(len(o.word) < 5 for o in orbits)

    def test_bad_region(self, pentagon_map):
        with pytest.raises(ValueError):
            island_search(pentagon_map, 3, (1.0, 0.0, 0.0, 1.0), 0.1)

    def test_containment(self, pentagon_map):
        island = verify_periodic(pentagon_map, "0")
        report = island_containment_check(pentagon_map, island, samples=50, steps=2000)
        assert report.passed
        assert report.max_radius < report.bound


class TestPerturbation:
    @pytest.mark.parametrize("mode, weight", [(PerturbationMode.ROTATE_LINE, 0.8374),
                                              (PerturbationMode.ROTATE_CENTERS, 0.778)])
    def test_island_survives(self, pentagon_map, mode, weight):
        island = verify_periodic(pentagon_map, "0")
        result = perturb_and_check(pentagon_map, PerturbationSpec(epsilon=0.05, mode=mode), island)
        assert result.w_eps == pytest.approx(0.700, abs=2e-3)
        assert result.survives
        assert result.measured_weight == pytest.approx(weight, abs=1e-3)

    def test_rotated_centres_move_the_point(self, pentagon_map):
        island = verify_periodic(pentagon_map, "0")
        result = perturb_and_check(pentagon_map, PerturbationSpec(epsilon=0.05, mode="RotateCenters"), island)
        assert result.new_point == pytest.approx(-cmath.exp(0.05j))

    def test_weight_exhausted(self, pentagon_map):
        island = verify_periodic(pentagon_map, "0")
        with pytest.raises(WeightExhaustedError) as info:
            perturb_and_check(pentagon_map, PerturbationSpec(epsilon=1.0), island)
        assert info.value.w_eps < 0

    def test_large_island(self):
        result = large_island_map(RationalSpec(p=1, q=5), 10.0)
        assert classify(result.T).kind != "Bijective"
        assert result.orbit is not None
        assert result.orbit.weight >= 10.0
        assert result.guaranteed_radius == 10.0


class TestRadialTrend:
    def test_escape_is_repulsive(self, escape_q6):
        trend = radial_trend(escape_q6, 200, 200.0, 120)
        assert trend.repulsive
        assert trend.expected_drift == pytest.approx(1 / math.pi)
        assert trend.mean_drift == pytest.approx(trend.expected_drift, abs=0.05)

    def test_attract_is_not(self, attract_q6):
        trend = radial_trend(attract_q6, 200, 200.0, 120)
        assert not trend.repulsive
        assert trend.mean_drift < 0
