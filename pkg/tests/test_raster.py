import io
import math

import numpy as np
import pytest

from pwrot.core_map import apply
from pwrot.errors import WrongSignError
from pwrot.raster import (
    RasterGrid,
    default_escape_radius,
    pgm_bytes,
    pixel_centers,
    render_attr,
    render_born,
    write_pgm,
)

WINDOW = (-20.0, -20.0, 20.0, 20.0)
ESCAPE_M = 6 + 6 * math.sqrt(3)


def scalar_escape_step(T, z, iters, radius):
    for n in range(iters):
        if abs(z) > radius:
            return n
        z = apply(T, z)
    return iters


class TestPgm:
    def test_single_pixel(self):
        grid = RasterGrid(window=(0.0, 0.0, 1.0, 1.0), width=1, height=1, iters=1, data=np.array([[1]]))
        assert pgm_bytes(grid) == b"P5\n1 1\n255\n\xff"

    def test_scaling(self):
        grid = RasterGrid(window=(0.0, 0.0, 1.0, 1.0), width=2, height=2, iters=4, data=np.array([[0, 1], [2, 4]]))
        assert pgm_bytes(grid) == b"P5\n2 2\n255\n\x00\x3f\x7f\xff"

    def test_shape_is_checked(self):
        with pytest.raises(ValueError):
            RasterGrid(window=(0.0, 0.0, 1.0, 1.0), width=2, height=1, iters=1, data=np.zeros((2, 2)))

    def test_write_to_stream_and_path(self, tmp_path):
        grid = RasterGrid(window=(0.0, 0.0, 1.0, 1.0), width=1, height=1, iters=1, data=np.array([[0]]))
        stream = io.BytesIO()
        write_pgm(grid, stream)
        assert stream.getvalue() == b"P5\n1 1\n255\n\x00"
        target = tmp_path / "out.pgm"
        write_pgm(grid, target)
        assert target.read_bytes() == stream.getvalue()

    def test_unwritable_path(self, tmp_path):
        grid = RasterGrid(window=(0.0, 0.0, 1.0, 1.0), width=1, height=1, iters=1, data=np.array([[0]]))
        with pytest.raises(OSError, match="missing"):
            write_pgm(grid, tmp_path / "missing" / "out.pgm")


class TestBorn:
    def test_pixel_centres(self):
        centres = pixel_centers((0.0, 0.0, 4.0, 2.0), (4, 2), range(0, 2))
        assert centres[0, 0] == pytest.approx(0.5 + 1.5j)
        assert centres[1, 3] == pytest.approx(3.5 + 0.5j)

    def test_independent_of_worker_count(self, escape_q6):
        single = render_born(escape_q6, WINDOW, (16, 12), 60, 4 * ESCAPE_M, threads=1)
        several = render_born(escape_q6, WINDOW, (16, 12), 60, 4 * ESCAPE_M, threads=4)
        assert np.array_equal(single.data, several.data)
        assert pgm_bytes(single) == pgm_bytes(several)

    def test_matches_scalar_orbits(self, escape_q6):
        grid = render_born(escape_q6, WINDOW, (12, 12), 80, 4 * ESCAPE_M)
        centres = pixel_centers(WINDOW, (12, 12), range(12))
        expected = np.array([[scalar_escape_step(escape_q6, complex(z), 80, 4 * ESCAPE_M) for z in row]
                             for row in centres])
        assert np.mean(grid.data == expected) >= 0.99

    def test_more_iterations_only_extend(self, escape_q6):
        short = render_born(escape_q6, WINDOW, (10, 10), 20, 4 * ESCAPE_M)
        long = render_born(escape_q6, WINDOW, (10, 10), 40, 4 * ESCAPE_M)
        assert np.array_equal(np.minimum(long.data, 20), short.data)

    def test_island_centre_never_escapes(self, pentagon_map):
        grid = render_born(pentagon_map, (-1.5, -0.5, -0.5, 0.5), (1, 1), 200, 10.0)
        assert grid.data[0, 0] == 200

    def test_far_point_escapes(self, escape_q6):
        grid = render_born(escape_q6, (32.5, -0.5, 33.5, 0.5), (1, 1), 400, 4 * ESCAPE_M)
        assert grid.data[0, 0] < 400

    @pytest.mark.parametrize("window, iters", [((1.0, 0.0, 0.0, 1.0), 5), (WINDOW, 0)])
    def test_rejects_bad_input(self, escape_q6, window, iters):
        with pytest.raises(ValueError):
            render_born(escape_q6, window, (4, 4), iters, 10.0)


class TestAttr:
    def test_zero_steps_is_the_ball(self, attract_q6):
        grid = render_attr(attract_q6, 5.0, (-10.0, -10.0, 10.0, 10.0), (20, 20), 0)
        assert grid.iters == 16
        assert grid.data.max() == 16
        assert grid.data[10, 10] > 0
        assert grid.data[0, 0] == 0

    def test_needs_non_negative_delta(self, escape_q6):
        with pytest.raises(WrongSignError):
            render_attr(escape_q6, 5.0, WINDOW, (8, 8), 10)

    def test_finer_lattice_covers_coarser(self, attract_q6):
        window = (-18.0, -18.0, 18.0, 18.0)
        coarse = render_attr(attract_q6, ESCAPE_M, window, (24, 24), 30, seeds_per_side=1)
        fine = render_attr(attract_q6, ESCAPE_M, window, (24, 24), 30, seeds_per_side=2)
        assert np.all((coarse.data > 0) <= (fine.data > 0))

    def test_independent_of_worker_count(self, attract_q6):
        window = (-18.0, -18.0, 18.0, 18.0)
        single = render_attr(attract_q6, ESCAPE_M, window, (16, 16), 12, threads=1)
        several = render_attr(attract_q6, ESCAPE_M, window, (16, 16), 12, threads=3)
        assert np.array_equal(single.data, several.data)


class TestEscapeRadius:
    def test_certified_bound(self, attract_q6):
        assert default_escape_radius(attract_q6) == pytest.approx(ESCAPE_M)

    def test_fallback(self, pentagon_map):
        assert default_escape_radius(pentagon_map) == pytest.approx(10.0)
