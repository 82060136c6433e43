"""
Limit-set rasters.

born: per-pixel escape step of the orbit of the pixel centre.
attr: forward image T^n B(0, M) of a seed lattice, as hit-density buckets.
Rows are computed in ordered chunks so the bytes never depend on the
worker count.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Optional, Tuple, Union

import numpy as np

from pwrot.config import get_config
from pwrot.core_map import PiecewiseRotation, apply_array, apply_n_array, classify
from pwrot.errors import PwrotError, WrongSignError
from pwrot.utils.logger import get_logger
from pwrot.utils.parallel import ordered_map, resolve_threads, split_ranges

logger = get_logger(__name__)

Window = Tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """Row-major pixels, top-left pixel at (x0, y1); data has shape (height, width)."""
    window: Window
    width: int
    height: int
    iters: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("raster needs width, height >= 1")
        if self.data.shape != (self.height, self.width):
            raise ValueError(f"raster data shape {self.data.shape} != {(self.height, self.width)}")

    @property
    def pixel_size(self) -> Tuple[float, float]:
        x0, y0, x1, y1 = self.window
        return (x1 - x0) / self.width, (y1 - y0) / self.height


def _check_window(window: Window, resolution: Tuple[int, int]) -> None:
    x0, y0, x1, y1 = window
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"window must be a non-empty rectangle, got {window}")
    width, height = resolution
    if width < 1 or height < 1:
        raise ValueError("resolution must be at least 1x1")


def pixel_centers(window: Window, resolution: Tuple[int, int], rows: range) -> np.ndarray:
    x0, y0, x1, y1 = window
    width, height = resolution
    dx, dy = (x1 - x0) / width, (y1 - y0) / height
    xs = x0 + (np.arange(width) + 0.5) * dx
    ys = y1 - (np.arange(rows.start, rows.stop) + 0.5) * dy
    return xs[None, :] + 1j * ys[:, None]


def _born_rows(T: PiecewiseRotation, window, resolution, rows: range, iters: int, escape_radius: float) -> np.ndarray:
    z = pixel_centers(window, resolution, rows).ravel()
    steps = np.full(z.size, iters, dtype=np.int64)
    alive = np.ones(z.size, dtype=bool)
    for n in range(iters):
        escaped = alive & (np.abs(z) > escape_radius)
        steps[escaped] = n
        alive &= ~escaped
        if not alive.any():
            break
        z[alive] = apply_array(T, z[alive])
    return steps.reshape(len(rows), resolution[0])


def render_born(
    T: PiecewiseRotation,
    window: Window,
    resolution: Tuple[int, int],
    iters: int,
    escape_radius: float,
    threads: Optional[int] = None,
) -> RasterGrid:
    """First step n < iters with |T^n(z)| > escape_radius for every pixel centre, else iters."""
    _check_window(window, resolution)
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if escape_radius <= 0:
        raise ValueError("escape radius must be > 0")
    width, height = resolution
    chunks = split_ranges(height, resolve_threads(threads))
    parts = ordered_map(
        lambda rows: _born_rows(T, window, resolution, rows, iters, escape_radius), chunks, threads
    )
    return RasterGrid(window=window, width=width, height=height, iters=iters, data=np.vstack(parts))


def _seed_lattice(window: Window, resolution: Tuple[int, int], M: float, per_side: int):
    """Lattice of spacing (pixel size)/per_side, aligned with pixel corners, clipped to B(0, M)."""
    x0, y0, x1, y1 = window
    width, height = resolution
    hx, hy = (x1 - x0) / width / per_side, (y1 - y0) / height / per_side
    ix = np.arange(math.ceil((-M - x0) / hx), math.floor((M - x0) / hx) + 1)
    iy = np.arange(math.ceil((y1 - M) / hy), math.floor((y1 + M) / hy) + 1)
    return x0 + ix * hx, y1 - iy * hy


def _attr_rows(T, window, resolution, xs, ys, M, n_steps) -> np.ndarray:
    width, height = resolution
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    z = z[np.abs(z) <= M]
    z = apply_n_array(T, z, n_steps)

    x0, y0, x1, y1 = window
    col = np.floor((z.real - x0) / (x1 - x0) * width).astype(np.int64)
    row = np.floor((y1 - z.imag) / (y1 - y0) * height).astype(np.int64)
    inside = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    return np.bincount(row[inside] * width + col[inside], minlength=width * height)


def render_attr(
    T: PiecewiseRotation,
    M: float,
    window: Window,
    resolution: Tuple[int, int],
    n_steps: int,
    seeds_per_side: Optional[int] = None,
    threads: Optional[int] = None,
) -> RasterGrid:
    """
    Hit density of T^{n_steps} applied to a seed lattice of B(0, M).

    Pixel value is ceil(buckets * hits / max_hits) with iters = buckets, so
    empty pixels are 0 and every hit pixel is at least 1.
    """
    if classify(T).kind == "Injective":
        raise WrongSignError("attr rendering needs delta >= 0; use render_born for delta < 0")
    _check_window(window, resolution)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if M <= 0:
        raise ValueError("M must be > 0")

    settings = get_config().raster
    per_side = seeds_per_side or settings.seeds_per_side
    width, height = resolution
    x0, y0, x1, y1 = window
    pixel_area = (x1 - x0) * (y1 - y0) / (width * height)
    while per_side > 1 and math.pi * M * M / pixel_area * per_side ** 2 > settings.max_seeds:
        per_side -= 1
        logger.warning("Seed lattice capped at %s seeds per pixel side (max_seeds=%s)",
                       per_side, settings.max_seeds)

    xs, ys = _seed_lattice(window, resolution, M, per_side)
    chunks = split_ranges(len(ys), resolve_threads(threads))
    counts = ordered_map(lambda r: _attr_rows(T, window, resolution, xs, ys[r.start:r.stop], M, n_steps),
                         chunks, threads)
    hits = np.sum(np.stack(counts), axis=0) if counts else np.zeros(width * height, dtype=np.int64)

    buckets = settings.buckets
    peak = hits.max()
    data = np.zeros(width * height, dtype=np.int64)
    if peak > 0:
        data = (hits * buckets + peak - 1) // peak
    return RasterGrid(window=window, width=width, height=height, iters=buckets,
                      data=data.reshape(height, width))


def pgm_bytes(grid: RasterGrid) -> bytes:
    """Binary PGM: "P5\\n<w> <h>\\n255\\n" then floor(255 * value / iters) per pixel."""
    values = np.clip((255 * grid.data.astype(np.int64)) // grid.iters, 0, 255).astype(np.uint8)
    header = f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii")
    return header + values.tobytes()


def write_pgm(grid: RasterGrid, path: Union[str, Path, BinaryIO]) -> None:
    """Write a PGM to a path, a binary stream, or stdout for "-"."""
    payload = pgm_bytes(grid)
    if hasattr(path, "write"):
        path.write(payload)
        return
    if str(path) == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        return
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise OSError(f"cannot write PGM to {path}: {exc}") from exc


def default_escape_radius(T: PiecewiseRotation, depth: Optional[int] = None) -> float:
    """Certified bound M when the map qualifies, else the configured multiple of max |C_j|."""
    from pwrot.bounds import bound
    from pwrot.diophantine import cf_expand
    from pwrot.models.angle import RationalSpec

    try:
        conv = None
        if not isinstance(T.spec, RationalSpec):
            conv = cf_expand(T.spec, depth or get_config().diophantine.default_depth, strict=False)
        return bound(T, conv).M_certified
    except PwrotError as exc:
        factor = get_config().raster.escape_fallback_factor
        logger.info("No certified bound (%s); escape radius %.3g * max|C|", exc, factor)
        return factor * max(abs(T.C0), abs(T.C1))
