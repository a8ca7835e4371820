"""Deterministic raster rendering of channel stimuli.

Marks are rasterized analytically: per-pixel distance to the mark's
centerline (or exact overlap for squares) is turned into a coverage value,
then composited over a white background. No imaging library is involved,
so identical parameters always produce identical pixel buffers.

Geometry conventions:

* The canvas is square; math coordinates put x right and y up with the
  mark centered on the canvas center.
* A line-like mark is a constant arc-length curve: arc length
  ``L = length_pct * canvas_px``, central angle ``curvature_deg`` (0
  degenerates to a straight segment), chord direction rotated
  ``tilt_deg`` counter-clockwise from horizontal, chord midpoint at the
  canvas center. Strokes have round caps; ``length_pct = 0`` collapses to
  a stroke-width dot.
* A square mark is filled and axis-aligned with side
  ``canvas_px * sqrt(area_pct)``; ``area_pct = 0`` draws nothing.
* The centerline always fits inside the canvas for in-range magnitudes
  (every arc lies within L/2 of the canvas center); at extreme magnitudes
  the stroke band may be clipped by up to half a stroke at the edges.
* Color is HSL with hue fixed at 0: ``luminance_pct`` is HSL lightness
  and ``saturation_pct`` HSL saturation, so the controlled defaults give
  pure red.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass

import numpy as np

from .channels import Mark, RenderConfig, StimulusParams
from .errors import RenderError

__all__ = ["RasterImage", "render"]

# Central angles below this (radians) are rendered as straight segments;
# the sagitta at this angle is far below one pixel for any canvas size.
_STRAIGHT_EPS_RAD = 1e-7


@dataclass(frozen=True)
class RasterImage:
    """An 8-bit RGB raster; ``pixels`` is a (height, width, 3) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


def _mark_rgb(params: StimulusParams) -> tuple[float, float, float]:
    return colorsys.hls_to_rgb(params.hue_deg / 360.0, params.luminance_pct, params.saturation_pct)


def _pixel_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel-center coordinates in math space (x right, y up)."""
    centers = np.arange(n, dtype=np.float64) + 0.5
    x = np.broadcast_to(centers, (n, n))
    y = np.broadcast_to((n - centers)[:, None], (n, n))
    return x, y


def _segment_distance(x, y, cx, cy, half_len, theta_rad):
    ux, uy = math.cos(theta_rad), math.sin(theta_rad)
    rx, ry = x - cx, y - cy
    along = np.clip(rx * ux + ry * uy, -half_len, half_len)
    return np.hypot(rx - along * ux, ry - along * uy)


def _arc_distance(x, y, cx, cy, arc_len, phi_rad, theta_rad):
    """Distance to a circular arc of arc length `arc_len` and central angle
    `phi_rad`, chord midpoint at (cx, cy), chord rotated by `theta_rad`."""
    radius = arc_len / phi_rad
    ux, uy = math.cos(theta_rad), math.sin(theta_rad)
    vx, vy = -uy, ux  # arc bulges toward +v
    half = phi_rad / 2.0
    ox = cx - vx * radius * math.cos(half)
    oy = cy - vy * radius * math.cos(half)

    qx, qy = x - ox, y - oy
    a = qx * ux + qy * uy
    b = qx * vx + qy * vy
    on_arc = np.abs(np.arctan2(a, b)) <= half  # angle measured from +v axis
    radial = np.abs(np.hypot(a, b) - radius)

    ex = radius * math.sin(half)
    d_end = np.minimum(np.hypot(a - ex, b - radius * math.cos(half)),
                       np.hypot(a + ex, b - radius * math.cos(half)))
    return np.where(on_arc, radial, d_end)


def _line_coverage(params: StimulusParams, cfg: RenderConfig, x, y):
    n = cfg.canvas_px
    c = n / 2.0
    arc_len = params.length_pct * n
    if arc_len / 2.0 > c + 1e-9:
        raise RenderError(f"mark centerline of length {arc_len} exceeds canvas {n}")
    theta = math.radians(params.tilt_deg)
    phi = math.radians(params.curvature_deg)

    if arc_len <= 0.0:
        d = np.hypot(x - c, y - c)
    elif phi < _STRAIGHT_EPS_RAD:
        d = _segment_distance(x, y, c, c, arc_len / 2.0, theta)
    else:
        d = _arc_distance(x, y, c, c, arc_len, phi, theta)

    half_w = cfg.stroke_px / 2.0
    if cfg.antialias:
        return np.clip(0.5 + (half_w - d), 0.0, 1.0)
    return (d <= half_w).astype(np.float64)


def _square_coverage(params: StimulusParams, cfg: RenderConfig):
    n = cfg.canvas_px
    side = n * math.sqrt(params.area_pct)
    if side > n + 1e-9:
        raise RenderError(f"square side {side} exceeds canvas {n}")
    lo, hi = (n - side) / 2.0, (n + side) / 2.0
    edges = np.arange(n, dtype=np.float64)
    if cfg.antialias:
        # exact overlap of each unit pixel with the square, per axis
        cov_1d = np.clip(np.minimum(edges + 1.0, hi) - np.maximum(edges, lo), 0.0, 1.0)
    else:
        centers = edges + 0.5
        cov_1d = ((centers >= lo) & (centers <= hi)).astype(np.float64)
    return np.outer(cov_1d, cov_1d)


def render(params: StimulusParams, cfg: RenderConfig = RenderConfig()) -> RasterImage:
    """Rasterize one stimulus; bit-deterministic for identical inputs."""
    n = cfg.canvas_px
    if params.mark is Mark.SQUARE:
        coverage = _square_coverage(params, cfg)
    else:
        x, y = _pixel_grid(n)
        coverage = _line_coverage(params, cfg, x, y)

    rgb = np.array(_mark_rgb(params), dtype=np.float64)
    out = 255.0 * ((1.0 - coverage)[..., None] + coverage[..., None] * rgb)
    pixels = np.rint(out).astype(np.uint8)
    return RasterImage(width=n, height=n, pixels=pixels)
