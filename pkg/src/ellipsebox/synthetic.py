"""Rasterised test targets: rotated rectangles, noisy variants, silhouettes."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .geometry import RotatedBox
from .mask import BinaryMask

FRAME = 127


def rectangle_polygon(center, length: float, width: float, angle: float) -> RotatedBox:
    """Rectangle with its ``length`` side along ``angle`` (radians, from +x)."""
    cx, cy = center
    u = np.array([math.cos(angle), math.sin(angle)])
    v = np.array([-u[1], u[0]])
    hl, hw = length / 2.0, width / 2.0
    c = np.array([cx, cy])
    return RotatedBox.from_array([c - hl * u - hw * v, c + hl * u - hw * v, c + hl * u + hw * v, c - hl * u + hw * v])


def raster_polygon(poly: RotatedBox, shape=(FRAME, FRAME)) -> BinaryMask:
    """Cells whose centers fall inside the convex polygon."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    pts = poly.as_array()
    inside = np.ones(shape, dtype=bool)
    area = sum(
        pts[i, 0] * pts[(i + 1) % 4, 1] - pts[(i + 1) % 4, 0] * pts[i, 1] for i in range(4)
    )
    sign = 1.0 if area > 0 else -1.0
    for i in range(4):
        (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % 4]
        cross = (x1 - x0) * (yy - y0) - (y1 - y0) * (xx - x0)
        inside &= sign * cross >= -1e-9
    return BinaryMask(inside)


def rotated_rectangle(length: float, width: float, angle: float, shape=(FRAME, FRAME), center=None):
    """Mask and generating polygon of a solid rotated rectangle."""
    if center is None:
        center = ((shape[1] - 1) / 2.0, (shape[0] - 1) / 2.0)
    poly = rectangle_polygon(center, length, width, angle)
    return raster_polygon(poly, shape), poly


def boundary_noise(mask: BinaryMask, fraction: float, rng: np.random.Generator) -> BinaryMask:
    """Flip a random ``fraction`` of the cells on either side of the boundary."""
    cells = mask.cells
    inner = cells & ~ndimage.binary_erosion(cells)
    outer = ndimage.binary_dilation(cells) & ~cells
    band = np.flatnonzero((inner | outer).ravel())
    k = int(round(fraction * band.size))
    flip = rng.choice(band, size=k, replace=False)
    out = cells.copy().ravel()
    out[flip] = ~out[flip]
    return BinaryMask(out.reshape(cells.shape))


def silhouette(shape=(FRAME, FRAME)) -> BinaryMask:
    """Upright figure with both arms stretched out sideways."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    cx = (w - 1) / 2.0
    torso = ((xx - cx) / 11.0) ** 2 + ((yy - 62.0) / 30.0) ** 2 <= 1.0
    head = (xx - cx) ** 2 + (yy - 22.0) ** 2 <= 9.0 ** 2
    arms = (np.abs(yy - 45.0) <= 2.5) & (np.abs(xx - cx) <= 50.0)
    legs = (yy >= 85) & (yy <= 118) & (
        (np.abs(xx - (cx - 6.0)) <= 3.0) | (np.abs(xx - (cx + 6.0)) <= 3.0)
    )
    return BinaryMask(torso | head | arms | legs)


def cross(size: int = 41, arm: int = 9, shape=(FRAME, FRAME)) -> BinaryMask:
    """Plus sign of arm thickness ``arm`` spanning ``size`` cells, centered."""
    h, w = shape
    cy, cx = h // 2, w // 2
    cells = np.zeros(shape, dtype=bool)
    half, t = size // 2, arm // 2
    cells[cy - half:cy + half + 1, cx - t:cx + t + 1] = True
    cells[cy - t:cy + t + 1, cx - half:cx + half + 1] = True
    return BinaryMask(cells)
