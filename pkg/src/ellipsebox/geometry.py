"""Rotations about a point, axis-aligned boxes and rotated rectangles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ellipse import Ellipse
from .mask import Point2


class SingularTransformError(ValueError):
    pass


class EmptyIntersectionError(ValueError):
    pass


class AffineTransform(NamedTuple):
    """2x3 matrix ``[[r11, r12, t1], [r21, r22, t2]]`` applied as ``R p + t``."""

    r11: float
    r12: float
    t1: float
    r21: float
    r22: float
    t2: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self, dtype=float).reshape(2, 3)

    def determinant(self) -> float:
        return self.r11 * self.r22 - self.r12 * self.r21


IDENTITY = AffineTransform(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)


def rotation_about(center, theta: float) -> AffineTransform:
    """Rotation by ``theta`` about ``center`` that leaves ``center`` fixed.

    The linear part is ``[[cos, sin], [-sin, cos]]``: for x right / y up
    this turns clockwise, which on a y-down image reads counterclockwise.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    x0, y0 = float(center[0]), float(center[1])
    c, s = math.cos(theta), math.sin(theta)
    return AffineTransform(
        c, s, (1.0 - c) * x0 - s * y0,
        -s, c, s * x0 + (1.0 - c) * y0,
    )


def apply(t: AffineTransform, points) -> np.ndarray:
    """Map an ``(N, 2)`` array (or a single point) through ``t``."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    out = np.column_stack([
        t.r11 * x + t.r12 * y + t.t1,
        t.r21 * x + t.r22 * y + t.t2,
    ])
    return out[0] if single else out


def inverse(t: AffineTransform) -> AffineTransform:
    det = t.determinant()
    if abs(det) < 1e-14:
        raise SingularTransformError("linear part is singular")
    a, b, c = t.r22 / det, -t.r12 / det, -t.r21 / det
    d = t.r11 / det
    return AffineTransform(
        a, b, -(a * t.t1 + b * t.t2),
        c, d, -(c * t.t1 + d * t.t2),
    )


def compose(outer: AffineTransform, inner: AffineTransform) -> AffineTransform:
    """The transform applying ``inner`` first, then ``outer``."""
    m = np.vstack([outer.matrix, [0.0, 0.0, 1.0]]) @ np.vstack([inner.matrix, [0.0, 0.0, 1.0]])
    return AffineTransform(*map(float, m[:2].ravel()))


class AxisAlignedBox(NamedTuple):
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point2:
        return Point2(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def corners(self) -> np.ndarray:
        """Corners in the order (x_min, y_min), (x_max, y_min), (x_max, y_max), (x_min, y_max)."""
        return np.array([
            [self.x_min, self.y_min],
            [self.x_max, self.y_min],
            [self.x_max, self.y_max],
            [self.x_min, self.y_max],
        ])

    def to_polygon(self) -> "RotatedBox":
        return RotatedBox.from_array(self.corners())


@dataclass(frozen=True)
class RotatedBox:
    """Quadrilateral given by four ordered corners."""

    corners: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        if len(self.corners) != 4:
            raise ValueError(f"expected 4 corners, got {len(self.corners)}")
        pts = tuple(Point2(float(x), float(y)) for x, y in self.corners)
        if not all(math.isfinite(v) for p in pts for v in p):
            raise ValueError("corners must be finite")
        object.__setattr__(self, "corners", pts)

    @classmethod
    def from_array(cls, arr) -> "RotatedBox":
        return cls(tuple(map(tuple, np.asarray(arr, dtype=float).reshape(4, 2))))

    @classmethod
    def from_octuple(cls, values: Sequence[float]) -> "RotatedBox":
        return cls.from_array(values)

    def as_array(self) -> np.ndarray:
        return np.array(self.corners, dtype=float)

    def to_octuple(self) -> tuple[float, ...]:
        return tuple(v for p in self.corners for v in p)

    def side_lengths(self) -> np.ndarray:
        pts = self.as_array()
        return np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)

    @property
    def area(self) -> float:
        return polygon_area(self.as_array())

    def transformed(self, t: AffineTransform) -> "RotatedBox":
        return RotatedBox.from_array(apply(t, self.as_array()))


def polygon_area(points) -> float:
    """Unsigned shoelace area."""
    return abs(signed_area(points))


def signed_area(points) -> float:
    """Shoelace area, positive for counterclockwise order (x right, y up)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def ellipse_box(e: Ellipse) -> AxisAlignedBox:
    """Box of width ``2 * semi_minor`` and height ``2 * semi_major`` about the center.

    Only meaningful in a frame where the major axis has been turned onto y.
    """
    (x0, y0), m, n, _ = e
    return AxisAlignedBox(x0 - n, y0 - m, x0 + n, y0 + m)


def minmax_box(points) -> AxisAlignedBox:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("minmax_box of an empty point list")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return AxisAlignedBox(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def intersect_aligned(g: AxisAlignedBox, b: AxisAlignedBox) -> AxisAlignedBox:
    box = AxisAlignedBox(
        max(g.x_min, b.x_min), max(g.y_min, b.y_min),
        min(g.x_max, b.x_max), min(g.y_max, b.y_max),
    )
    if box.x_min > box.x_max or box.y_min > box.y_max:
        raise EmptyIntersectionError(f"boxes {tuple(g)} and {tuple(b)} do not intersect")
    return box


def intersect_boxes(g: AxisAlignedBox, b: AxisAlignedBox) -> RotatedBox:
    """Intersection rectangle of two boxes as a 4-corner polygon.

    Raises
    ------
    EmptyIntersectionError
        If the boxes are disjoint.
    """
    return intersect_aligned(g, b).to_polygon()
