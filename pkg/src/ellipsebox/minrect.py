"""Convex hull and minimum-area enclosing rectangle (edge-flush search)."""

from __future__ import annotations

import math

import numpy as np

from .geometry import AxisAlignedBox, RotatedBox, apply, inverse, rotation_about

_SQUARE_RTOL = 1e-9


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull (positive signed area) without collinear points.

    One or two distinct input points are returned as they are, sorted.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) <= 2:
        return np.array(uniq, dtype=float)

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def _canonical_rect(center, angle: float, length: float, width: float) -> RotatedBox:
    """Rectangle whose first edge (corner 0 -> 1) runs along ``angle``."""
    m = rotation_about(center, angle)
    cx, cy = center
    box = AxisAlignedBox(cx - length / 2, cy - width / 2, cx + length / 2, cy + width / 2)
    return RotatedBox.from_array(apply(inverse(m), box.corners()))


def _caliper_candidates(hull: np.ndarray):
    """Yield (area, perimeter, angle, center, length, width) per hull edge.

    Each candidate has one side flush with a hull edge; extents along the
    edge and its inward normal come from projecting every hull vertex.
    """
    edges = np.roll(hull, -1, axis=0) - hull
    u = edges / np.hypot(edges[:, 0], edges[:, 1])[:, None]
    v = np.column_stack([-u[:, 1], u[:, 0]])  # inward for a ccw hull
    pu = hull @ u.T  # (vertex, edge)
    pv = hull @ v.T
    lo, hi = pu.min(axis=0), pu.max(axis=0)
    base = np.einsum("ij,ij->i", hull, v)
    top = pv.max(axis=0)
    for i in range(len(hull)):
        length, width = float(hi[i] - lo[i]), float(top[i] - base[i])
        mid = u[i] * (0.5 * (lo[i] + hi[i])) + v[i] * (0.5 * (base[i] + top[i]))
        ang = math.atan2(u[i, 1], u[i, 0])
        yield length * width, 2.0 * (length + width), ang, mid, length, width


def _normalize_axes(angle: float, length: float, width: float):
    """Orient so ``length`` is the longer side; angle in [0, pi) (or [0, pi/2) for squares)."""
    if abs(length - width) <= _SQUARE_RTOL * max(length, width):
        return angle % (math.pi / 2), length, width
    if width > length:
        angle, length, width = angle + math.pi / 2, width, length
    angle %= math.pi
    return (0.0 if angle >= math.pi else angle), length, width


def min_area_rect(points) -> RotatedBox:
    """Smallest-area rectangle enclosing ``points``.

    One side is flush with a hull edge. Equal areas are resolved by
    smaller perimeter, then smaller long-side angle. Corner 0 -> 1 runs
    along the long side.
    """
    hull = convex_hull(points)
    if len(hull) == 1:
        return RotatedBox.from_array(np.repeat(hull, 4, axis=0))
    if len(hull) == 2:
        d = hull[1] - hull[0]
        ang, length, width = _normalize_axes(math.atan2(d[1], d[0]), float(np.hypot(*d)), 0.0)
        return _canonical_rect(hull.mean(axis=0), ang, length, width)

    best = None
    best_key = None
    for area, perim, ang, mid, length, width in _caliper_candidates(hull):
        ang, length, width = _normalize_axes(ang, length, width)
        key = (area, perim, ang)
        if best is None or _key_less(key, best_key):
            best_key, best = key, (ang, mid, length, width)
    ang, mid, length, width = best
    return _canonical_rect(mid, ang, length, width)


def _key_less(a, b) -> bool:
    for x, y in zip(a, b):
        tol = 1e-9 * max(abs(x), abs(y), 1.0)
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


def rect_angle(r: RotatedBox) -> float:
    """Direction of the longer side in [0, pi); the first edge for squares."""
    pts = r.as_array()
    e1 = pts[1] - pts[0]
    e2 = pts[2] - pts[1]
    l1, l2 = float(np.hypot(*e1)), float(np.hypot(*e2))
    if l1 == 0.0 and l2 == 0.0:
        return 0.0
    edge = e1 if l1 >= l2 * (1.0 - _SQUARE_RTOL) else e2
    ang = math.atan2(edge[1], edge[0]) % math.pi
    return 0.0 if ang >= math.pi else ang
