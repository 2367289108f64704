"""Direct least-squares ellipse fitting and conic/geometric conversion."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .mask import Point2

# inverse of the constraint matrix [[0, 0, 2], [0, -1, 0], [2, 0, 0]]
_C1_INV = np.array([[0.0, 0.0, 0.5], [0.0, -1.0, 0.0], [0.5, 0.0, 0.0]])

MIN_POINTS = 6
_CIRCLE_RTOL = 1e-9


class FitError(ValueError):
    """Too few points, or a degenerate point configuration."""


class ConicError(ValueError):
    """The conic does not describe a real, non-degenerate ellipse."""


class ConicCoefficients(NamedTuple):
    """Coefficients of ``a x^2 + b xy + c y^2 + d x + e y + f = 0``."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def discriminant(self) -> float:
        return self.b * self.b - 4.0 * self.a * self.c

    def normalized(self) -> "ConicCoefficients":
        """Scale to unit norm with the first nonzero coefficient positive."""
        v = np.array(self, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ConicError("all coefficients are zero")
        v = v / norm
        lead = v[np.flatnonzero(v)[0]]
        if lead < 0:
            v = -v
        return ConicCoefficients(*map(float, v))


class Ellipse(NamedTuple):
    """Geometric ellipse.

    ``angle`` is the direction of the semi-major axis, counterclockwise
    from +x in the (x, y) coordinate frame, normalised to ``[0, pi)``.
    """

    center: Point2
    semi_major: float
    semi_minor: float
    angle: float

    def sample(self, count: int, phase: float = 0.0) -> np.ndarray:
        """``count`` boundary points, evenly spaced in the parametric angle."""
        t = phase + np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        ct, st = np.cos(self.angle), np.sin(self.angle)
        u = self.semi_major * np.cos(t)
        v = self.semi_minor * np.sin(t)
        x = self.center.x + u * ct - v * st
        y = self.center.y + u * st + v * ct
        return np.column_stack([x, y])


def design_row(p) -> np.ndarray:
    x, y = float(p[0]), float(p[1])
    return np.array([x * x, x * y, y * y, x, y, 1.0])


def residual(conic: ConicCoefficients, p) -> float:
    """Algebraic distance of ``p`` from the conic."""
    return float(design_row(p) @ np.asarray(conic, dtype=float))


def fit_ellipse(points) -> ConicCoefficients:
    """Fit an ellipse minimising the summed squared algebraic distance.

    Uses the partitioned formulation of the ``4ac - b^2 = 1`` constrained
    problem: quadratic and linear parts are split so that only a 3x3
    eigenproblem remains, and coordinates are centered on their mean before
    the scatter matrices are formed.  The result is mapped back to the input
    frame and returned with unit norm.

    Parameters
    ----------
    points : ContourPointSet or array_like, shape (N, 2)

    Raises
    ------
    FitError
        If N < 6 or the points are collinear/coincident.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=float).reshape(-1, 2)
    if len(pts) < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} points, got {len(pts)}")
    if not np.isfinite(pts).all():
        raise FitError("non-finite input points")

    mx, my = pts.mean(axis=0)
    x = pts[:, 0] - mx
    y = pts[:, 1] - my
    # scale only conditions the scatter; the conic is rescaled below
    s = math.sqrt(np.mean(x * x + y * y))
    if s == 0.0:
        raise FitError("all points coincide")
    x = x / s
    y = y / s

    d1 = np.column_stack([x * x, x * y, y * y])
    d2 = np.column_stack([x, y, np.ones_like(x)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2

    if np.linalg.cond(s3) > 1e12:
        raise FitError("degenerate point set (collinear)")
    t = -np.linalg.solve(s3, s2.T)
    reduced = _C1_INV @ (s1 + s2 @ t)

    evals, evecs = np.linalg.eig(reduced)
    evecs = np.real(evecs)
    evals = np.real(evals)
    constraint = 4.0 * evecs[0] * evecs[2] - evecs[1] ** 2
    candidates = np.flatnonzero(constraint > 0)
    if candidates.size == 0:
        raise FitError("no elliptical solution (degenerate point set)")
    best = candidates[np.argmin(np.abs(evals[candidates]))]
    quad = evecs[:, best]
    lin = t @ quad

    a, b, c = quad
    d, e, f = lin
    # undo scaling: u = x / s
    a, b, c = a / (s * s), b / (s * s), c / (s * s)
    d, e = d / s, e / s
    # undo centering: u = x - mx, v = y - my
    D = d - 2.0 * a * mx - b * my
    E = e - b * mx - 2.0 * c * my
    F = a * mx * mx + b * mx * my + c * my * my - d * mx - e * my + f
    conic = ConicCoefficients(a, b, c, D, E, F).normalized()
    if not conic.discriminant() < 0.0:
        raise FitError("fit did not produce an ellipse")
    return conic


def conic_to_ellipse(conic: ConicCoefficients) -> Ellipse:
    """Center, semi-axes and major-axis angle of an elliptical conic.

    Raises
    ------
    ConicError
        If the conic is not a real ellipse (hyperbola, parabola, a single
        point or the empty set).
    """
    a, b, c, d, e, f = map(float, conic)
    det = 4.0 * a * c - b * b
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0 or not det > 1e-14 * scale * scale:
        raise ConicError("conic is not an ellipse (b^2 - 4ac >= 0)")

    x0 = (b * e - 2.0 * c * d) / det
    y0 = (b * d - 2.0 * a * e) / det
    f0 = f + 0.5 * (d * x0 + e * y0)

    q = np.array([[a, 0.5 * b], [0.5 * b, c]])
    if a + c < 0:
        q, f0 = -q, -f0
    if not f0 < 0:
        raise ConicError("imaginary or point ellipse")
    evals, evecs = np.linalg.eigh(q)
    # eigh sorts ascending: the smaller eigenvalue spans the major axis
    major = math.sqrt(-f0 / evals[0])
    minor = math.sqrt(-f0 / evals[1])
    if major - minor <= _CIRCLE_RTOL * major:
        angle = 0.0
    else:
        vx, vy = evecs[:, 0]
        angle = math.atan2(vy, vx) % math.pi
        if angle >= math.pi:
            angle = 0.0
    return Ellipse(Point2(x0, y0), major, minor, angle)


def ellipse_to_conic(ellipse: Ellipse) -> ConicCoefficients:
    """Inverse of :func:`conic_to_ellipse`, normalised."""
    (x0, y0), m, n, th = ellipse
    ct, st = math.cos(th), math.sin(th)
    im2, in2 = 1.0 / (m * m), 1.0 / (n * n)
    a = ct * ct * im2 + st * st * in2
    b = 2.0 * ct * st * (im2 - in2)
    c = st * st * im2 + ct * ct * in2
    d = -2.0 * a * x0 - b * y0
    e = -b * x0 - 2.0 * c * y0
    f = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 - 1.0
    return ConicCoefficients(a, b, c, d, e, f).normalized()
