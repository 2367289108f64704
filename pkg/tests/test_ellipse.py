import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsebox.ellipse import (
    ConicCoefficients,
    ConicError,
    Ellipse,
    FitError,
    conic_to_ellipse,
    design_row,
    ellipse_to_conic,
    fit_ellipse,
    residual,
)
from ellipsebox.mask import Point2


def parametric(x0, y0, m, n, theta, count, phase=0.0):
    """Independent sampler: x = x0 + m cos t cos th - n sin t sin th, etc."""
    t = phase + np.arange(count) * 2 * math.pi / count
    x = x0 + m * np.cos(t) * math.cos(theta) - n * np.sin(t) * math.sin(theta)
    y = y0 + m * np.cos(t) * math.sin(theta) + n * np.sin(t) * math.cos(theta)
    return np.column_stack([x, y])


def angle_diff(a, b):
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


@pytest.mark.parametrize("p, row", [
    ((0, 0), [0, 0, 0, 0, 0, 1]),
    ((1, 1), [1, 1, 1, 1, 1, 1]),
    ((2, 3), [4, 6, 9, 2, 3, 1]),
])
def test_design_row(p, row):
    assert design_row(p).tolist() == row


def test_residual_examples():
    unit = ConicCoefficients(1, 0, 1, 0, 0, -1)
    assert residual(unit, (2, 0)) == 3
    assert residual(unit, (0, 0)) == -1
    on = (math.cos(0.3), math.sin(0.3))
    assert abs(residual(unit.normalized(), on)) < 1e-9


def test_circle_fit():
    pts = parametric(5, 5, 2, 2, 0, 360)
    conic = fit_ellipse(pts)
    assert abs(np.linalg.norm(conic) - 1) < 1e-12
    assert max(abs(residual(conic, p)) for p in pts) < 1e-8
    expected = ConicCoefficients(1, 0, 1, -10, -10, 46).normalized()
    assert np.allclose(conic, expected, atol=1e-9)
    e = conic_to_ellipse(conic)
    assert e.center == pytest.approx((5, 5), abs=1e-9)
    assert e.semi_major == pytest.approx(2, abs=1e-9)
    assert e.semi_minor == pytest.approx(2, abs=1e-9)
    assert e.angle == 0.0


def test_rotated_ellipse_recovery():
    pts = parametric(10, 20, 5, 3, math.radians(30), 100)
    e = conic_to_ellipse(fit_ellipse(pts))
    assert abs(e.center.x - 10) < 1e-6 and abs(e.center.y - 20) < 1e-6
    assert abs(e.semi_major - 5) < 1e-6
    assert abs(e.semi_minor - 3) < 1e-6
    assert abs(e.angle - math.pi / 6) < 1e-6


def test_collinear_is_degenerate():
    pts = [(i, 2 * i + 1) for i in range(6)]
    with pytest.raises(FitError):
        fit_ellipse(pts)


def test_too_few_points():
    with pytest.raises(FitError):
        fit_ellipse(parametric(0, 0, 3, 2, 0, 5))


def test_coincident_points():
    with pytest.raises(FitError):
        fit_ellipse([(1.0, 1.0)] * 10)


def test_completed_square_conversion():
    e = conic_to_ellipse(ConicCoefficients(1, 0, 1, -10, -10, 46))
    assert e == (Point2(5.0, 5.0), 2.0, 2.0, 0.0)


def test_canonical_axis_aligned():
    e = conic_to_ellipse(ConicCoefficients(1, 0, 4, 0, 0, -4))
    assert e.center == (0, 0)
    assert (e.semi_major, e.semi_minor, e.angle) == (2.0, 1.0, 0.0)


@pytest.mark.parametrize("conic", [
    ConicCoefficients(1, 0, -1, 0, 0, -1),   # hyperbola
    ConicCoefficients(1, 0, 0, 0, -1, 0),    # parabola
    ConicCoefficients(1, 0, 1, 0, 0, 1),     # empty locus
    ConicCoefficients(1, 0, 1, 0, 0, 0),     # single point
    ConicCoefficients(0, 0, 0, 1, 1, 1),     # a line
])
def test_non_ellipses_rejected(conic):
    with pytest.raises(ConicError):
        conic_to_ellipse(conic)


def test_normalization_sign():
    c = ConicCoefficients(-2, 0, -2, 0, 0, 2).normalized()
    assert c.a > 0
    assert abs(np.linalg.norm(c) - 1) < 1e-15


ellipses = st.builds(
    lambda x0, y0, m, ratio, th: (x0, y0, m, m / ratio, th),
    st.floats(-50, 150), st.floats(-50, 150),
    st.floats(1, 60), st.floats(1.01, 20), st.floats(0, math.pi, exclude_max=True),
)


@settings(max_examples=150, deadline=None)
@given(ellipses, st.integers(6, 200), st.floats(0, 2 * math.pi))
def test_exact_recovery(gen, count, phase):
    x0, y0, m, n, th = gen
    e = conic_to_ellipse(fit_ellipse(parametric(x0, y0, m, n, th, count, phase)))
    assert abs(e.center.x - x0) <= 1e-6 * max(1, abs(x0), m)
    assert abs(e.center.y - y0) <= 1e-6 * max(1, abs(y0), m)
    assert abs(e.semi_major - m) <= 1e-6 * m
    assert abs(e.semi_minor - n) <= 1e-6 * n
    assert angle_diff(e.angle, th) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(ellipses, st.floats(-1e3, 1e3).filter(lambda s: abs(s) > 1e-3))
def test_scale_invariance(gen, scale):
    conic = ellipse_to_conic(Ellipse(Point2(gen[0], gen[1]), *gen[2:]))
    scaled = ConicCoefficients(*(scale * v for v in conic))
    a, b = conic_to_ellipse(conic), conic_to_ellipse(scaled)
    assert np.allclose(a.center, b.center, atol=1e-9)
    assert a.semi_major == pytest.approx(b.semi_major, rel=1e-9)
    assert a.semi_minor == pytest.approx(b.semi_minor, rel=1e-9)
    assert angle_diff(a.angle, b.angle) < 1e-9


@settings(max_examples=60, deadline=None)
@given(ellipses, st.floats(-math.pi, math.pi))
def test_rotation_equivariance(gen, phi):
    x0, y0, m, n, th = gen
    pts = parametric(x0, y0, m, n, th, 64)
    c = pts.mean(axis=0)
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    turned = (pts - c) @ rot.T + c
    a = conic_to_ellipse(fit_ellipse(pts))
    b = conic_to_ellipse(fit_ellipse(turned))
    assert abs(b.semi_major - a.semi_major) <= 1e-6 * m
    assert abs(b.semi_minor - a.semi_minor) <= 1e-6 * m
    assert angle_diff(b.angle, a.angle + phi) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(ellipses, st.floats(-100, 100), st.floats(-100, 100))
def test_translation_equivariance(gen, tx, ty):
    x0, y0, m, n, th = gen
    pts = parametric(x0, y0, m, n, th, 50)
    a = conic_to_ellipse(fit_ellipse(pts))
    b = conic_to_ellipse(fit_ellipse(pts + [tx, ty]))
    scale = max(1.0, abs(x0) + abs(tx), abs(y0) + abs(ty), m)
    assert abs(b.center.x - a.center.x - tx) <= 1e-6 * scale
    assert abs(b.center.y - a.center.y - ty) <= 1e-6 * scale
    assert abs(b.semi_major - a.semi_major) <= 1e-6 * m
    assert angle_diff(a.angle, b.angle) <= 1e-6


@settings(max_examples=80, deadline=None)
@given(ellipses, st.floats(0.01, 3.0), st.integers(0, 2**31))
def test_noisy_fit_is_always_an_ellipse(gen, sigma, seed):
    x0, y0, m, n, th = gen
    noise = np.random.default_rng(seed).normal(0, sigma, size=(40, 2))
    conic = fit_ellipse(parametric(x0, y0, m, n, th, 40) + noise)
    assert conic.discriminant() < 0


def test_ellipse_conic_round_trip():
    e = Ellipse(Point2(3, -4), 7, 2, 2.5)
    back = conic_to_ellipse(ellipse_to_conic(e))
    assert np.allclose(back.center, e.center)
    assert back.semi_major == pytest.approx(7)
    assert back.angle == pytest.approx(2.5)
