"""Mask to rotated box: ellipse fit, aligned-frame boxes, inverse mapping."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .ellipse import ConicCoefficients, ConicError, Ellipse, FitError, conic_to_ellipse, fit_ellipse
from .geometry import (
    IDENTITY,
    AffineTransform,
    AxisAlignedBox,
    EmptyIntersectionError,
    RotatedBox,
    apply,
    ellipse_box,
    intersect_aligned,
    inverse,
    minmax_box,
    rotation_about,
)
from .mask import DEFAULT_THRESHOLD, BinaryMask, EmptyMaskError, extract_contour
from .minrect import min_area_rect, rect_angle
from .refine import RefineConfig, frame_membership, refine_box

BOX_METHODS = ("ellipse_intersection", "minrect", "minmax")
ANGLE_SOURCES = ("ellipse", "minrect")

# ratio n/m above which circular_theta_override kicks in
NEAR_CIRCULAR = 0.99


class Fallback(str, enum.Enum):
    NONE = "none"
    MINMAX = "minmax"
    EMPTY_MASK = "empty_mask"


@dataclass(frozen=True)
class PipelineConfig:
    """Box estimation settings.

    ``angle_source=None`` means the box method's own angle: the ellipse for
    ``ellipse_intersection``, the minimum-area rectangle for ``minrect``.
    ``minmax`` is always axis-aligned.
    """

    angle_source: Optional[str] = None
    box_method: str = "ellipse_intersection"
    refine: bool = False
    refine_cfg: RefineConfig = RefineConfig()
    circular_theta_override: bool = False
    mask_threshold: int = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.box_method not in BOX_METHODS:
            raise ValueError(f"box_method must be one of {BOX_METHODS}, got {self.box_method!r}")
        if self.angle_source is not None and self.angle_source not in ANGLE_SOURCES:
            raise ValueError(f"angle_source must be one of {ANGLE_SOURCES}, got {self.angle_source!r}")
        if not 0 <= self.mask_threshold <= 255:
            raise ValueError("mask_threshold must lie in 0..255")

    @property
    def effective_angle_source(self) -> Optional[str]:
        if self.box_method == "minmax":
            return None
        if self.angle_source is not None:
            return self.angle_source
        return "minrect" if self.box_method == "minrect" else "ellipse"

    def to_dict(self) -> dict:
        return {
            "box_method": self.box_method,
            "angle_source": self.effective_angle_source,
            "refine": self.refine,
            "factor": self.refine_cfg.factor,
            "refine_step": self.refine_cfg.step,
            "max_shrink": self.refine_cfg.max_shrink_fraction,
            "freeze_alpha": self.refine_cfg.freeze_alpha,
            "circular_theta_override": self.circular_theta_override,
            "threshold": self.mask_threshold,
        }


@dataclass(frozen=True)
class BoxResult:
    polygon: RotatedBox
    ellipse: Optional[Ellipse]
    angle_used: float
    fallback_applied: Fallback
    # maps image coordinates into the frame the box was built in
    frame: AffineTransform = IDENTITY
    conic: Optional[ConicCoefficients] = None
    elapsed_ms: float = field(default=0.0, compare=False)


_EMPTY_POLYGON = RotatedBox(((0.0, 0.0),) * 4)


def _minmax_result(points: np.ndarray, fallback: Fallback, ellipse=None, conic=None) -> BoxResult:
    return BoxResult(minmax_box(points).to_polygon(), ellipse, 0.0, fallback, conic=conic)


def _maybe_refine(box: AxisAlignedBox, mask: BinaryMask, frame: AffineTransform, cfg: PipelineConfig) -> AxisAlignedBox:
    if cfg.refine and box.width > 0 and box.height > 0:
        return refine_box(frame_membership(mask, frame), box, cfg.refine_cfg)
    return box


def _estimate(mask: BinaryMask, cfg: PipelineConfig) -> BoxResult:
    try:
        contour = extract_contour(mask)
    except EmptyMaskError:
        return BoxResult(_EMPTY_POLYGON, None, 0.0, Fallback.EMPTY_MASK)
    pts = contour.points
    source = cfg.effective_angle_source

    if cfg.box_method == "minmax":
        box = _maybe_refine(minmax_box(pts), mask, IDENTITY, cfg)
        return BoxResult(box.to_polygon(), None, 0.0, Fallback.NONE)

    if cfg.box_method == "minrect" and source == "minrect":
        rect = min_area_rect(pts)
        angle = rect_angle(rect)
        if not cfg.refine:
            return BoxResult(rect, None, angle, Fallback.NONE)
        frame = rotation_about(rect.as_array().mean(axis=0), angle - math.pi / 2)
        box = _maybe_refine(minmax_box(apply(frame, pts)), mask, frame, cfg)
        return BoxResult(box.to_polygon().transformed(inverse(frame)), None, angle, Fallback.NONE, frame)

    try:
        conic = fit_ellipse(pts)
        ell = conic_to_ellipse(conic)
    except (FitError, ConicError):
        return _minmax_result(pts, Fallback.MINMAX)

    angle = ell.angle
    if cfg.circular_theta_override and ell.semi_minor / ell.semi_major > NEAR_CIRCULAR:
        angle = math.pi / 2
    if source == "minrect":
        angle = rect_angle(min_area_rect(pts))

    # turn the chosen major direction onto +y
    frame = rotation_about(ell.center, angle - math.pi / 2)
    box = minmax_box(apply(frame, pts))
    if cfg.box_method == "ellipse_intersection":
        try:
            box = intersect_aligned(ellipse_box(ell), box)
        except EmptyIntersectionError:
            return _minmax_result(pts, Fallback.MINMAX, ell, conic)
    box = _maybe_refine(box, mask, frame, cfg)
    polygon = box.to_polygon().transformed(inverse(frame))
    return BoxResult(polygon, ell, angle, Fallback.NONE, frame, conic)


def estimate_box(mask: BinaryMask, cfg: PipelineConfig = PipelineConfig()) -> BoxResult:
    """Rotated bounding box of the largest target in ``mask``.

    Steps: trace the boundary, fit an ellipse, rotate about its center so
    the major axis is vertical, intersect the ellipse box with the min-max
    box of the rotated boundary, optionally refine, and rotate back.

    An empty mask yields an all-zero sentinel polygon flagged
    ``empty_mask``.  A degenerate fit or disjoint boxes fall back to the
    axis-aligned min-max box flagged ``minmax``.
    """
    t0 = time.perf_counter()
    result = _estimate(mask, cfg)
    return replace(result, elapsed_ms=(time.perf_counter() - t0) * 1e3)


def track_sequence(masks: Iterable[BinaryMask], cfg: PipelineConfig = PipelineConfig()) -> list[BoxResult]:
    """Run :func:`estimate_box` on every frame independently, in order."""
    masks = list(masks)
    if not masks:
        raise ValueError("empty mask sequence")
    shape = masks[0].cells.shape
    for i, m in enumerate(masks):
        if m.cells.shape != shape:
            raise ValueError(f"frame {i} has shape {m.cells.shape}, expected {shape}")
    return [estimate_box(m, cfg) for m in masks]
