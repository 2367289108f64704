"""Rotated bounding boxes from segmentation masks via ellipse fitting."""

__version__ = "0.1.0"

from .ellipse import ConicCoefficients, Ellipse, conic_to_ellipse, fit_ellipse
from .evaluation import GroundTruthSequence, TrackingReport, polygon_iou, supervised_run
from .geometry import AffineTransform, AxisAlignedBox, RotatedBox
from .mask import BinaryMask, ContourPointSet, Point2, extract_contour, load_mask
from .minrect import convex_hull, min_area_rect, rect_angle
from .pipeline import BoxResult, Fallback, PipelineConfig, estimate_box, track_sequence
from .refine import RefineConfig, edge_coverage, refine_box

__all__ = [
    "AffineTransform",
    "AxisAlignedBox",
    "BinaryMask",
    "BoxResult",
    "ConicCoefficients",
    "ContourPointSet",
    "Ellipse",
    "Fallback",
    "GroundTruthSequence",
    "PipelineConfig",
    "Point2",
    "RefineConfig",
    "RotatedBox",
    "TrackingReport",
    "conic_to_ellipse",
    "convex_hull",
    "edge_coverage",
    "estimate_box",
    "extract_contour",
    "fit_ellipse",
    "load_mask",
    "min_area_rect",
    "polygon_iou",
    "rect_angle",
    "refine_box",
    "supervised_run",
    "track_sequence",
]
