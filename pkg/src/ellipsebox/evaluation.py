"""Polygon overlap and the supervised (reset-on-failure) tracking protocol."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import RotatedBox, signed_area

DEFAULT_BURN_IN = 5


class NonConvexPolygonError(ValueError):
    pass


def _as_points(poly) -> np.ndarray:
    if isinstance(poly, RotatedBox):
        return poly.as_array()
    return np.asarray(poly, dtype=float).reshape(-1, 2)


def _ccw_convex(pts: np.ndarray) -> np.ndarray:
    """Return ``pts`` counterclockwise; raise if the polygon is not convex."""
    area = signed_area(pts)
    if area < 0:
        pts = pts[::-1]
    nxt = np.roll(pts, -1, axis=0)
    nxt2 = np.roll(pts, -2, axis=0)
    cross = (nxt[:, 0] - pts[:, 0]) * (nxt2[:, 1] - nxt[:, 1]) - (nxt[:, 1] - pts[:, 1]) * (nxt2[:, 0] - nxt[:, 0])
    scale = max(float(np.abs(pts).max()), 1.0) ** 2
    if (cross < -1e-9 * scale).any():
        raise NonConvexPolygonError("polygon is not convex")
    return pts


def clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: part of ``subject`` inside convex ccw ``clip``."""
    out = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not out:
            break
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay

        def side(p):
            return ex * (p[1] - ay) - ey * (p[0] - ax)

        inp, out = out, []
        prev = inp[-1]
        sp = side(prev)
        for cur in inp:
            sc = side(cur)
            if sc >= 0:
                if sp < 0:
                    out.append(_cut(prev, cur, sp, sc))
                out.append(cur)
            elif sp >= 0:
                out.append(_cut(prev, cur, sp, sc))
            prev, sp = cur, sc
    return np.array(out, dtype=float).reshape(-1, 2)


def _cut(p, q, sp, sq):
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def polygon_iou(p, q) -> float:
    """Intersection over union of two convex polygons.

    Zero-area inputs give 0.  Raises :class:`NonConvexPolygonError` for
    non-convex input.
    """
    a = _ccw_convex(_as_points(p))
    b = _ccw_convex(_as_points(q))
    area_a = abs(signed_area(a))
    area_b = abs(signed_area(b))
    if area_a == 0.0 or area_b == 0.0:
        return 0.0
    inter = abs(signed_area(clip_convex(a, b)))
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


@dataclass(frozen=True)
class GroundTruthSequence:
    """Per-frame ground-truth polygons; ``None`` marks an unlabeled frame."""

    frames: tuple

    def __post_init__(self):
        frames = tuple(None if f is None else _as_points(f) for f in self.frames)
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)

    @property
    def labeled_count(self) -> int:
        return sum(f is not None for f in self.frames)


@dataclass
class TrackingReport:
    accuracy: float
    failures: int
    robustness_ratio: float
    per_frame_overlap: list  # None where the frame was skipped or unlabeled
    counted: list
    failure_frames: list
    reinit_frames: list
    skipped_frames: list
    empty_success: bool
    burn_in: int
    eao: Optional[float] = None
    frames: int = field(default=0)

    def to_dict(self) -> dict:
        return asdict(self)


def supervised_run(
    predictions: Iterable,
    ground_truth: GroundTruthSequence,
    burn_in: int = DEFAULT_BURN_IN,
) -> TrackingReport:
    """Replay predictions through the reset-on-failure protocol.

    A labeled frame whose prediction has zero overlap with the ground truth
    is a failure.  The next ``burn_in`` frames are skipped and the tracker
    is re-initialised on the frame after them.  Accuracy is the mean
    overlap over the frames that were tracked successfully; robustness is
    failures per re-initialisation.

    One prediction is consumed per frame, skipped frames included.
    """
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")
    if ground_truth.labeled_count == 0:
        raise ValueError("ground truth has no labeled frames")

    n = len(ground_truth)
    it = iter(predictions)
    overlaps: list = [None] * n
    counted = [False] * n
    failure_frames, reinit_frames, skipped = [], [], []
    resume_at = -1

    for i in range(n):
        try:
            pred = next(it)
        except StopIteration:
            raise ValueError(f"got {i} predictions for {n} ground-truth frames") from None
        if i < resume_at:
            skipped.append(i)
            continue
        if i == resume_at:
            reinit_frames.append(i)
        gt = ground_truth.frames[i]
        if gt is None:
            continue
        iou = polygon_iou(pred, gt)
        overlaps[i] = iou
        if iou <= 0.0:
            failure_frames.append(i)
            resume_at = i + burn_in + 1
        else:
            counted[i] = True
    if next(it, None) is not None:
        raise ValueError(f"more predictions than the {n} ground-truth frames")

    good = [overlaps[i] for i in range(n) if counted[i]]
    accuracy = math.fsum(good) / len(good) if good else 0.0
    failures = len(failure_frames)
    return TrackingReport(
        accuracy=accuracy,
        failures=failures,
        robustness_ratio=failures / max(1, len(reinit_frames)),
        per_frame_overlap=overlaps,
        counted=counted,
        failure_frames=failure_frames,
        reinit_frames=reinit_frames,
        skipped_frames=skipped,
        empty_success=not good,
        burn_in=burn_in,
        frames=n,
    )


def _parse_region(line: str, lineno: int):
    parts = [p.strip() for p in line.split(",")]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"line {lineno}: non-numeric region {line!r}") from None
    if len(vals) not in (4, 8):
        raise ValueError(f"line {lineno}: expected 8 values (or 4 for x,y,w,h), got {len(vals)}")
    if all(math.isnan(v) for v in vals):
        return None
    if any(not math.isfinite(v) for v in vals):
        raise ValueError(f"line {lineno}: partially missing region")
    if len(vals) == 4:
        x, y, w, h = vals
        vals = [x, y, x + w, y, x + w, y + h, x, y + h]
    return np.array(vals).reshape(4, 2)


def parse_ground_truth(text: str) -> GroundTruthSequence:
    """Parse VOT region lines ``x1,y1,...,x4,y4``; all-``nan`` lines are unlabeled."""
    frames = [_parse_region(ln, i + 1) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    return GroundTruthSequence(tuple(frames))


def load_ground_truth(path) -> GroundTruthSequence:
    with open(path) as fh:
        return parse_ground_truth(fh.read())


def format_region(poly: Optional[Sequence] = None) -> str:
    """Comma-separated octuple with 6 decimals; ``None`` gives a ``nan`` octuple."""
    if poly is None:
        return ",".join(["nan"] * 8)
    vals = _as_points(poly).ravel()
    out = []
    for v in vals:
        s = f"{v:.6f}"
        out.append("0.000000" if s == "-0.000000" else s)
    return ",".join(out)
