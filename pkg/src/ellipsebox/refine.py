"""Edge-coverage refinement: pull box edges inward until they cut enough mask."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import AffineTransform, AxisAlignedBox, apply, inverse
from .mask import BinaryMask, contains_many

DEFAULT_FACTOR = 0.258

EDGES = ("left", "top", "right", "bottom")

# takes an (N, 2) array of points in the box frame, returns a bool array
Membership = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RefineConfig:
    factor: float = DEFAULT_FACTOR
    step: float = 1.0
    max_shrink_fraction: float = 0.5
    freeze_alpha: bool = False

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValueError(f"factor must lie in (0, 1), got {self.factor}")
        if not self.step > 0.0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not 0.0 < self.max_shrink_fraction <= 0.5:
            raise ValueError(
                f"max_shrink_fraction must lie in (0, 0.5], got {self.max_shrink_fraction}"
            )


def frame_membership(mask: BinaryMask, to_frame: AffineTransform) -> Membership:
    """Foreground query for points expressed in the frame ``to_frame`` maps into."""
    back = inverse(to_frame)
    return lambda pts: contains_many(mask, apply(back, pts))


def _edge_samples(box: AxisAlignedBox, edge: str) -> tuple[float, np.ndarray]:
    x0, y0, x1, y1 = box
    if edge in ("left", "right"):
        alpha = y1 - y0
    else:
        alpha = x1 - x0
    n = max(1, int(math.floor(alpha + 1e-9)))
    t = (alpha - n) / 2.0 + 0.5 + np.arange(n, dtype=float)
    if alpha < 1.0:
        t = np.array([alpha / 2.0])
    if edge == "left":
        pts = np.column_stack([np.full(n, x0), y0 + t])
    elif edge == "right":
        pts = np.column_stack([np.full(n, x1), y0 + t])
    elif edge == "top":
        pts = np.column_stack([x0 + t, np.full(n, y0)])
    elif edge == "bottom":
        pts = np.column_stack([x0 + t, np.full(n, y1)])
    else:
        raise ValueError(f"unknown edge {edge!r}")
    return alpha, pts


def edge_coverage(membership: Membership, box: AxisAlignedBox, edge: str) -> tuple[float, float]:
    """Edge length and the length of it lying on foreground.

    The edge is sampled at the centers of unit segments laid symmetrically
    along it; each foreground sample contributes 1 px, capped at the edge
    length.
    """
    alpha, pts = _edge_samples(box, edge)
    hits = int(np.count_nonzero(membership(pts)))
    return alpha, min(float(hits), alpha)


def refine_box(membership: Membership, box: AxisAlignedBox, cfg: RefineConfig = RefineConfig()) -> AxisAlignedBox:
    """Shrink each edge of ``box`` by ``cfg.step`` while ``beta <= alpha * factor``.

    Edges are visited left, top, right, bottom, one step each per sweep,
    until a sweep moves nothing.  An edge stops after travelling
    ``max_shrink_fraction`` of the original box dimension, and never so far
    that the box becomes narrower than one step.
    """
    x0, y0, x1, y1 = map(float, box)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"refine_box needs a non-degenerate box, got {tuple(box)}")
    width, height = x1 - x0, y1 - y0
    cap_x = max(0.0, min(cfg.max_shrink_fraction * width, 0.5 * (width - cfg.step)))
    cap_y = max(0.0, min(cfg.max_shrink_fraction * height, 0.5 * (height - cfg.step)))
    caps = {"left": cap_x, "right": cap_x, "top": cap_y, "bottom": cap_y}
    frozen = {"left": height, "right": height, "top": width, "bottom": width}
    moved = dict.fromkeys(EDGES, 0.0)

    cur = [x0, y0, x1, y1]
    while True:
        changed = False
        for edge in EDGES:
            remaining = caps[edge] - moved[edge]
            if remaining <= 1e-12:
                continue
            alpha, beta = edge_coverage(membership, AxisAlignedBox(*cur), edge)
            if cfg.freeze_alpha:
                alpha = frozen[edge]
            if beta > alpha * cfg.factor:
                continue
            d = min(cfg.step, remaining)
            moved[edge] += d
            if edge == "left":
                cur[0] += d
            elif edge == "top":
                cur[1] += d
            elif edge == "right":
                cur[2] -= d
            else:
                cur[3] -= d
            changed = True
        if not changed:
            return AxisAlignedBox(*cur)
