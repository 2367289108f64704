"""SVG overlays of boxes on a mask."""

from __future__ import annotations

import base64
import io
from typing import Iterable, Optional

import numpy as np

from .geometry import RotatedBox
from .mask import BinaryMask

PREDICTION = "#00ff00"
GROUND_TRUTH = "#0000ff"
BASELINE = "#ff00ff"


def _png_data_uri(mask: BinaryMask) -> str:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(mask.cells.astype(np.uint8) * 255).save(buf, format="PNG")
    return "data:image/png;base64," + base64.b64encode(buf.getvalue()).decode("ascii")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _path(poly, color: str) -> str:
    if isinstance(poly, RotatedBox):
        poly = poly.as_array()
    pts = np.asarray(poly, dtype=float).reshape(-1, 2)
    d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts) + " Z"
    return f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1"/>'


def render_svg(
    mask: BinaryMask,
    predictions: Iterable = (),
    ground_truth: Iterable = (),
    baselines: Iterable = (),
) -> str:
    """SVG with the mask raster underneath and one stroked path per polygon.

    Cell centers sit on integer coordinates, so the view box starts at -0.5.
    Drawing order is ground truth, baseline, prediction.
    """
    w, h = mask.width, mask.height
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="-0.5 -0.5 {w} {h}" overflow="hidden">',
        f'<image x="-0.5" y="-0.5" width="{w}" height="{h}" '
        f'style="image-rendering:pixelated" href="{_png_data_uri(mask)}"/>',
    ]
    for polys, color in ((ground_truth, GROUND_TRUTH), (baselines, BASELINE), (predictions, PREDICTION)):
        lines.extend(_path(p, color) for p in polys)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
