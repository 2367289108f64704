"""Binary masks: loading, boundary extraction and point membership.

Cell ``(row, col)`` maps to the continuous point ``(x, y) = (col, row)``,
i.e. points sit at cell centers, x to the right and y downward.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy import ndimage

DEFAULT_THRESHOLD = 127

_SUFFIXES = {".pgm", ".png", ".grid"}


class MaskError(ValueError):
    """A mask could not be read or is malformed."""


class EmptyMaskError(ValueError):
    """The mask has no foreground (no target)."""


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Immutable boolean occupancy grid of shape ``(height, width)``."""

    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=bool, copy=True)
        if cells.ndim != 2:
            raise MaskError(f"mask must be two-dimensional, got shape {cells.shape}")
        if cells.shape[0] == 0 or cells.shape[1] == 0:
            raise MaskError("mask has a zero dimension")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.cells))

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))


@dataclass(frozen=True, eq=False)
class ContourPointSet:
    """Ordered boundary loop as an ``(N, 2)`` float array of ``(x, y)``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True).reshape(-1, 2)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return (Point2(float(x), float(y)) for x, y in self.points)

    def __eq__(self, other):
        if not isinstance(other, ContourPointSet):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


def threshold_grid(values, threshold: int = DEFAULT_THRESHOLD) -> BinaryMask:
    """Binarize a numeric grid: strictly greater than ``threshold`` is foreground.

    Boolean grids are taken as-is.
    """
    arr = np.asarray(values)
    if arr.dtype == bool:
        return BinaryMask(arr)
    if arr.ndim != 2:
        raise MaskError(f"mask must be two-dimensional, got shape {arr.shape}")
    return BinaryMask(arr > threshold)


def _read_grid_file(path: Path) -> BinaryMask:
    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise MaskError(f"cannot read {path}: {exc}") from exc
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise MaskError(f"{path}: first line must be 'width height'")
    try:
        width, height = int(lines[0][0]), int(lines[0][1])
        rows = [[int(tok) for tok in ln] for ln in lines[1:]]
    except ValueError as exc:
        raise MaskError(f"{path}: non-integer token") from exc
    if width <= 0 or height <= 0:
        raise MaskError(f"{path}: zero-dimension grid")
    if len(rows) != height or any(len(r) != width for r in rows):
        raise MaskError(f"{path}: expected {height} rows of {width} tokens")
    cells = np.array(rows)
    if not np.isin(cells, (0, 1)).all():
        raise MaskError(f"{path}: grid tokens must be 0 or 1")
    return BinaryMask(cells == 1)


def _read_image(path: Path, threshold: int) -> BinaryMask:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            arr = np.asarray(im)
    except (OSError, UnidentifiedImageError) as exc:
        raise MaskError(f"cannot read {path}: {exc}") from exc
    if mode == "1":
        return BinaryMask(arr.astype(bool))
    if mode == "L":
        return threshold_grid(arr.astype(np.int64), threshold)
    if mode.startswith("I"):
        # 16-bit grayscale, rescaled onto the 0-255 threshold scale
        return BinaryMask(arr.astype(np.float64) / 257.0 > threshold)
    raise MaskError(f"{path}: unsupported image mode {mode!r}, expected grayscale")


def load_mask(
    source: Union[str, os.PathLike, np.ndarray, Sequence[Sequence[float]]],
    threshold: int = DEFAULT_THRESHOLD,
) -> BinaryMask:
    """Load a mask from a PGM/PNG/``.grid`` file or an inline grid.

    Pixel values strictly above ``threshold`` (0-255 scale) are foreground.
    ``.grid`` files and boolean arrays are already binary.
    """
    if isinstance(source, BinaryMask):
        return source
    if not isinstance(source, (str, os.PathLike)):
        return threshold_grid(source, threshold)

    path = Path(source)
    suffix = path.suffix.lower()
    if suffix not in _SUFFIXES:
        raise MaskError(f"{path}: unsupported format {suffix or '(none)'!r}")
    if not path.is_file():
        raise MaskError(f"{path}: no such file")
    if suffix == ".grid":
        return _read_grid_file(path)
    return _read_image(path, threshold)


def save_grid(mask: BinaryMask, path: Union[str, os.PathLike]) -> None:
    rows = [" ".join("1" if v else "0" for v in row) for row in mask.cells]
    Path(path).write_text(f"{mask.width} {mask.height}\n" + "\n".join(rows) + "\n")


def save_pgm(mask: BinaryMask, path: Union[str, os.PathLike]) -> None:
    from PIL import Image

    Image.fromarray(mask.cells.astype(np.uint8) * 255).save(path)


_EIGHT = np.ones((3, 3), dtype=bool)


def largest_component(mask: BinaryMask) -> np.ndarray:
    """Boolean grid of the largest 8-connected foreground component.

    Ties go to the component whose first cell comes first in raster order.
    """
    labels, count = ndimage.label(mask.cells, structure=_EIGHT)
    if count == 0:
        raise EmptyMaskError("mask has no foreground: no target")
    if count == 1:
        return labels == 1
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    # labels are numbered in raster order of each component's first cell
    return labels == int(np.argmax(sizes))


# clockwise on screen (y down), starting west; (drow, dcol)
_MOORE = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
# after stepping in direction k, the last background cell checked (direction
# k - 1 from the old cell) seen from the new cell
_BACKTRACK = tuple(
    _MOORE.index((_MOORE[k - 1][0] - _MOORE[k][0], _MOORE[k - 1][1] - _MOORE[k][1]))
    for k in range(8)
)


def _moore_trace(comp: np.ndarray) -> list[tuple[int, int]]:
    h, w = comp.shape
    wp = w + 2
    padded = np.zeros((h + 2, wp), dtype=np.uint8)
    padded[1:-1, 1:-1] = comp
    grid = padded.tobytes()
    interior = padded.copy()
    interior[1:-1, 1:-1] &= padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    edge = (padded & ~interior.astype(bool)).tobytes()
    offsets = [dr * wp + dc for dr, dc in _MOORE]

    start = grid.index(1)
    cur, back = start, 0
    seen = set()
    visited = {}
    while (cur, back) not in seen:
        seen.add((cur, back))
        if edge[cur] and cur not in visited:
            visited[cur] = None
        for step in range(1, 9):
            k = (back + step) & 7
            if grid[cur + offsets[k]]:
                cur, back = cur + offsets[k], _BACKTRACK[k]
                break
        else:
            break  # isolated cell
    return [(idx // wp - 1, idx % wp - 1) for idx in visited]


def extract_contour(mask: BinaryMask) -> ContourPointSet:
    """Trace the outer boundary of the largest foreground component.

    Moore-neighbour tracing over the 8-connected component, clockwise on
    screen from the first cell in raster order.  Each boundary cell (one
    with a background or out-of-bounds 4-neighbour) appears once, in the
    order first visited.

    Raises
    ------
    EmptyMaskError
        If the mask has no foreground.
    """
    comp = largest_component(mask)
    cells = _moore_trace(comp)
    pts = np.array([(c, r) for r, c in cells], dtype=float)
    return ContourPointSet(pts)


def _cell_index(v):
    return np.floor(np.asarray(v, dtype=float) + 0.5).astype(np.int64)


def contains(mask: BinaryMask, p) -> bool:
    """True iff ``p`` rounds (half up) to an in-bounds foreground cell."""
    x, y = p
    if not (np.isfinite(x) and np.isfinite(y)):
        return False
    col, row = int(_cell_index(x)), int(_cell_index(y))
    if 0 <= row < mask.height and 0 <= col < mask.width:
        return bool(mask.cells[row, col])
    return False


def contains_many(mask: BinaryMask, points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`contains` over an ``(N, 2)`` array of points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.zeros(len(pts), dtype=bool)
    finite = np.isfinite(pts).all(axis=1)
    cols = np.zeros(len(pts), dtype=np.int64)
    rows = np.zeros(len(pts), dtype=np.int64)
    cols[finite] = _cell_index(pts[finite, 0])
    rows[finite] = _cell_index(pts[finite, 1])
    ok = finite & (rows >= 0) & (rows < mask.height) & (cols >= 0) & (cols < mask.width)
    out[ok] = mask.cells[rows[ok], cols[ok]]
    return out
