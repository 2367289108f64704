import numpy as np
import pytest
from conftest import brute_boundary, brute_components, random_blob
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ellipsebox.mask import (
    BinaryMask,
    EmptyMaskError,
    MaskError,
    contains,
    contains_many,
    extract_contour,
    load_mask,
    save_grid,
    save_pgm,
)


def _as_cells(contour):
    return {(int(x), int(y)) for x, y in contour.points}


# -- load_mask ----------------------------------------------------------------

def test_single_pixel_grid():
    grid = [[0, 0, 0], [0, 255, 0], [0, 0, 0]]
    m = load_mask(grid)
    assert m.foreground_count() == 1
    assert (m.width, m.height) == (3, 3)


def test_all_zero_image(tmp_path):
    path = tmp_path / "zeros.pgm"
    save_pgm(BinaryMask(np.zeros((10, 10), bool)), path)
    m = load_mask(path)
    assert m.foreground_count() == 0
    assert m.cells.shape == (10, 10)


def test_threshold_matches_scalar_loop(rng, tmp_path):
    from PIL import Image

    values = rng.choice([0, 128, 255, 127, 1], size=(13, 17)).astype(np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(values).save(path)
    m = load_mask(path)
    expected = [[v > 127 for v in row] for row in values.tolist()]
    assert m.cells.tolist() == expected


def test_plain_and_raw_pgm(tmp_path):
    plain = tmp_path / "p2.pgm"
    plain.write_text("P2\n3 2\n255\n0 128 255\n255 0 10\n")
    raw = tmp_path / "p5.pgm"
    raw.write_bytes(b"P5\n3 2\n255\n" + bytes([0, 128, 255, 255, 0, 10]))
    for p in (plain, raw):
        assert load_mask(p).cells.tolist() == [[False, True, True], [True, False, False]]


def test_custom_threshold():
    grid = np.array([[10, 60, 200]])
    assert load_mask(grid, threshold=50).cells.tolist() == [[False, True, True]]


def test_grid_round_trip(tmp_path, rng):
    m = random_blob(rng, (7, 9))
    path = tmp_path / "m.grid"
    save_grid(m, path)
    assert load_mask(path) == m
    assert path.read_text().splitlines()[0] == "9 7"


@pytest.mark.parametrize("name, body", [
    ("bad.grid", "3 2\n0 1 0\n"),
    ("bad2.grid", "2 1\n0 7\n"),
    ("zero.grid", "0 0\n"),
    ("junk.png", "not an image"),
])
def test_bad_files(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(body)
    with pytest.raises(MaskError):
        load_mask(path)


def test_missing_and_unsupported(tmp_path):
    with pytest.raises(MaskError):
        load_mask(tmp_path / "nope.pgm")
    other = tmp_path / "x.bmp"
    other.write_bytes(b"BM")
    with pytest.raises(MaskError):
        load_mask(other)


def test_zero_dimension_grid():
    with pytest.raises(MaskError):
        BinaryMask(np.zeros((0, 4), bool))


def test_mask_is_immutable():
    m = BinaryMask(np.ones((2, 2), bool))
    with pytest.raises(ValueError):
        m.cells[0, 0] = False


# -- extract_contour ----------------------------------------------------------

def test_block_contour_excludes_interior():
    cells = np.zeros((5, 5), bool)
    cells[1:4, 1:4] = True
    contour = extract_contour(BinaryMask(cells))
    assert len(contour) == 8
    assert _as_cells(contour) == brute_boundary(cells)
    assert (2, 2) not in _as_cells(contour)


def test_single_pixel_contour():
    cells = np.zeros((4, 4), bool)
    cells[2, 1] = True
    contour = extract_contour(BinaryMask(cells))
    assert contour.points.tolist() == [[1.0, 2.0]]


def test_largest_component_selected():
    cells = np.zeros((10, 12), bool)
    cells[1:4, 1:5] = True  # 12 cells
    cells[7:8, 8:11] = True  # 3 cells
    comps = brute_components(cells)
    big = max(comps, key=len)
    assert len(big) == 12
    got = _as_cells(extract_contour(BinaryMask(cells)))
    assert got <= {(c, r) for r, c in big}


def test_tie_goes_to_first_component():
    cells = np.zeros((6, 6), bool)
    cells[4, 4:6] = True
    cells[0, 0:2] = True
    got = _as_cells(extract_contour(BinaryMask(cells)))
    assert got == {(0, 0), (1, 0)}


def test_empty_mask_raises():
    with pytest.raises(EmptyMaskError):
        extract_contour(BinaryMask(np.zeros((3, 3), bool)))


@pytest.mark.parametrize("w, h", [(2, 2), (2, 7), (9, 3), (30, 11)])
def test_rectangle_perimeter_count(w, h):
    cells = np.zeros((h + 4, w + 4), bool)
    cells[2:2 + h, 2:2 + w] = True
    assert len(extract_contour(BinaryMask(cells))) == 2 * w + 2 * h - 4


def test_contour_is_clockwise_closed_loop():
    cells = np.zeros((20, 20), bool)
    cells[3:15, 4:17] = True
    pts = extract_contour(BinaryMask(cells)).points
    # steps between consecutive points are 8-neighbour moves, loop closes
    steps = np.abs(np.diff(np.vstack([pts, pts[:1]]), axis=0)).max(axis=1)
    assert steps.max() == 1
    x, y = pts[:, 0], pts[:, 1]
    shoelace = np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)
    # clockwise on a y-down screen is positive in (x, y) numbers
    assert shoelace > 0


@settings(max_examples=60, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 14), st.integers(1, 14))))
def test_contour_properties(cells):
    mask = BinaryMask(cells)
    if mask.foreground_count() == 0:
        with pytest.raises(EmptyMaskError):
            extract_contour(mask)
        return
    contour = extract_contour(mask)
    got = _as_cells(contour)
    assert len(got) == len(contour) >= 1
    assert got <= brute_boundary(cells)
    for x, y in contour:
        assert contains(mask, (x, y))
    # idempotent on equal content
    assert extract_contour(BinaryMask(cells.copy())) == contour


@settings(max_examples=40, deadline=None)
@given(arrays(bool, st.tuples(st.integers(3, 14), st.integers(3, 14))))
def test_hole_free_component_boundary_fully_traced(cells):
    """Without holes, the trace reaches every boundary cell of the component."""
    from scipy import ndimage

    comps = brute_components(cells)
    if not comps:
        return
    big = max(comps, key=len)
    comp = np.zeros_like(cells)
    for r, c in big:
        comp[r, c] = True
    if not np.array_equal(ndimage.binary_fill_holes(comp), comp):
        return
    # skip ties where a different component of equal size could win
    if sum(len(c) == len(big) for c in comps) > 1:
        return
    got = _as_cells(extract_contour(BinaryMask(cells)))
    assert got == brute_boundary(comp)


# -- contains -----------------------------------------------------------------

def test_contains_full_mask():
    m = BinaryMask(np.ones((5, 5), bool))
    assert contains(m, (2.4, 3.6))


def test_contains_out_of_bounds():
    m = BinaryMask(np.ones((5, 5), bool))
    assert not contains(m, (-1, 0))
    assert not contains(m, (0, 5.2))
    assert not contains(m, (float("nan"), 1))


def test_contains_checkerboard():
    cells = (np.add.outer(np.arange(6), np.arange(6)) % 2 == 0)
    m = BinaryMask(cells)
    for r in range(6):
        for c in range(6):
            assert contains(m, (c, r)) == bool(cells[r, c])
    assert contains(m, (0.0, 0.0)) and not contains(m, (1.0, 0.0))


def test_contains_many_agrees(rng):
    m = random_blob(rng, (12, 15))
    pts = rng.uniform(-2, 17, size=(500, 2))
    assert contains_many(m, pts).tolist() == [contains(m, p) for p in pts]
