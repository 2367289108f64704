import numpy as np
import pytest
from scipy import ndimage

from ellipsebox.mask import BinaryMask


@pytest.fixture
def rng():
    return np.random.default_rng(20191021)


def brute_boundary(cells):
    """Foreground cells with a background or out-of-bounds 4-neighbour."""
    h, w = cells.shape
    out = set()
    for r in range(h):
        for c in range(w):
            if not cells[r, c]:
                continue
            for dr, dc in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                rr, cc = r + dr, c + dc
                if not (0 <= rr < h and 0 <= cc < w) or not cells[rr, cc]:
                    out.add((c, r))
                    break
    return out


def brute_components(cells):
    """8-connected components by flood fill, as lists of (row, col)."""
    h, w = cells.shape
    seen = np.zeros_like(cells, dtype=bool)
    comps = []
    for r in range(h):
        for c in range(w):
            if cells[r, c] and not seen[r, c]:
                stack, comp = [(r, c)], []
                seen[r, c] = True
                while stack:
                    y, x = stack.pop()
                    comp.append((y, x))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            yy, xx = y + dy, x + dx
                            if 0 <= yy < h and 0 <= xx < w and cells[yy, xx] and not seen[yy, xx]:
                                seen[yy, xx] = True
                                stack.append((yy, xx))
                comps.append(comp)
    return comps


def random_blob(rng, shape=(40, 40), fill=0.45, smooth=1):
    cells = rng.random(shape) < fill
    cells = ndimage.binary_opening(cells, iterations=smooth)
    return BinaryMask(cells)


def write_sequence(directory, count=10, seed=0, noise=0.05):
    """Zero-padded PGM frames of a noisy elongated rectangle plus its ground truth."""
    import math

    from ellipsebox.evaluation import format_region
    from ellipsebox.mask import save_pgm
    from ellipsebox.synthetic import boundary_noise, rotated_rectangle

    rng = np.random.default_rng(seed)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(count):
        angle = math.radians(10 + 9 * i)
        length = 60 + 10 * math.sin(i)
        mask, poly = rotated_rectangle(length, length / 3, angle, center=(60 + i, 64 - i / 2))
        if noise:
            mask = boundary_noise(mask, noise, rng)
        save_pgm(mask, directory / f"{i:04d}.pgm")
        lines.append(format_region(poly))
    gt = directory.parent / f"{directory.name}_groundtruth.txt"
    gt.write_text("\n".join(lines) + "\n")
    return gt
