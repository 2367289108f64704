"""Report figures for tracked sequences."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps the PNG bytes stable between runs
_PNG_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_overlap(report, path) -> Path:
    """Per-frame overlap with failures and re-initialisations marked."""
    frames = range(report.frames)
    overlap = [math.nan if v is None else v for v in report.per_frame_overlap]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(frames, overlap, "-", color="tab:green", lw=1.2, label="overlap")
    for i, f in enumerate(report.failure_frames):
        ax.axvline(f, color="tab:red", lw=0.8, ls="--", label="failure" if i == 0 else None)
    for i, f in enumerate(report.reinit_frames):
        ax.axvline(f, color="tab:blue", lw=0.8, ls=":", label="re-init" if i == 0 else None)
    ax.axhline(report.accuracy, color="0.4", lw=0.8, label=f"accuracy {report.accuracy:.3f}")
    ax.set_xlim(-0.5, max(report.frames - 0.5, 0.5))
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("frame")
    ax.set_ylabel("IoU")
    ax.legend(loc="lower left", fontsize=8, frameon=False)
    return _save(fig, Path(path))


def plot_angles(results, path) -> Path:
    """Box angle used per frame, in degrees."""
    angles = [math.degrees(r.angle_used) for r in results]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(range(len(angles)), angles, ".-", color="tab:purple", lw=1.0, ms=3)
    ax.set_ylim(-5, 185)
    ax.set_xlabel("frame")
    ax.set_ylabel("angle [deg]")
    return _save(fig, Path(path))
