"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 empty mask, 4 sequence mismatch.
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .ellipse import ConicCoefficients
from .evaluation import (
    DEFAULT_BURN_IN,
    format_region,
    load_ground_truth,
    supervised_run,
)
from .mask import DEFAULT_THRESHOLD, MaskError, load_mask
from .pipeline import BoxResult, Fallback, PipelineConfig, estimate_box, track_sequence
from .refine import DEFAULT_FACTOR, RefineConfig

log = logging.getLogger("ellipsebox")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_MISMATCH = 4

SCHEMA = 1

_BOX_METHODS = {"ellipse": "ellipse_intersection", "minrect": "minrect", "minmax": "minmax"}
_MASK_SUFFIXES = (".pgm", ".png", ".grid")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("box estimation")
    g.add_argument("--box-method", choices=sorted(_BOX_METHODS), default="ellipse")
    g.add_argument("--angle-source", choices=("ellipse", "minrect"), default=None,
                   help="default: the box method's own angle")
    g.add_argument("--refine", action="store_true", help="shrink edges that barely touch the mask")
    g.add_argument("--factor", type=float, default=DEFAULT_FACTOR)
    g.add_argument("--refine-step", type=float, default=1.0, help="pixels per refinement move")
    g.add_argument("--max-shrink", type=float, default=0.5,
                   help="largest per-edge move as a fraction of the box dimension")
    g.add_argument("--freeze-alpha", action="store_true",
                   help="measure edge coverage against the original edge length")
    g.add_argument("--circular-theta-override", action="store_true",
                   help="force a vertical major axis on near-circular fits")
    g.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD,
                   help="8-bit values above this are foreground")


def config_from_args(args) -> PipelineConfig:
    try:
        return PipelineConfig(
            angle_source=args.angle_source,
            box_method=_BOX_METHODS[args.box_method],
            refine=args.refine,
            refine_cfg=RefineConfig(
                factor=args.factor,
                step=args.refine_step,
                max_shrink_fraction=args.max_shrink,
                freeze_alpha=args.freeze_alpha,
            ),
            circular_theta_override=args.circular_theta_override,
            mask_threshold=args.threshold,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def _load(path, threshold):
    try:
        return load_mask(path, threshold)
    except MaskError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def _conic_dict(conic: ConicCoefficients):
    return None if conic is None else conic._asdict()


def result_dict(result: BoxResult) -> dict:
    ell = result.ellipse
    return {
        "polygon": [float(v) for v in format_region(result.polygon.as_array()).split(",")],
        "fallback_applied": Fallback(result.fallback_applied).value,
        "angle_used": result.angle_used,
        "ellipse": None if ell is None else {
            "center": list(ell.center),
            "semi_major": ell.semi_major,
            "semi_minor": ell.semi_minor,
            "angle": ell.angle,
        },
        "conic": _conic_dict(result.conic),
    }


def cmd_fit(args) -> int:
    cfg = config_from_args(args)
    mask = _load(args.mask, cfg.mask_threshold)
    result = estimate_box(mask, cfg)
    if result.fallback_applied == Fallback.EMPTY_MASK and not args.allow_empty:
        raise CliError(f"{args.mask}: mask is empty (no target)", EXIT_EMPTY)
    if args.json:
        out = {"schema": SCHEMA, **result_dict(result), "timing_ms": result.elapsed_ms,
               "config": cfg.to_dict()}
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    print(format_region(result.polygon.as_array()))
    if args.dump_conic:
        print(json.dumps(_conic_dict(result.conic), sort_keys=True))
    return EXIT_OK


def expand_masks(pattern: str) -> list[str]:
    """Mask files named by a directory or glob pattern, sorted by name."""
    if os.path.isdir(pattern):
        files = [str(p) for p in Path(pattern).iterdir() if p.suffix.lower() in _MASK_SUFFIXES]
    else:
        files = glob.glob(pattern)
    return sorted(files)


def _write_atomic(path: Path, text: str | bytes) -> None:
    data = text.encode() if isinstance(text, str) else text
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_track(args) -> int:
    cfg = config_from_args(args)
    files = expand_masks(args.masks)
    if not files:
        raise CliError(f"no mask files match {args.masks!r}", EXIT_INPUT)
    masks = [_load(f, cfg.mask_threshold) for f in files]

    gt = None
    if args.ground_truth:
        try:
            gt = load_ground_truth(args.ground_truth)
        except (OSError, ValueError) as exc:
            raise CliError(f"{args.ground_truth}: {exc}", EXIT_INPUT) from exc
        if len(gt) != len(masks):
            raise CliError(
                f"{len(masks)} masks but {len(gt)} ground-truth frames", EXIT_MISMATCH
            )
    if args.burn_in < 0:
        raise CliError("--burn-in must be non-negative", EXIT_INPUT)

    try:
        results = track_sequence(masks, cfg)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from exc

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    polygons = [format_region(r.polygon.as_array()) for r in results]
    _write_atomic(out / "polygons.txt", "\n".join(polygons) + "\n")

    latencies = [r.elapsed_ms for r in results]
    timing = {
        "schema": SCHEMA,
        "mean_latency_ms": sum(latencies) / len(latencies),
        "per_frame_ms": latencies,
    }
    _write_atomic(out / "timing.json", json.dumps(timing, indent=2, sort_keys=True) + "\n")

    report = None
    if gt is not None:
        try:
            report = supervised_run([r.polygon for r in results], gt, burn_in=args.burn_in)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INPUT) from exc
        fallbacks = {f.value: 0 for f in Fallback}
        for r in results:
            fallbacks[Fallback(r.fallback_applied).value] += 1
        doc = {
            "schema": SCHEMA,
            **report.to_dict(),
            "fallbacks": fallbacks,
            "mask_files": [os.path.basename(f) for f in files],
            "config": cfg.to_dict(),
        }
        _write_atomic(out / "report.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")

    if not args.no_figures:
        from .plotting import plot_angles, plot_overlap

        plot_angles(results, out / "angles.png")
        if report is not None:
            plot_overlap(report, out / "overlap.png")

    if report is not None:
        log.info("accuracy %.4f, failures %d", report.accuracy, report.failures)
    return EXIT_OK


def _polygon_arg(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated polygon: {text!r}") from None
    if len(vals) != 8:
        raise argparse.ArgumentTypeError(f"expected 8 values, got {len(vals)}")
    return vals


def cmd_render(args) -> int:
    from .render import render_svg

    mask = _load(args.mask, args.threshold)
    svg = render_svg(mask, args.prediction or (), args.ground_truth or (), args.baseline or ())
    out = Path(args.output)
    try:
        _write_atomic(out, svg)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_INPUT) from exc
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellipsebox", description="Rotated bounding boxes from binary masks."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="box for a single mask")
    p.add_argument("mask")
    p.add_argument("--json", action="store_true", help="structured output")
    p.add_argument("--dump-conic", action="store_true", help="also print the fitted conic")
    p.add_argument("--allow-empty", action="store_true", help="empty mask is not an error")
    _add_config_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("track", help="boxes for a mask sequence, optionally scored")
    p.add_argument("masks", help="directory or glob pattern; frames in filename order")
    p.add_argument("-o", "--output-dir", required=True)
    p.add_argument("--ground-truth", help="VOT region file, one polygon per frame")
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN,
                   help="frames skipped after a failure")
    p.add_argument("--no-figures", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("render", help="SVG overlay of polygons on a mask")
    p.add_argument("mask")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--prediction", type=_polygon_arg, action="append")
    p.add_argument("--ground-truth", type=_polygon_arg, action="append")
    p.add_argument("--baseline", type=_polygon_arg, action="append")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ellipsebox: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
