"""Command-line interface: track a sequence, evaluate results, or synthesize one.

Exit codes: 0 success, 1 usage error, 2 data error (bad files, failed
initialization, mismatched inputs). Output files are written atomically.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from . import bench, pipeline
from .anchor_model import InitializationFailure
from .bench import LengthMismatch, MissingFrames, ParseError, SpecInvalid
from .core import BoundingBox, ConfigError, TrackerConfig, load_config

USAGE_ERROR = 1
DATA_ERROR = 2

_DATA_ERRORS = (
    ConfigError,
    InitializationFailure,
    LengthMismatch,
    MissingFrames,
    ParseError,
    SpecInvalid,
    OSError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_save_image(path: Path, array: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".png")
    os.close(fd)
    try:
        Image.fromarray(array).save(tmp, format="PNG")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_init_box(text: str) -> BoundingBox:
    try:
        return bench.parse_gt_line(text, lineno=0)
    except ParseError:
        raise ParseError(
            f"--init expects 'x,y,w,h' (1-based corner form, like a ground-truth line), got {text!r}"
        ) from None


def _annotate(frame, box: BoundingBox) -> np.ndarray:
    out = frame.rgb.copy()
    h, w = out.shape[:2]
    x0 = int(np.clip(round(box.x0), 0, w - 1))
    x1 = int(np.clip(round(box.x1), 0, w - 1))
    y0 = int(np.clip(round(box.y0), 0, h - 1))
    y1 = int(np.clip(round(box.y1), 0, h - 1))
    color = (255, 0, 0)
    out[y0 : y0 + 2, x0 : x1 + 1] = color
    out[max(0, y1 - 1) : y1 + 1, x0 : x1 + 1] = color
    out[y0 : y1 + 1, x0 : x0 + 2] = color
    out[y0 : y1 + 1, max(0, x1 - 1) : x1 + 1] = color
    return out


def _heatmap_image(sm) -> np.ndarray:
    peak = float(sm.values.max())
    if peak <= 0:
        return np.zeros(sm.values.shape, dtype=np.uint8)
    return np.rint(sm.values / peak * 255.0).astype(np.uint8)


def _cmd_track(args) -> int:
    cfg = load_config(args.config) if args.config else TrackerConfig()
    init_box = _parse_init_box(args.init)
    frames = bench.load_sequence(args.seq)
    out_dir = Path(args.out)

    results = []
    gate_rows = []
    state = None
    for frame in frames:
        if state is None:
            state = pipeline.initialize(frame, init_box, cfg)
            result = pipeline.FrameResult(
                frame_index=frame.index, box=init_box, status=pipeline.TrackStatus.TRACKING,
                matched_count=len(state.model.anchors), gate_passed=True, applied_scale=1.0,
            )
            trace = {"score_matrix": None, "gate_scores": None}
        else:
            trace = {}
            result = pipeline.step(state, frame, trace=trace)
        results.append(result)
        if args.dump_gate:
            scores = trace.get("gate_scores")
            if scores is None:
                gate_rows.append(f"{frame.index},,")
            else:
                gate_rows.append(f"{frame.index},{scores[0]!r},{scores[1]!r}")
        if args.dump_heatmaps and trace.get("score_matrix") is not None:
            _atomic_save_image(out_dir / "heatmaps" / f"{frame.index:04d}.png",
                               _heatmap_image(trace["score_matrix"]))
        if args.annotate:
            _atomic_save_image(out_dir / "annotated" / f"{frame.index:04d}.png",
                               _annotate(frame, result.box))

    _atomic_write_text(out_dir / "results.csv", bench.results_to_csv(results))
    if args.dump_gate:
        text = "frame_index,lbsp_similarity,hist_distance\n" + "\n".join(gate_rows) + "\n"
        _atomic_write_text(out_dir / "gate.csv", text)
    print(f"tracked {len(results)} frames -> {out_dir / 'results.csv'}")
    return 0


def _cmd_eval(args) -> int:
    results = bench.load_results(args.results)
    gt = bench.load_gt(args.gt)
    curves = bench.evaluate([r.box for r in results], gt)
    _atomic_write_text(Path(args.out), bench.metrics_to_csv(curves))
    print(f"precision@20 = {curves.precision_at_20:.4f}  auc = {curves.auc:.4f} -> {args.out}")
    return 0


def _cmd_synth(args) -> int:
    if args.preset:
        spec = bench.PRESETS[args.preset]()
    else:
        spec = _load_synth_spec(args.spec)
    frames, gt = bench.generate(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for frame in frames:
        _atomic_save_image(out_dir / f"{frame.index:04d}.png", frame.rgb)
    _atomic_write_text(out_dir / "groundtruth.txt", bench.gt_to_text(gt))
    x0, y0, w, h = gt[0].corner_form()
    print(f"wrote {len(frames)} frames to {out_dir}")
    print(f"init box (for track --init): {x0 + 1.0:g},{y0 + 1.0:g},{w:g},{h:g}")
    return 0


def _load_synth_spec(path) -> bench.SynthSpec:
    """Minimal spec file: `key = value` lines driving constant-rate scripts."""
    values = {
        "frames": 60, "frame_width": 320, "frame_height": 240,
        "object_width": 48.0, "object_height": 48.0,
        "start_x": 80.0, "start_y": 120.0, "seed": 7,
        "dx": 0.0, "dy": 0.0, "scale_step": 1.0, "gain_step": 0.0,
        "noise_sigma": 1.0, "blur": 0,
        "occlude_from": -1, "occlude_to": -1, "occluder_margin": 24.0,
    }
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, raw = (part.strip() for part in body.split("=", 1))
            if key not in values:
                raise ParseError(f"line {lineno}: unknown synth key {key!r}")
            kind = type(values[key])
            try:
                values[key] = kind(raw)
            except ValueError:
                raise ParseError(f"line {lineno}: cannot parse {raw!r} as {kind.__name__}") from None

    n = int(values["frames"])
    translations = [(0.0, 0.0)] + [(values["dx"], values["dy"])] * (n - 1)
    scales = [1.0] + [values["scale_step"]] * (n - 1)
    gains = [1.0 + values["gain_step"] * t for t in range(n)]
    occluders: list = [None] * n
    lo, hi = int(values["occlude_from"]), int(values["occlude_to"])
    if 0 <= lo <= hi < n:
        center = np.array([values["start_x"], values["start_y"]])
        for t in range(lo, hi + 1):
            center_t = center + t * np.array([values["dx"], values["dy"]])
            occluders[t] = BoundingBox(
                center=center_t,
                width=values["object_width"] + 2 * values["occluder_margin"],
                height=values["object_height"] + 2 * values["occluder_margin"],
            )
    return bench.SynthSpec(
        frame_size=(int(values["frame_width"]), int(values["frame_height"])),
        object_size=(values["object_width"], values["object_height"]),
        start_center=(values["start_x"], values["start_y"]),
        seed=int(values["seed"]),
        translations=tuple(translations),
        scales=tuple(scales),
        occluders=tuple(occluders),
        gains=tuple(gains),
        noise_sigma=values["noise_sigma"],
        blur=int(values["blur"]),
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="anchortrack",
                     description="Anchor-point voting tracker: track, evaluate, synthesize.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="track a sequence directory")
    p_track.add_argument("--seq", required=True, help="directory of numbered frames")
    p_track.add_argument("--init", required=True,
                         help="initial box 'x,y,w,h', 1-based corner form")
    p_track.add_argument("--config", help="tracker config file (key = value lines)")
    p_track.add_argument("--out", required=True, help="output directory")
    p_track.add_argument("--dump-heatmaps", action="store_true",
                         help="write per-frame vote heatmaps as PNGs")
    p_track.add_argument("--dump-gate", action="store_true",
                         help="write per-frame gate scores to gate.csv")
    p_track.add_argument("--annotate", action="store_true",
                         help="write frames with the tracked box drawn in")
    p_track.set_defaults(func=_cmd_track)

    p_eval = sub.add_parser("eval", help="score results.csv against ground truth")
    p_eval.add_argument("--results", required=True, help="results.csv from track")
    p_eval.add_argument("--gt", required=True, help="ground-truth file, one x,y,w,h per line")
    p_eval.add_argument("--out", required=True, help="metrics.csv output path")
    p_eval.set_defaults(func=_cmd_eval)

    p_synth = sub.add_parser("synth", help="render a synthetic sequence")
    group = p_synth.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=sorted(bench.PRESETS),
                       help="named scenario")
    group.add_argument("--spec", help="synthetic-spec file (key = value lines)")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"anchortrack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DATA_ERROR


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
