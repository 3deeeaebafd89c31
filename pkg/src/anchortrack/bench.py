"""Evaluation metrics, synthetic sequence generation, and sequence I/O.

Metrics follow the one-pass protocol: a precision curve over center-error
thresholds 0..50 px (reported at 20 px) and a success curve over overlap
thresholds 0..1 in steps of 0.05 (reported as the mean, i.e. the AUC).

The synthetic generator renders a seeded high-contrast checkered rectangle
over a low-contrast textured background with scripted translation, scale,
occlusion, intensity gain, noise, and blur, so tracker behavior can be
tested against exact ground truth without any external dataset.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import BoundingBox, Frame, center_error, iou

PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)
SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 21)

GroundTruth = list[BoundingBox]


class LengthMismatch(ValueError):
    """Result and ground-truth sequences have different lengths."""


class MissingFrames(FileNotFoundError):
    """A sequence directory contains no readable frames."""


class ParseError(ValueError):
    """A data file line could not be parsed; the message names the line."""


class SpecInvalid(ValueError):
    """A synthetic-sequence spec is internally inconsistent."""


@dataclass(frozen=True, eq=False)
class EvalCurves:
    precision: np.ndarray       # 51 values, thresholds 0..50 px
    success: np.ndarray         # 21 values, thresholds 0..1 step 0.05
    precision_at_20: float
    auc: float


def precision_curve(results: GroundTruth, gt: GroundTruth) -> np.ndarray:
    """Fraction of frames with center error <= t, for t = 0..50 px."""
    if len(results) != len(gt):
        raise LengthMismatch(f"{len(results)} results vs {len(gt)} ground-truth boxes")
    errors = np.array([center_error(r, g) for r, g in zip(results, gt)])
    return (errors[None, :] <= PRECISION_THRESHOLDS[:, None]).mean(axis=1)


def success_auc(results: GroundTruth, gt: GroundTruth) -> tuple[np.ndarray, float]:
    """Fraction of frames with overlap > theta for each threshold, plus the mean."""
    if len(results) != len(gt):
        raise LengthMismatch(f"{len(results)} results vs {len(gt)} ground-truth boxes")
    overlaps = np.array([iou(r, g) for r, g in zip(results, gt)])
    success = (overlaps[None, :] > SUCCESS_THRESHOLDS[:, None]).mean(axis=1)
    return success, float(success.mean())


def evaluate(results: GroundTruth, gt: GroundTruth) -> EvalCurves:
    precision = precision_curve(results, gt)
    success, auc = success_auc(results, gt)
    return EvalCurves(
        precision=precision,
        success=success,
        precision_at_20=float(precision[20]),
        auc=auc,
    )


# ---------------------------------------------------------------------------
# Synthetic sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthSpec:
    frame_size: tuple[int, int]                 # (width, height)
    object_size: tuple[float, float]            # initial (width, height)
    start_center: tuple[float, float]
    seed: int
    translations: tuple                          # per-frame (dx, dy)
    scales: tuple                                # per-frame multiplicative factor
    occluders: tuple                             # per-frame BoundingBox or None
    gains: tuple                                 # per-frame global intensity gain
    noise_sigma: float = 0.0
    blur: int = 0                                # box-blur kernel side; <=1 disables

    @property
    def n_frames(self) -> int:
        return len(self.translations)

    def validate(self) -> None:
        n = self.n_frames
        if n < 1:
            raise SpecInvalid("need at least one frame")
        for name in ("scales", "occluders", "gains"):
            if len(getattr(self, name)) != n:
                raise SpecInvalid(f"{name} has {len(getattr(self, name))} entries for {n} frames")
        if min(self.frame_size) < 16:
            raise SpecInvalid("frame sides must be >= 16 px")
        if min(self.object_size) <= 0:
            raise SpecInvalid("object size must be positive")
        if self.noise_sigma < 0:
            raise SpecInvalid("noise_sigma must be >= 0")


def _checker_texture(rng: np.random.Generator, object_size) -> np.ndarray:
    """Per-cell colors of a jittered checkerboard; high contrast at junctions."""
    ncells = max(3, int(round(min(object_size) / 8.0)))
    ci, cj = np.mgrid[0:ncells, 0:ncells]
    base = np.where(((ci + cj) % 2 == 0)[..., None], 235.0, 20.0)
    jitter = rng.uniform(-20.0, 20.0, size=(ncells, ncells, 3))
    return np.clip(base + jitter, 0.0, 255.0)


def _value_noise_background(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    """Smooth low-contrast color texture from a bilinearly upsampled coarse grid."""
    cell = 16
    gw = width // cell + 2
    gh = height // cell + 2
    grid = rng.uniform(90.0, 130.0, size=(gh, gw, 3))
    xs = np.arange(width) / cell
    ys = np.arange(height) / cell
    x0 = xs.astype(np.int64)
    y0 = ys.astype(np.int64)
    tx = (xs - x0)[None, :, None]
    ty = (ys - y0)[:, None, None]
    top = (1 - tx) * grid[y0[:, None], x0[None, :]] + tx * grid[y0[:, None], x0[None, :] + 1]
    bot = (1 - tx) * grid[y0[:, None] + 1, x0[None, :]] + tx * grid[y0[:, None] + 1, x0[None, :] + 1]
    return (1 - ty) * top + ty * bot


def _paint_object(img: np.ndarray, texture: np.ndarray, box: BoundingBox) -> None:
    """Overlay the checker texture on every pixel whose center lies in the box."""
    h, w = img.shape[:2]
    ix0 = max(0, int(math.ceil(box.x0)))
    ix1 = min(w - 1, int(math.ceil(box.x1)) - 1)
    iy0 = max(0, int(math.ceil(box.y0)))
    iy1 = min(h - 1, int(math.ceil(box.y1)) - 1)
    if ix0 > ix1 or iy0 > iy1:
        return
    ncells = texture.shape[0]
    us = (np.arange(ix0, ix1 + 1) - box.x0) / box.width
    vs = (np.arange(iy0, iy1 + 1) - box.y0) / box.height
    cu = np.clip((us * ncells).astype(np.int64), 0, ncells - 1)
    cv = np.clip((vs * ncells).astype(np.int64), 0, ncells - 1)
    img[iy0 : iy1 + 1, ix0 : ix1 + 1] = texture[cv[:, None], cu[None, :]]


def _paint_rect(img: np.ndarray, box: BoundingBox, color) -> None:
    h, w = img.shape[:2]
    ix0 = max(0, int(math.ceil(box.x0)))
    ix1 = min(w - 1, int(math.ceil(box.x1)) - 1)
    iy0 = max(0, int(math.ceil(box.y0)))
    iy1 = min(h - 1, int(math.ceil(box.y1)) - 1)
    if ix0 > ix1 or iy0 > iy1:
        return
    img[iy0 : iy1 + 1, ix0 : ix1 + 1] = np.asarray(color, dtype=np.float64)


def _box_blur_axis(a: np.ndarray, k: int, axis: int) -> np.ndarray:
    pad_width = [(0, 0)] * a.ndim
    pad_width[axis] = (k // 2, k - 1 - k // 2)
    p = np.pad(a, pad_width, mode="edge")
    c = np.cumsum(p, axis=axis, dtype=np.float64)
    zero_shape = list(c.shape)
    zero_shape[axis] = 1
    c = np.concatenate([np.zeros(zero_shape), c], axis=axis)
    hi = [slice(None)] * a.ndim
    lo = [slice(None)] * a.ndim
    hi[axis] = slice(k, None)
    lo[axis] = slice(0, -k)
    return (c[tuple(hi)] - c[tuple(lo)]) / k


def box_blur(img: np.ndarray, k: int) -> np.ndarray:
    if k <= 1:
        return img
    return _box_blur_axis(_box_blur_axis(img, k, 0), k, 1)


OCCLUDER_COLOR = (70.0, 70.0, 70.0)


def generate(spec: SynthSpec) -> tuple[list[Frame], GroundTruth]:
    """Render the scripted sequence; ground truth is exact by construction."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    width, height = spec.frame_size
    texture = _checker_texture(rng, spec.object_size)
    background = _value_noise_background(rng, width, height)

    frames: list[Frame] = []
    gt: GroundTruth = []
    center = np.array(spec.start_center, dtype=np.float64)
    size = np.array(spec.object_size, dtype=np.float64)
    for t in range(spec.n_frames):
        center = center + np.asarray(spec.translations[t], dtype=np.float64)
        size = size * float(spec.scales[t])
        box = BoundingBox(center=center.copy(), width=size[0], height=size[1])

        img = background.copy()
        _paint_object(img, texture, box)
        if spec.occluders[t] is not None:
            _paint_rect(img, spec.occluders[t], OCCLUDER_COLOR)
        img *= float(spec.gains[t])
        if spec.noise_sigma > 0:
            img += rng.normal(0.0, spec.noise_sigma, size=img.shape)
        if spec.blur > 1:
            img = box_blur(img, spec.blur)
        rgb = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        frames.append(Frame.from_rgb(rgb, index=t))
        gt.append(box)
    return frames, gt


def _static(n: int):
    return tuple((0.0, 0.0) for _ in range(n))


def _no_scale(n: int):
    return tuple(1.0 for _ in range(n))


def _no_occluder(n: int):
    return tuple(None for _ in range(n))


def _unit_gain(n: int):
    return tuple(1.0 for _ in range(n))


def preset_translation() -> SynthSpec:
    n = 100
    return SynthSpec(
        frame_size=(320, 240), object_size=(48.0, 48.0), start_center=(60.0, 120.0),
        seed=11,
        translations=((0.0, 0.0),) + ((2.0, 0.0),) * (n - 1),
        scales=_no_scale(n), occluders=_no_occluder(n), gains=_unit_gain(n),
        noise_sigma=2.0,
    )


def preset_fast_motion() -> SynthSpec:
    n = 40
    steps = [(0.0, 0.0)]
    for t in range(1, n):
        direction = 1.0 if (t - 1) // 10 % 2 == 0 else -1.0
        steps.append((25.0 * direction, 0.0))
    return SynthSpec(
        frame_size=(480, 240), object_size=(48.0, 48.0), start_center=(110.0, 120.0),
        seed=23,
        translations=tuple(steps),
        scales=_no_scale(n), occluders=_no_occluder(n), gains=_unit_gain(n),
        noise_sigma=1.5,
    )


def preset_scale_ramp() -> SynthSpec:
    n = 100
    return SynthSpec(
        frame_size=(320, 240), object_size=(64.0, 64.0), start_center=(160.0, 120.0),
        seed=31,
        translations=_static(n),
        scales=(1.0,) + (1.005,) * (n - 1),
        occluders=_no_occluder(n), gains=_unit_gain(n),
        noise_sigma=1.0,
    )


def preset_occlusion() -> SynthSpec:
    n = 101
    steps = [(0.0, 0.0)] + [(1.0, 0.0)] * 30 + [(0.0, 0.0)] * (n - 31)
    hidden_center = (100.0 + 30.0, 120.0)
    occluders = [None] * n
    # Full-height band: its vertical edges carry no corner response, so a
    # fully covered object yields zero matches (the hold-state scenario).
    for t in range(40, 61):
        occluders[t] = BoundingBox(center=np.array(hidden_center), width=96.0, height=600.0)
    return SynthSpec(
        frame_size=(320, 240), object_size=(48.0, 48.0), start_center=(100.0, 120.0),
        seed=47,
        translations=tuple(steps),
        scales=_no_scale(n), occluders=tuple(occluders), gains=_unit_gain(n),
        noise_sigma=1.5,
    )


def preset_blur() -> SynthSpec:
    n = 60
    return SynthSpec(
        frame_size=(320, 240), object_size=(48.0, 48.0), start_center=(70.0, 120.0),
        seed=59,
        translations=((0.0, 0.0),) + ((2.0, 0.0),) * (n - 1),
        scales=_no_scale(n), occluders=_no_occluder(n), gains=_unit_gain(n),
        noise_sigma=1.0, blur=3,
    )


def preset_gain_ramp() -> SynthSpec:
    n = 60
    gains = tuple(1.0 + 0.25 * t / (n - 1) for t in range(n))
    return SynthSpec(
        frame_size=(320, 240), object_size=(48.0, 48.0), start_center=(160.0, 120.0),
        seed=67,
        translations=_static(n),
        scales=_no_scale(n), occluders=_no_occluder(n), gains=gains,
        noise_sigma=1.0,
    )


PRESETS = {
    "translation": preset_translation,
    "fast_motion": preset_fast_motion,
    "scale_ramp": preset_scale_ramp,
    "occlusion": preset_occlusion,
    "blur": preset_blur,
    "gain_ramp": preset_gain_ramp,
}


# ---------------------------------------------------------------------------
# Sequence and ground-truth I/O
# ---------------------------------------------------------------------------

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".ppm", ".bmp"}


def load_sequence(directory) -> list[Frame]:
    """Frames from a directory of numerically named images, in numeric order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFrames(f"sequence directory not found: {directory}")
    entries = []
    for path in directory.iterdir():
        if path.suffix.lower() not in _IMAGE_SUFFIXES:
            continue
        digits = re.findall(r"\d+", path.stem)
        key = int(digits[-1]) if digits else -1
        entries.append((key, path.name, path))
    if not entries:
        raise MissingFrames(f"no image frames in {directory}")
    entries.sort()
    frames = []
    for index, (_, _, path) in enumerate(entries):
        rgb = np.asarray(Image.open(path).convert("RGB"))
        frames.append(Frame.from_rgb(rgb, index=index))
    return frames


def parse_gt_line(line: str, lineno: int) -> BoundingBox:
    parts = [p for p in re.split(r"[,\t]", line.strip()) if p != ""]
    if len(parts) != 4:
        raise ParseError(f"line {lineno}: expected 4 comma/tab-separated values, got {line!r}")
    try:
        x, y, w, h = (float(p) for p in parts)
    except ValueError:
        raise ParseError(f"line {lineno}: non-numeric field in {line!r}") from None
    if w <= 0 or h <= 0:
        raise ParseError(f"line {lineno}: non-positive box size in {line!r}")
    # Files use a 1-based pixel origin.
    return BoundingBox.from_corner(x - 1.0, y - 1.0, w, h)


def load_gt(path) -> GroundTruth:
    boxes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            boxes.append(parse_gt_line(line, lineno))
    return boxes


def gt_to_text(gt: GroundTruth) -> str:
    """Full-precision 1-based corner-form lines, the inverse of load_gt."""
    lines = []
    for box in gt:
        x0, y0, w, h = box.corner_form()
        lines.append(f"{x0 + 1.0!r},{y0 + 1.0!r},{w!r},{h!r}")
    return "\n".join(lines) + "\n"


def save_gt(path, gt: GroundTruth) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(gt_to_text(gt))


def save_frames(directory, frames: list[Frame]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for frame in frames:
        Image.fromarray(frame.rgb).save(directory / f"{frame.index:04d}.png")


RESULT_HEADER = "frame_index,x,y,w,h,status,matched_count,gate_passed,applied_scale"


def format_result_line(result) -> str:
    x0, y0, w, h = result.box.corner_form()
    return ",".join((
        str(result.frame_index),
        repr(x0), repr(y0), repr(w), repr(h),
        result.status.value,
        str(result.matched_count),
        "true" if result.gate_passed else "false",
        repr(result.applied_scale),
    ))


def results_to_csv(results) -> str:
    lines = [RESULT_HEADER]
    lines.extend(format_result_line(r) for r in results)
    return "\n".join(lines) + "\n"


def save_results(path, results) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(results_to_csv(results))


def load_results(path):
    """Parse a results CSV back into FrameResult records."""
    from .pipeline import FrameResult, TrackStatus

    results = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line == RESULT_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 9:
                raise ParseError(f"line {lineno}: expected 9 fields, got {len(parts)}")
            try:
                frame_index = int(parts[0])
                x0, y0, w, h = (float(p) for p in parts[1:5])
                status = TrackStatus(parts[5])
                matched_count = int(parts[6])
                gate_passed = {"true": True, "false": False}[parts[7]]
                applied_scale = float(parts[8])
            except (ValueError, KeyError):
                raise ParseError(f"line {lineno}: malformed result row {line!r}") from None
            results.append(FrameResult(
                frame_index=frame_index,
                box=BoundingBox.from_corner(x0, y0, w, h),
                status=status,
                matched_count=matched_count,
                gate_passed=gate_passed,
                applied_scale=applied_scale,
            ))
    if not results:
        raise ParseError("results file contains no rows")
    return results


def metrics_to_csv(curves: EvalCurves) -> str:
    lines = ["metric,threshold,value"]
    for t, v in zip(PRECISION_THRESHOLDS, curves.precision):
        lines.append(f"precision,{t:.0f},{float(v)!r}")
    for t, v in zip(SUCCESS_THRESHOLDS, curves.success):
        lines.append(f"success,{t:.2f},{float(v)!r}")
    lines.append(f"precision_at_20,,{float(curves.precision_at_20)!r}")
    lines.append(f"auc,,{float(curves.auc)!r}")
    return "\n".join(lines) + "\n"


def save_metrics(path, curves: EvalCurves) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(metrics_to_csv(curves))
