"""Shared domain types, configuration, and box geometry.

Positions and centers are (x, y) pairs in pixel coordinates throughout the
package; numpy image indexing order [row, col] = [y, x] is converted at the
array access sites only.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

MIN_FRAME_SIDE = 16

# BT.601 luma weights.
_LUMA = np.array([0.299, 0.587, 0.114])


class ConfigError(ValueError):
    """Raised for malformed config files or invalid parameter combinations."""


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """8-bit luma from an (H, W, 3) uint8 array, rounded to nearest."""
    gray = np.rint(rgb.astype(np.float64) @ _LUMA)
    return gray.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class Frame:
    """A single RGB video frame with its derived gray channel."""

    rgb: np.ndarray
    gray: np.ndarray
    index: int

    @classmethod
    def from_rgb(cls, rgb: np.ndarray, index: int) -> "Frame":
        rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) rgb array, got {rgb.shape}")
        h, w = rgb.shape[:2]
        if w < MIN_FRAME_SIDE or h < MIN_FRAME_SIDE:
            raise ValueError(f"frame {w}x{h} below minimum {MIN_FRAME_SIDE}px side")
        return cls(rgb=rgb, gray=rgb_to_gray(rgb), index=index)

    @property
    def width(self) -> int:
        return self.rgb.shape[1]

    @property
    def height(self) -> int:
        return self.rgb.shape[0]


@dataclass(frozen=True, eq=False)
class BoundingBox:
    """Axis-aligned box stored as center + size; sub-pixel centers allowed.

    Corner form (x0, y0, w, h) is derived only at I/O boundaries.
    """

    center: np.ndarray
    width: float
    height: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))
        if self.center.shape != (2,):
            raise ValueError(f"center must be a 2-vector, got shape {self.center.shape}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"box size must be positive, got {self.width}x{self.height}")

    @classmethod
    def from_corner(cls, x0: float, y0: float, w: float, h: float) -> "BoundingBox":
        return cls(center=np.array([x0 + w / 2.0, y0 + h / 2.0]), width=w, height=h)

    @property
    def x0(self) -> float:
        return float(self.center[0]) - self.width / 2.0

    @property
    def y0(self) -> float:
        return float(self.center[1]) - self.height / 2.0

    @property
    def x1(self) -> float:
        return float(self.center[0]) + self.width / 2.0

    @property
    def y1(self) -> float:
        return float(self.center[1]) + self.height / 2.0

    @property
    def area(self) -> float:
        return self.width * self.height

    def corner_form(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.width, self.height)

    def contains(self, position: np.ndarray) -> bool:
        x, y = float(position[0]), float(position[1])
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0 when disjoint."""
    ix = min(a.x1, b.x1) - max(a.x0, b.x0)
    iy = min(a.y1, b.y1) - max(a.y0, b.y0)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def center_error(a: BoundingBox, b: BoundingBox) -> float:
    """Euclidean distance between box centers, pixels."""
    return float(np.linalg.norm(a.center - b.center))


@dataclass(frozen=True)
class TrackerConfig:
    """All tracker tunables.

    Every field is addressable by its snake-case name in the plain-text
    config format parsed by :func:`load_config`.
    """

    closeness_alpha: float = 0.005     # closeness falloff per pixel of prediction error
    st_eta: float = 5000.0             # short-term consistency scale, square pixels
    lt_init_floor: float = 0.5         # floor on the enrollment closeness
    lt_delta: float = 0.1              # long-term consistency adaptation rate
    lt_min: float = 0.1                # prune anchors below this long-term consistency
    ratio_test: float = 0.9            # nearest/second-nearest descriptor distance bar
    vote_sigma_rel: float = 0.05       # vote sigma as a fraction of sqrt(box area)
    vote_truncation: float = 3.0       # stamp radius in sigma units
    scale_period: int = 10             # frames between scale applications
    scale_clamp: float = 0.10          # max relative size change per application
    gate_lbsp_min: float = 0.75        # min binary-code similarity to allow update
    gate_hist_max: float = 0.30        # max histogram L2 distance to allow update
    lbsp_threshold: float = 30.0       # absolute intensity threshold, 0-255 scale
    hist_bins_per_channel: int = 8
    patch_norm_size: int = 32          # side of the size-normalized model patch
    max_anchors: int = 400
    descriptor_patch: int = 11         # side of the descriptor intensity patch
    scale_enabled: bool = True         # disable to run the fixed-size ablation

    def validate(self) -> None:
        if self.closeness_alpha <= 0:
            raise ConfigError("closeness_alpha must be > 0")
        if self.st_eta <= 0:
            raise ConfigError("st_eta must be > 0")
        if not 0 < self.lt_delta < 1:
            raise ConfigError("lt_delta must be in (0, 1)")
        if not 0 <= self.lt_min < self.lt_init_floor <= 1:
            raise ConfigError("need 0 <= lt_min < lt_init_floor <= 1")
        if not 0 < self.ratio_test < 1:
            raise ConfigError("ratio_test must be in (0, 1)")
        if self.scale_clamp <= 0:
            raise ConfigError("scale_clamp must be > 0")
        if self.vote_sigma_rel <= 0 or self.vote_truncation <= 0:
            raise ConfigError("vote_sigma_rel and vote_truncation must be > 0")
        if self.scale_period < 1:
            raise ConfigError("scale_period must be >= 1")
        if self.hist_bins_per_channel < 1:
            raise ConfigError("hist_bins_per_channel must be >= 1")
        if self.patch_norm_size < 5:
            raise ConfigError("patch_norm_size must be >= 5")
        if self.max_anchors < 1:
            raise ConfigError("max_anchors must be >= 1")
        if self.descriptor_patch < 3 or self.descriptor_patch % 2 == 0:
            raise ConfigError("descriptor_patch must be odd and >= 3")


def _parse_value(key: str, raw: str, kind: type, lineno: int) -> object:
    try:
        if kind is bool:
            token = raw.lower()
            if token in ("true", "1", "yes", "on"):
                return True
            if token in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: cannot parse {raw!r} as {kind.__name__} for key {key!r}"
        ) from None


def parse_config(text: str, base: TrackerConfig | None = None) -> TrackerConfig:
    """Parse `key = value` lines into a TrackerConfig.

    Blank lines are skipped and `#` starts a comment; unknown keys are an
    error. Values override the defaults (or `base` when given).
    """
    defaults = base if base is not None else TrackerConfig()
    kinds = {f.name: type(f.default) for f in dataclasses.fields(TrackerConfig)}
    overrides: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in kinds:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        overrides[key] = _parse_value(key, raw, kinds[key], lineno)
    cfg = dataclasses.replace(defaults, **overrides)
    cfg.validate()
    return cfg


def load_config(path) -> TrackerConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
