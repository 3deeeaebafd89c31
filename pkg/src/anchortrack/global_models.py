"""Pixel-level binary codes, center-weighted color histograms, and the
appearance-update gate built from both.

Both models operate on the tracked patch after bilinear size normalization,
so comparisons stay well-defined across scale changes. The reference models
are computed once on the initial frame and frozen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, Frame, TrackerConfig

# Outer ring of the 5x5 neighborhood in row-major order; bit k of a code is
# position k of this list. 16 positions -> 16-bit codes.
RING_OFFSETS = [
    (dy, dx)
    for dy in (-2, -1, 0, 1, 2)
    for dx in (-2, -1, 0, 1, 2)
    if max(abs(dy), abs(dx)) == 2
]

_POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


class SizeMismatch(ValueError):
    """Raised when comparing grids or histograms of different shapes."""


@dataclass(frozen=True, eq=False)
class LbspGrid:
    codes: np.ndarray  # (size, size) uint16; 2-px border is 0 by convention

    @property
    def size(self) -> int:
        return self.codes.shape[0]


@dataclass(frozen=True, eq=False)
class WeightedHistogram:
    bins: np.ndarray  # (bins_per_channel ** 3,) floats, L1 sum = 1


@dataclass(frozen=True, eq=False)
class ReferenceModels:
    lbsp_ref: LbspGrid
    hist_ref: WeightedHistogram


def sample_patch(image: np.ndarray, box: BoundingBox, size: int) -> np.ndarray:
    """Bilinearly resample the box region to a size x size patch.

    Output pixel centers map uniformly onto the box span; source coordinates
    are clamped at the image border. Works on 2D (gray) and 3D (rgb) arrays.
    """
    h, w = image.shape[:2]
    xs = box.x0 + (np.arange(size) + 0.5) * (box.width / size) - 0.5
    ys = box.y0 + (np.arange(size) + 0.5) * (box.height / size) - 0.5
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    tx = xs - x0
    ty = ys - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    img = image.astype(np.float64)
    if img.ndim == 2:
        tx_row = tx[None, :]
        ty_col = ty[:, None]
        top = (1 - tx_row) * img[y0c[:, None], x0c[None, :]] + tx_row * img[y0c[:, None], x1c[None, :]]
        bot = (1 - tx_row) * img[y1c[:, None], x0c[None, :]] + tx_row * img[y1c[:, None], x1c[None, :]]
        return (1 - ty_col) * top + ty_col * bot

    tx_row = tx[None, :, None]
    ty_col = ty[:, None, None]
    top = (1 - tx_row) * img[y0c[:, None], x0c[None, :]] + tx_row * img[y0c[:, None], x1c[None, :]]
    bot = (1 - tx_row) * img[y1c[:, None], x0c[None, :]] + tx_row * img[y1c[:, None], x1c[None, :]]
    return (1 - ty_col) * top + ty_col * bot


def lbsp_codes(patch: np.ndarray, threshold: float) -> np.ndarray:
    """16-bit similarity codes for every interior pixel of a gray patch.

    Bit k is 1 iff the k-th 5x5 outer-ring neighbor differs from the center
    by at most `threshold`. The 2-px border keeps code 0.
    """
    size = patch.shape[0]
    codes = np.zeros((size, size), dtype=np.uint16)
    center = patch[2:-2, 2:-2]
    for bit, (dy, dx) in enumerate(RING_OFFSETS):
        neighbor = patch[2 + dy : size - 2 + dy, 2 + dx : size - 2 + dx]
        similar = np.abs(neighbor - center) <= threshold
        codes[2:-2, 2:-2] |= similar.astype(np.uint16) << np.uint16(bit)
    return codes


def compute_lbsp(frame: Frame, box: BoundingBox, cfg: TrackerConfig) -> LbspGrid:
    patch = sample_patch(frame.gray, box, cfg.patch_norm_size)
    return LbspGrid(codes=lbsp_codes(patch, cfg.lbsp_threshold))


def lbsp_similarity(a: LbspGrid, b: LbspGrid) -> float:
    """1 minus the normalized Hamming distance over interior pixels."""
    if a.codes.shape != b.codes.shape:
        raise SizeMismatch(f"grid sizes differ: {a.codes.shape} vs {b.codes.shape}")
    xa = a.codes[2:-2, 2:-2]
    xb = b.codes[2:-2, 2:-2]
    differing = int(_POPCOUNT16[np.bitwise_xor(xa, xb)].sum())
    return 1.0 - differing / (16.0 * xa.size)


def _center_weights(size: int) -> np.ndarray:
    """Epanechnikov profile over the patch, normalized by the half diagonal."""
    c = (size - 1) / 2.0
    half_diag = (size / 2.0) * np.sqrt(2.0)
    ys, xs = np.mgrid[0:size, 0:size]
    r2 = ((xs - c) ** 2 + (ys - c) ** 2) / half_diag**2
    return np.maximum(0.0, 1.0 - r2)


def compute_weighted_hist(frame: Frame, box: BoundingBox, cfg: TrackerConfig) -> WeightedHistogram:
    """Center-weighted 3D color histogram of the size-normalized patch."""
    size = cfg.patch_norm_size
    nbins = cfg.hist_bins_per_channel
    patch = sample_patch(frame.rgb, box, size)
    weights = _center_weights(size)

    quantized = np.clip((patch * (nbins / 256.0)).astype(np.int64), 0, nbins - 1)
    flat = (quantized[..., 0] * nbins + quantized[..., 1]) * nbins + quantized[..., 2]
    bins = np.bincount(flat.ravel(), weights=weights.ravel(), minlength=nbins**3)
    return WeightedHistogram(bins=bins / bins.sum())


def hist_distance(a: WeightedHistogram, b: WeightedHistogram) -> float:
    """Euclidean distance between histograms; in [0, sqrt(2)] for L1-normalized input."""
    if a.bins.shape != b.bins.shape:
        raise SizeMismatch(f"bin counts differ: {a.bins.shape} vs {b.bins.shape}")
    return float(np.linalg.norm(a.bins - b.bins))


def build_references(frame: Frame, box: BoundingBox, cfg: TrackerConfig) -> ReferenceModels:
    return ReferenceModels(
        lbsp_ref=compute_lbsp(frame, box, cfg),
        hist_ref=compute_weighted_hist(frame, box, cfg),
    )


def gate_scores(frame: Frame, box: BoundingBox, refs: ReferenceModels,
                cfg: TrackerConfig) -> tuple[float, float]:
    """(binary-code similarity, histogram distance) of the box vs the references."""
    sim = lbsp_similarity(compute_lbsp(frame, box, cfg), refs.lbsp_ref)
    dist = hist_distance(compute_weighted_hist(frame, box, cfg), refs.hist_ref)
    return sim, dist


def update_gate(frame: Frame, box: BoundingBox, refs: ReferenceModels,
                cfg: TrackerConfig) -> bool:
    """True iff both similarity tests pass (inclusive thresholds)."""
    sim, dist = gate_scores(frame, box, refs, cfg)
    return sim >= cfg.gate_lbsp_min and dist <= cfg.gate_hist_max
