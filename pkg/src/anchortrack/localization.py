"""Gaussian vote accumulation over the frame grid and peak localization.

Each matched anchor stamps a truncated, peak-normalized Gaussian centered on
its predicted object center; the object center for the frame is the argmax
of the accumulated score matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, TrackerConfig

# Scores are rounded to this many decimals before argmax tie detection so the
# tie-break never depends on sub-tolerance accumulation order.
_TIE_DECIMALS = 7


class NoVotes(RuntimeError):
    """Raised when localizing an identically zero score matrix."""


@dataclass(eq=False)
class ScoreMatrix:
    values: np.ndarray  # (height, width) float64 accumulator

    @classmethod
    def zeros(cls, width: int, height: int) -> "ScoreMatrix":
        return cls(values=np.zeros((height, width)))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class VoteStamp:
    center: np.ndarray  # (x, y), may lie outside the frame
    weight: float
    sigma: float


def vote_sigma(box: BoundingBox, cfg: TrackerConfig) -> float:
    """Isotropic stamp std-dev tied to the box area, floored at 2 px."""
    return max(2.0, cfg.vote_sigma_rel * math.sqrt(box.area))


def stamp(sm: ScoreMatrix, v: VoteStamp, truncation: float) -> None:
    """Add one truncated Gaussian vote in place.

    Pixels x with ||x - center|| <= truncation * sigma gain
    weight * exp(-||x - center||^2 / (2 sigma^2)); the region is clipped to
    the frame. The normalization prefactor is dropped (peak equals weight),
    which preserves the argmax because all stamps share one sigma.
    """
    if v.weight == 0.0:
        return
    cx, cy = float(v.center[0]), float(v.center[1])
    radius = truncation * v.sigma
    x_lo = max(0, int(math.ceil(cx - radius)))
    x_hi = min(sm.width - 1, int(math.floor(cx + radius)))
    y_lo = max(0, int(math.ceil(cy - radius)))
    y_hi = min(sm.height - 1, int(math.floor(cy + radius)))
    if x_lo > x_hi or y_lo > y_hi:
        return

    xs = np.arange(x_lo, x_hi + 1, dtype=np.float64)
    ys = np.arange(y_lo, y_hi + 1, dtype=np.float64)
    d2 = (ys[:, None] - cy) ** 2 + (xs[None, :] - cx) ** 2
    inside = d2 <= radius * radius
    patch = np.where(inside, v.weight * np.exp(-d2 / (2.0 * v.sigma**2)), 0.0)
    sm.values[y_lo : y_hi + 1, x_lo : x_hi + 1] += patch


def accumulate(
    model, matches, frame_keypoints, frame_size: tuple[int, int], cfg: TrackerConfig
) -> ScoreMatrix:
    """Score matrix from one stamp per matched anchor, weighted lt * st.

    `frame_size` is (width, height). Also records each matched anchor's
    predicted center (its keypoint position plus the constraint vector) for
    the consistency updates.
    """
    sm = ScoreMatrix.zeros(frame_size[0], frame_size[1])
    sigma = vote_sigma(model.box, cfg)
    for m in matches:
        anchor = model.anchors[m.model_index]
        predicted = frame_keypoints[m.frame_index].position + anchor.constraint
        anchor.predicted_center = predicted
        stamp(
            sm,
            VoteStamp(center=predicted, weight=anchor.lt * anchor.st, sigma=sigma),
            cfg.vote_truncation,
        )
    return sm


def localize(sm: ScoreMatrix, previous_center: np.ndarray) -> np.ndarray:
    """Pixel with the maximal score.

    Ties (after rounding to 1e-7) are broken by proximity to the previous
    center, then by row-major order. Raises NoVotes on an all-zero matrix.
    """
    rounded = np.round(sm.values, _TIE_DECIMALS)
    peak = rounded.max()
    if peak <= 0.0:
        raise NoVotes("score matrix is identically zero")
    ys, xs = np.nonzero(rounded == peak)
    if len(ys) == 1:
        return np.array([float(xs[0]), float(ys[0])])
    px, py = float(previous_center[0]), float(previous_center[1])
    d2 = (xs - px) ** 2 + (ys - py) ** 2
    order = np.lexsort((xs, ys, d2))
    best = order[0]
    return np.array([float(xs[best]), float(ys[best])])
