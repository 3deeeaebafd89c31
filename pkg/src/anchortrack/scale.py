"""Scale estimation from pairwise keypoint distances.

Per frame, distances from the most consistent anchor to the other reliable
anchors are compared between consecutive frames; the mean ratio accumulates
multiplicatively and is applied to the box every `scale_period` frames,
unless the net change exceeds the clamp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, TrackerConfig

# Anchor pairs closer than this (px) in the previous frame would blow up the
# distance ratio.
MIN_PAIR_DISTANCE = 1.0

# At least this many anchors must clear the consistency bar to trust a ratio.
MIN_SELECTED = 3


@dataclass
class ScaleState:
    accumulator: float = 1.0
    frames_since_apply: int = 0
    size_at_last_apply: tuple[float, float] | None = None


def frame_ratio(
    prev_positions: list[np.ndarray],
    curr_positions: list[np.ndarray],
    lt_values: list[float],
) -> float | None:
    """Mean pairwise-distance ratio between frames, or None without evidence.

    The three lists are index-aligned over anchors matched in both frames.
    Only anchors at or above the median long-term consistency participate;
    distances are measured from the highest-consistency anchor to the rest.
    """
    if len(lt_values) < MIN_SELECTED:
        return None
    lt = np.asarray(lt_values, dtype=np.float64)
    selected = np.nonzero(lt >= np.median(lt))[0]
    if selected.size < MIN_SELECTED:
        return None

    ref = selected[np.argmax(lt[selected])]
    ratios = []
    for i in selected:
        if i == ref:
            continue
        d_prev = float(np.linalg.norm(prev_positions[ref] - prev_positions[i]))
        if d_prev < MIN_PAIR_DISTANCE:
            continue
        d_curr = float(np.linalg.norm(curr_positions[ref] - curr_positions[i]))
        ratios.append(d_curr / d_prev)
    if not ratios:
        return None
    return float(np.mean(ratios))


def maybe_apply(
    state: ScaleState,
    ratio: float | None,
    box: BoundingBox,
    cfg: TrackerConfig,
) -> tuple[BoundingBox, float]:
    """Accumulate the per-frame ratio; apply to the box at period end.

    Returns (box, applied factor). The factor is 1.0 except on the period
    frame where the accumulated change passed the clamp; in that case both
    box dimensions are multiplied by it and the caller must rescale the
    anchors' constraint vectors by the same factor.
    """
    if ratio is not None:
        state.accumulator *= ratio
    state.frames_since_apply += 1
    if state.frames_since_apply < cfg.scale_period:
        return box, 1.0

    factor = state.accumulator
    state.accumulator = 1.0
    state.frames_since_apply = 0
    if abs(factor - 1.0) > cfg.scale_clamp or factor == 1.0:
        return box, 1.0

    new_box = BoundingBox(center=box.center.copy(),
                          width=box.width * factor,
                          height=box.height * factor)
    state.size_at_last_apply = (new_box.width, new_box.height)
    return new_box, factor
