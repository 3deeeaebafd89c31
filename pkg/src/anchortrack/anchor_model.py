"""Anchor-point appearance model and its consistency dynamics.

An anchor is a keypoint descriptor plus a constraint vector pointing from the
keypoint to the object center, weighted by a slowly adapted long-term
consistency and an instantaneous short-term consistency. The model is the
set of anchors plus the current center/box state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, Frame, TrackerConfig
from .keypoints import detect_and_describe

# New candidates this close (px) to an already matched anchor's frame
# position are near-duplicates and would double-vote.
DUPLICATE_RADIUS = 2.0


class InitializationFailure(RuntimeError):
    """Raised when no keypoints can be found inside the initial box."""


@dataclass(eq=False)
class AnchorPoint:
    descriptor: np.ndarray
    constraint: np.ndarray          # object_center - keypoint_position at enrollment
    lt: float                       # long-term consistency, [0, 1]
    st: float                       # short-term consistency, (0, 1]
    matched: bool = False
    frame_position: np.ndarray | None = None   # keypoint position at the last match
    predicted_center: np.ndarray | None = None  # frame_position + constraint
    closeness: float = 0.0          # valid only while matched


@dataclass(eq=False)
class AnchorModel:
    anchors: list[AnchorPoint]
    center: np.ndarray
    box: BoundingBox

    def descriptor_matrix(self) -> np.ndarray:
        return np.stack([a.descriptor for a in self.anchors])


def init_closeness(constraint: np.ndarray, cfg: TrackerConfig) -> float:
    """Enrollment closeness: falls off with the offset norm, floored at 0.5.

    The floor keeps far-from-center keypoints (likely but not certainly
    background) voting at reduced weight rather than not at all.
    """
    return max(1.0 - cfg.closeness_alpha * float(np.linalg.norm(constraint)),
               cfg.lt_init_floor)


def compute_closeness(predicted: np.ndarray, final_center: np.ndarray,
                      cfg: TrackerConfig) -> float:
    """Per-frame closeness of a prediction to the voted center, clamped at 0."""
    dist = float(np.linalg.norm(np.asarray(final_center, dtype=np.float64)
                                - np.asarray(predicted, dtype=np.float64)))
    return max(1.0 - cfg.closeness_alpha * dist, 0.0)


def update_short_term(predicted: np.ndarray, final_center: np.ndarray,
                      cfg: TrackerConfig) -> float:
    """Gaussian trust in the anchor's latest prediction error."""
    d2 = float(np.sum((np.asarray(predicted, dtype=np.float64)
                       - np.asarray(final_center, dtype=np.float64)) ** 2))
    return math.exp(-d2 / cfg.st_eta)


def adapt_long_term(anchor: AnchorPoint, cfg: TrackerConfig) -> float:
    """Exponentially blend closeness in when matched, decay when not."""
    if anchor.matched:
        return (1.0 - cfg.lt_delta) * anchor.lt + cfg.lt_delta * anchor.closeness
    return (1.0 - cfg.lt_delta) * anchor.lt


def _enroll(keypoint, center: np.ndarray, cfg: TrackerConfig) -> AnchorPoint:
    constraint = center - keypoint.position
    lt = init_closeness(constraint, cfg)
    return AnchorPoint(
        descriptor=keypoint.descriptor,
        constraint=constraint,
        lt=lt,
        st=1.0,
        matched=True,
        frame_position=keypoint.position.copy(),
        predicted_center=keypoint.position + constraint,
        closeness=lt,
    )


def build(frame: Frame, box: BoundingBox, cfg: TrackerConfig) -> AnchorModel:
    """Enroll every detectable keypoint inside the box as an anchor."""
    keypoints = detect_and_describe(frame, cfg, region=box)
    if not keypoints:
        raise InitializationFailure("no keypoints detected inside the initial box")
    anchors = [_enroll(kp, box.center, cfg) for kp in keypoints]
    return AnchorModel(anchors=anchors, center=box.center.copy(), box=box)


def prune(model: AnchorModel, cfg: TrackerConfig) -> None:
    """Drop anchors whose long-term consistency fell below the threshold.

    Never empties the model: if everything is below threshold, the single
    highest-lt anchor survives.
    """
    survivors = [a for a in model.anchors if a.lt >= cfg.lt_min]
    if not survivors:
        survivors = [max(model.anchors, key=lambda a: a.lt)]
    model.anchors = survivors


def add_anchors(model: AnchorModel, frame: Frame, box: BoundingBox,
                cfg: TrackerConfig) -> None:
    """Enroll fresh in-box keypoints, evicting the weakest past capacity.

    Candidates within DUPLICATE_RADIUS of a currently matched anchor's frame
    position are skipped. Call only after the update gate has passed.
    """
    matched_positions = [a.frame_position for a in model.anchors
                         if a.matched and a.frame_position is not None]
    occupied = np.stack(matched_positions) if matched_positions else None

    fresh = []
    for kp in detect_and_describe(frame, cfg, region=box):
        if occupied is not None:
            d = np.linalg.norm(occupied - kp.position, axis=1)
            if float(d.min()) <= DUPLICATE_RADIUS:
                continue
        fresh.append(_enroll(kp, box.center, cfg))

    combined = model.anchors + fresh
    if len(combined) > cfg.max_anchors:
        order = sorted(range(len(combined)),
                       key=lambda i: (-combined[i].lt, i))[: cfg.max_anchors]
        combined = [combined[i] for i in sorted(order)]
    model.anchors = combined


def rescale_vectors(model: AnchorModel, s: float) -> None:
    """Multiply every constraint vector by the applied scale factor."""
    for anchor in model.anchors:
        anchor.constraint = anchor.constraint * s


def dump_anchors(model: AnchorModel) -> str:
    """Diagnostic dump: one anchor per line, tab-separated Lx, Ly, lt, st, matched."""
    lines = [
        "\t".join((
            f"{a.constraint[0]:.4f}",
            f"{a.constraint[1]:.4f}",
            f"{a.lt:.6f}",
            f"{a.st:.6f}",
            "1" if a.matched else "0",
        ))
        for a in model.anchors
    ]
    return "\n".join(lines) + ("\n" if lines else "")
