"""Per-frame tracking loop.

Order within a frame: whole-frame detection, descriptor matching, vote
accumulation and localization, per-anchor consistency updates, scale
accumulation/application, then the gated model update. Frames with zero
mutual matches freeze the entire state (box, anchors, scale accumulator)
until the object is re-acquired.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import anchor_model, global_models, keypoints, localization, scale
from .core import BoundingBox, Frame, TrackerConfig


class TrackStatus(enum.Enum):
    TRACKING = "Tracking"
    HOLDING = "Holding"


@dataclass(eq=False)
class TrackerState:
    model: anchor_model.AnchorModel
    refs: global_models.ReferenceModels
    scale: scale.ScaleState
    cfg: TrackerConfig
    last_box: BoundingBox
    status: TrackStatus


@dataclass(frozen=True, eq=False)
class FrameResult:
    frame_index: int
    box: BoundingBox
    status: TrackStatus
    matched_count: int
    gate_passed: bool
    applied_scale: float


def initialize(frame: Frame, box: BoundingBox, cfg: TrackerConfig) -> TrackerState:
    """Build the anchor model and frozen reference models from the first frame."""
    cfg.validate()
    model = anchor_model.build(frame, box, cfg)
    refs = global_models.build_references(frame, box, cfg)
    return TrackerState(
        model=model,
        refs=refs,
        scale=scale.ScaleState(),
        cfg=cfg,
        last_box=box,
        status=TrackStatus.TRACKING,
    )


def _holding_result(state: TrackerState, frame: Frame) -> FrameResult:
    state.status = TrackStatus.HOLDING
    return FrameResult(
        frame_index=frame.index,
        box=state.last_box,
        status=TrackStatus.HOLDING,
        matched_count=0,
        gate_passed=False,
        applied_scale=1.0,
    )


def step(state: TrackerState, frame: Frame, trace: dict | None = None) -> FrameResult:
    """Process one frame and advance the tracker state.

    `trace`, when given, receives diagnostic entries: "score_matrix" and
    "gate_scores" (None on holding frames).
    """
    cfg = state.cfg
    model = state.model

    frame_kps = keypoints.detect_and_describe(frame, cfg)
    if frame_kps:
        matches = keypoints.match_descriptors(
            model.descriptor_matrix(),
            np.stack([kp.descriptor for kp in frame_kps]),
            cfg.ratio_test,
        )
    else:
        matches = []

    if not matches:
        if trace is not None:
            trace["score_matrix"] = None
            trace["gate_scores"] = None
        return _holding_result(state, frame)

    # Positions from the previous matched frame, for the pairwise scale ratios.
    prev_positions = {
        i: a.frame_position
        for i, a in enumerate(model.anchors)
        if a.matched and a.frame_position is not None
    }

    for anchor in model.anchors:
        anchor.matched = False
    for m in matches:
        anchor = model.anchors[m.model_index]
        anchor.matched = True
        anchor.frame_position = frame_kps[m.frame_index].position.copy()

    sm = localization.accumulate(model, matches, frame_kps, (frame.width, frame.height), cfg)
    center = localization.localize(sm, state.last_box.center)
    box = BoundingBox(center=center, width=state.last_box.width, height=state.last_box.height)

    for m in matches:
        anchor = model.anchors[m.model_index]
        anchor.closeness = anchor_model.compute_closeness(anchor.predicted_center, center, cfg)
        anchor.st = anchor_model.update_short_term(anchor.predicted_center, center, cfg)
    for anchor in model.anchors:
        anchor.lt = anchor_model.adapt_long_term(anchor, cfg)

    applied = 1.0
    if cfg.scale_enabled:
        both = [i for i, a in enumerate(model.anchors) if a.matched and i in prev_positions]
        ratio = scale.frame_ratio(
            [prev_positions[i] for i in both],
            [model.anchors[i].frame_position for i in both],
            [model.anchors[i].lt for i in both],
        )
        box, applied = scale.maybe_apply(state.scale, ratio, box, cfg)
        if applied != 1.0:
            anchor_model.rescale_vectors(model, applied)

    gate_scores = global_models.gate_scores(frame, box, state.refs, cfg)
    gate_passed = (gate_scores[0] >= cfg.gate_lbsp_min
                   and gate_scores[1] <= cfg.gate_hist_max)
    if gate_passed:
        anchor_model.add_anchors(model, frame, box, cfg)
        anchor_model.prune(model, cfg)

    model.center = box.center
    model.box = box
    state.last_box = box
    state.status = TrackStatus.TRACKING

    if trace is not None:
        trace["score_matrix"] = sm
        trace["gate_scores"] = gate_scores

    return FrameResult(
        frame_index=frame.index,
        box=box,
        status=TrackStatus.TRACKING,
        matched_count=len(matches),
        gate_passed=gate_passed,
        applied_scale=applied,
    )


def run_sequence(frames, init_box: BoundingBox, cfg: TrackerConfig) -> list[FrameResult]:
    """Track across an ordered frame iterable; frame 0 initializes the model."""
    results: list[FrameResult] = []
    state: TrackerState | None = None
    for frame in frames:
        if state is None:
            state = initialize(frame, init_box, cfg)
            results.append(FrameResult(
                frame_index=frame.index,
                box=init_box,
                status=TrackStatus.TRACKING,
                matched_count=len(state.model.anchors),
                gate_passed=True,
                applied_scale=1.0,
            ))
        else:
            results.append(step(state, frame))
    if state is None:
        raise ValueError("empty frame sequence")
    return results
