"""Model-free single-object visual tracking with center-voting anchor keypoints.

Keypoints enrolled from the initial box carry a constraint vector to the
object center plus long- and short-term consistency weights; matched
keypoints cast truncated Gaussian votes into a score matrix whose argmax
localizes the object. Appearance updates pass through a binary-code plus
weighted-color-histogram gate, and scale is estimated from pairwise
keypoint distance ratios.
"""

from .anchor_model import AnchorModel, AnchorPoint, InitializationFailure
from .bench import (
    EvalCurves,
    GroundTruth,
    LengthMismatch,
    MissingFrames,
    ParseError,
    PRESETS,
    SpecInvalid,
    SynthSpec,
    evaluate,
    generate,
    load_gt,
    load_sequence,
    precision_curve,
    save_gt,
    success_auc,
)
from .core import (
    BoundingBox,
    ConfigError,
    Frame,
    TrackerConfig,
    center_error,
    iou,
    load_config,
    parse_config,
)
from .global_models import ReferenceModels, update_gate
from .keypoints import Keypoint, MatchPair, detect, describe, match_descriptors
from .localization import NoVotes, ScoreMatrix, VoteStamp, localize, stamp
from .pipeline import FrameResult, TrackerState, TrackStatus, initialize, run_sequence, step

__version__ = "0.1.0"

__all__ = [
    "AnchorModel",
    "AnchorPoint",
    "BoundingBox",
    "ConfigError",
    "EvalCurves",
    "Frame",
    "FrameResult",
    "GroundTruth",
    "InitializationFailure",
    "Keypoint",
    "LengthMismatch",
    "MatchPair",
    "MissingFrames",
    "NoVotes",
    "ParseError",
    "PRESETS",
    "ReferenceModels",
    "ScoreMatrix",
    "SpecInvalid",
    "SynthSpec",
    "TrackStatus",
    "TrackerConfig",
    "TrackerState",
    "VoteStamp",
    "center_error",
    "describe",
    "detect",
    "evaluate",
    "generate",
    "initialize",
    "iou",
    "load_config",
    "load_gt",
    "load_sequence",
    "localize",
    "match_descriptors",
    "parse_config",
    "precision_curve",
    "run_sequence",
    "save_gt",
    "stamp",
    "step",
    "success_auc",
    "update_gate",
]
