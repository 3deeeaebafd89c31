"""Corner detection, patch description, and descriptor matching.

The detector is a minimum-eigenvalue (Shi-Tomasi style) corner finder with
3x3 non-maximum suppression; the descriptor is a mean-removed, L2-normalized
intensity patch. Both are deterministic pure functions of the frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, Frame, TrackerConfig

# Corners must beat both an absolute floor and a fraction of the frame's
# strongest response. The floor rejects sensor-noise corners (sigma ~< 3
# gray levels) while keeping anything with ~8+ levels of real contrast.
MIN_RESPONSE = 50.0
QUALITY_LEVEL = 0.01

# Gradients and the structure tensor are undefined this close to the border.
BORDER_MARGIN = 2


@dataclass(eq=False)
class Keypoint:
    position: np.ndarray           # (x, y), pixels
    response: float
    descriptor: np.ndarray | None = None


@dataclass(frozen=True)
class MatchPair:
    model_index: int
    frame_index: int
    distance: float


def _sobel_gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.pad(gray.astype(np.float64), 1, mode="edge")
    gx = (
        (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    ) / 8.0
    gy = (
        (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    ) / 8.0
    return gx, gy


def _box_sum_3x3(a: np.ndarray) -> np.ndarray:
    p = np.pad(a, 1, mode="edge")
    return (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 1:-1] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )


def corner_response(gray: np.ndarray) -> np.ndarray:
    """Minimum eigenvalue of the 3x3-summed structure tensor at every pixel."""
    gx, gy = _sobel_gradients(gray)
    sxx = _box_sum_3x3(gx * gx)
    syy = _box_sum_3x3(gy * gy)
    sxy = _box_sum_3x3(gx * gy)
    half_trace = (sxx + syy) / 2.0
    root = np.sqrt(((sxx - syy) / 2.0) ** 2 + sxy**2)
    return np.maximum(half_trace - root, 0.0)


def _nms_3x3(response: np.ndarray) -> np.ndarray:
    """Boolean peak mask; row-major-earlier neighbors break plateau ties."""
    p = np.pad(response, 1, mode="constant", constant_values=-1.0)
    r = p[1:-1, 1:-1]
    earlier = (
        (r > p[:-2, :-2]) & (r > p[:-2, 1:-1]) & (r > p[:-2, 2:]) & (r > p[1:-1, :-2])
    )
    later = (
        (r >= p[1:-1, 2:]) & (r >= p[2:, :-2]) & (r >= p[2:, 1:-1]) & (r >= p[2:, 2:])
    )
    return earlier & later


def detect(frame: Frame, cfg: TrackerConfig, region: BoundingBox | None = None) -> list[Keypoint]:
    """Strongest corners in the frame (or in `region`), NMS-filtered.

    Returns at most cfg.max_anchors keypoints sorted by descending response,
    position (y, x) as the tie-break. Descriptors are not filled in.
    """
    response = corner_response(frame.gray)
    response[:BORDER_MARGIN, :] = 0.0
    response[-BORDER_MARGIN:, :] = 0.0
    response[:, :BORDER_MARGIN] = 0.0
    response[:, -BORDER_MARGIN:] = 0.0

    if region is not None:
        ys = np.arange(frame.height)[:, None]
        xs = np.arange(frame.width)[None, :]
        inside = (
            (xs >= region.x0) & (xs <= region.x1)
            & (ys >= region.y0) & (ys <= region.y1)
        )
        response = np.where(inside, response, 0.0)

    floor = max(MIN_RESPONSE, QUALITY_LEVEL * float(response.max()))
    keep = _nms_3x3(response) & (response > floor)
    ys, xs = np.nonzero(keep)
    if ys.size == 0:
        return []

    values = response[ys, xs]
    order = np.lexsort((xs, ys, -values))[: cfg.max_anchors]
    return [
        Keypoint(position=np.array([float(xs[i]), float(ys[i])]), response=float(values[i]))
        for i in order
    ]


def describe_patches(gray: np.ndarray, positions: np.ndarray, cfg: TrackerConfig) -> np.ndarray:
    """Mean-removed, unit-norm intensity patches at the given (x, y) positions.

    Patch centers are clamped so the patch fits inside the image. Flat
    patches degenerate to the uniform unit vector.
    """
    size = cfg.descriptor_patch
    half = size // 2
    h, w = gray.shape
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    cx = np.clip(np.rint(positions[:, 0]).astype(np.int64), half, w - half - 1)
    cy = np.clip(np.rint(positions[:, 1]).astype(np.int64), half, h - half - 1)

    offsets = np.arange(-half, half + 1)
    rows = cy[:, None, None] + offsets[None, :, None]
    cols = cx[:, None, None] + offsets[None, None, :]
    patches = gray[rows, cols].astype(np.float64).reshape(len(positions), size * size)

    patches -= patches.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(patches, axis=1)
    flat = norms < 1e-6
    norms[flat] = 1.0
    patches /= norms[:, None]
    patches[flat] = 1.0 / size
    return patches


def describe(frame: Frame, position: np.ndarray, cfg: TrackerConfig) -> np.ndarray:
    """Descriptor for a single keypoint position."""
    return describe_patches(frame.gray, np.asarray(position)[None, :], cfg)[0]


def detect_and_describe(
    frame: Frame, cfg: TrackerConfig, region: BoundingBox | None = None
) -> list[Keypoint]:
    kps = detect(frame, cfg, region)
    if kps:
        descs = describe_patches(frame.gray, np.stack([k.position for k in kps]), cfg)
        for kp, desc in zip(kps, descs):
            kp.descriptor = desc
    return kps


def _pairwise_distances(a: np.ndarray, b: np.ndarray, block: int = 64) -> np.ndarray:
    """Exact L2 distance matrix computed blockwise from explicit differences."""
    out = np.empty((a.shape[0], b.shape[0]))
    for start in range(0, a.shape[0], block):
        diff = a[start : start + block, None, :] - b[None, :, :]
        out[start : start + block] = np.sqrt((diff * diff).sum(axis=2))
    return out


def _nearest_two(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per row: nearest column index, its distance, and the runner-up distance.

    Equidistant candidates resolve to the lowest index; the runner-up is +inf
    when there is a single column.
    """
    nn = dist.argmin(axis=1)
    rows = np.arange(dist.shape[0])
    d1 = dist[rows, nn]
    if dist.shape[1] == 1:
        return nn, d1, np.full(dist.shape[0], np.inf)
    masked = dist.copy()
    masked[rows, nn] = np.inf
    d2 = masked.min(axis=1)
    return nn, d1, d2


def match_descriptors(
    model: np.ndarray | list, frame: np.ndarray | list, ratio: float
) -> list[MatchPair]:
    """Mutual nearest-neighbor matches surviving the distance-ratio test.

    Both directions apply the ratio test (a candidate whose nearest/runner-up
    distance ratio exceeds `ratio` is dropped; exactly `ratio` is kept), then
    a pair is emitted only when each side is the other's nearest neighbor.
    Output is ordered by ascending model index.
    """
    if len(model) == 0 or len(frame) == 0:
        return []
    model = np.asarray(model, dtype=np.float64).reshape(len(model), -1)
    frame = np.asarray(frame, dtype=np.float64).reshape(len(frame), -1)

    dist = _pairwise_distances(model, frame)

    def survivors(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nn, d1, d2 = _nearest_two(d)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(d2 > 0, d1 / d2, 1.0)
        return nn, r <= ratio

    fwd_nn, fwd_ok = survivors(dist)
    bwd_nn, bwd_ok = survivors(dist.T)

    pairs = []
    for i in range(model.shape[0]):
        if not fwd_ok[i]:
            continue
        j = int(fwd_nn[i])
        if bwd_ok[j] and int(bwd_nn[j]) == i:
            pairs.append(MatchPair(model_index=i, frame_index=j, distance=float(dist[i, j])))
    return pairs
