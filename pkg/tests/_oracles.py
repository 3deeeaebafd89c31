"""Independent brute-force reference implementations used across the tests.

These deliberately avoid the library's vectorized code paths: plain Python
loops, per-pair norms, per-pixel sums.
"""

from __future__ import annotations

import math

import numpy as np


def brute_force_matches(model, frame, ratio):
    """Exhaustive mutual-nearest matching with the two-sided ratio test.

    Returns (model_index, frame_index, distance) triples ordered by model
    index. Nearest-neighbor ties resolve to the lowest index; a missing
    runner-up counts as infinitely far.
    """
    n_model, n_frame = len(model), len(frame)
    if n_model == 0 or n_frame == 0:
        return []
    dist = [
        [float(np.linalg.norm(np.asarray(model[i]) - np.asarray(frame[j])))
         for j in range(n_frame)]
        for i in range(n_model)
    ]

    def nearest_two(row):
        order = sorted(range(len(row)), key=lambda k: (row[k], k))
        d1 = row[order[0]]
        d2 = row[order[1]] if len(order) > 1 else math.inf
        return order[0], d1, d2

    def passes(d1, d2):
        if d2 == 0.0:
            return False
        if math.isinf(d2):
            return True
        return d1 / d2 <= ratio

    forward = {}
    for i in range(n_model):
        j, d1, d2 = nearest_two(dist[i])
        if passes(d1, d2):
            forward[i] = j
    backward = {}
    for j in range(n_frame):
        column = [dist[i][j] for i in range(n_model)]
        i, d1, d2 = nearest_two(column)
        if passes(d1, d2):
            backward[j] = i

    return [
        (i, j, dist[i][j])
        for i, j in sorted(forward.items())
        if backward.get(j) == i
    ]


def naive_score_matrix(stamps, width, height, truncation):
    """Per-pixel truncated Gaussian vote sum over every (pixel, stamp) pair.

    `stamps` holds (center_xy, weight, sigma) triples.
    """
    values = np.zeros((height, width))
    for y in range(height):
        for x in range(width):
            total = 0.0
            for center, weight, sigma in stamps:
                cx, cy = float(center[0]), float(center[1])
                d2 = (x - cx) ** 2 + (y - cy) ** 2
                if d2 <= (truncation * sigma) ** 2:
                    total += weight * math.exp(-d2 / (2.0 * sigma * sigma))
            values[y, x] = total
    return values


def naive_argmax(values, previous_center):
    """Argmax with the same tie rules as the tracker: nearest to the previous
    center, then row-major."""
    rounded = np.round(values, 7)
    peak = rounded.max()
    best = None
    best_key = None
    for y in range(values.shape[0]):
        for x in range(values.shape[1]):
            if rounded[y, x] != peak:
                continue
            d2 = (x - previous_center[0]) ** 2 + (y - previous_center[1]) ** 2
            key = (d2, y, x)
            if best_key is None or key < best_key:
                best_key = key
                best = (float(x), float(y))
    return np.array(best)


def minimum_eigenvalue_at(gray, x, y):
    """Corner response at one pixel from first principles: Sobel gradients in
    a 3x3 neighborhood, 2x2 structure tensor, smallest eigenvalue."""
    img = gray.astype(np.float64)
    h, w = img.shape

    def pix(yy, xx):
        return img[min(max(yy, 0), h - 1), min(max(xx, 0), w - 1)]

    def grad(yy, xx):
        gx = (
            (pix(yy - 1, xx + 1) + 2 * pix(yy, xx + 1) + pix(yy + 1, xx + 1))
            - (pix(yy - 1, xx - 1) + 2 * pix(yy, xx - 1) + pix(yy + 1, xx - 1))
        ) / 8.0
        gy = (
            (pix(yy + 1, xx - 1) + 2 * pix(yy + 1, xx) + pix(yy + 1, xx + 1))
            - (pix(yy - 1, xx - 1) + 2 * pix(yy - 1, xx) + pix(yy - 1, xx + 1))
        ) / 8.0
        return gx, gy

    sxx = syy = sxy = 0.0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            gx, gy = grad(y + dy, x + dx)
            sxx += gx * gx
            syy += gy * gy
            sxy += gx * gy
    eigenvalues = np.linalg.eigvalsh(np.array([[sxx, sxy], [sxy, syy]]))
    return float(eigenvalues[0])
