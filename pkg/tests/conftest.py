import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anchortrack.core import BoundingBox, Frame, TrackerConfig


@pytest.fixture
def cfg():
    return TrackerConfig()


def checker_frame(width=96, height=96, box_center=(48.0, 48.0), box_size=48,
                  cells=6, seed=3, index=0):
    """A jittered checkerboard patch on a mid-gray background.

    Returns (frame, box). Junction corners inside the box are strong and
    mutually distinct, so detection and matching behave deterministically.
    """
    rng = np.random.default_rng(seed)
    rgb = np.full((height, width, 3), 110.0)
    cx, cy = box_center
    x0 = int(round(cx - box_size / 2))
    y0 = int(round(cy - box_size / 2))
    cell = box_size // cells
    for i in range(cells):
        for j in range(cells):
            base = 235.0 if (i + j) % 2 == 0 else 20.0
            color = np.clip(base + rng.uniform(-20, 20, size=3), 0, 255)
            rgb[y0 + i * cell : y0 + (i + 1) * cell,
                x0 + j * cell : x0 + (j + 1) * cell] = color
    frame = Frame.from_rgb(np.clip(np.rint(rgb), 0, 255).astype(np.uint8), index=index)
    box = BoundingBox(center=np.array(box_center, dtype=np.float64),
                      width=float(box_size), height=float(box_size))
    return frame, box


def uniform_frame(width=64, height=64, value=128, index=0):
    rgb = np.full((height, width, 3), value, dtype=np.uint8)
    return Frame.from_rgb(rgb, index=index)
