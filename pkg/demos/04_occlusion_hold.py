"""
Hold-position behavior under full occlusion
===========================================

When a frame produces zero mutual descriptor matches (here: a band sweeps in
and covers the object for 21 frames), the tracker freezes the box and the
whole appearance model instead of guessing. Tracking resumes the moment the
object's keypoints match again.
"""

import numpy as np

from anchortrack import PRESETS, TrackStatus, TrackerConfig, center_error, generate, run_sequence

frames, gt = generate(PRESETS["occlusion"]())
results = run_sequence(frames, gt[0], TrackerConfig())

timeline = "".join("H" if r.status is TrackStatus.HOLDING else "." for r in results)
print("status per frame (H = holding):")
for start in range(0, len(timeline), 50):
    print(f"  {start:3d}  {timeline[start:start + 50]}")

held = [r.frame_index for r in results if r.status is TrackStatus.HOLDING]
print(f"\nheld frames: {held[0]}..{held[-1]} ({len(held)} frames)")

boxes = [r.box for r in results]
drift = max(float(np.linalg.norm(b.center - boxes[held[0] - 1].center))
            for b in boxes[held[0] : held[-1] + 1])
print(f"box displacement while holding: {drift:.2f} px")

recovery = [(i, center_error(boxes[i], gt[i])) for i in range(held[-1] + 1, held[-1] + 6)]
print("recovery after the occluder leaves:")
for i, err in recovery:
    print(f"  frame {i:3d}: center error {err:.2f} px")
