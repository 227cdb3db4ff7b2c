"""
Stitching a sentence from isolated signs
========================================

A toy dictionary of synthetic joint-angle clips stands in for a real one.
We stitch a three-gloss sentence and look at what each stage contributes.
"""

import numpy as np

from signstitch import StitchRequest, Stitcher, default_skeleton
from signstitch.synthetic import toy_dictionary

# %%
# Twelve signs of 30 to 50 frames each, 104 joint angles per frame.
skel = default_skeleton()
d = toy_dictionary(12, seed=3)
print(len(d), "signs, e.g.", d.glosses[:4])

# %%
# The built-in skeleton has 61 keypoints; forward kinematics turns the
# angles of one sign into 3-D positions.
poses = Stitcher(d, skel).entry_poses("SIGN002")
print("SIGN002 poses:", poses.shape)

# %%
# Stitch without the final low-pass so the transitions are visible as
# straight-line interpolation between the boundary poses.
stitcher = Stitcher(d, skel)
req = StitchRequest(["SIGN002", "SIGN007", "SIGN004"], durations=[40, 25, 40])
raw = stitcher.stitch(req, apply_filter=False)
for (start, end), plan in zip(raw.transition_spans, raw.transitions):
    print(f"transition frames {start}-{end}: gap {plan.distance:.3f}, "
          f"boundary speed {plan.velocity:.4f}/frame, {plan.n} frames")

# %%
# Each in-between step stays under the speed measured at the boundary.
frames = raw.poses.frames
for (start, end), plan in zip(raw.transition_spans, raw.transitions):
    steps = np.linalg.norm(np.diff(frames[start - 1:end + 1], axis=0), axis=-1).mean(axis=-1)
    print(f"max step {steps.max():.4f} <= {plan.velocity:.4f}")

# %%
# The full pipeline adds a zero-phase Butterworth filter (4 Hz by default),
# which rounds off the corners where transitions meet signs.
smooth = stitcher.stitch(req)
print("total frames:", len(smooth.poses), "spans:", smooth.gloss_spans)
def peak_accel(x):
    return np.abs(np.diff(x, 2, axis=0)).max()


print(f"peak acceleration raw {peak_accel(frames):.4f}, filtered {peak_accel(smooth.poses.frames):.4f}")
