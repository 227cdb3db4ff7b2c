"""
Permutation and speed sweeps
============================

One manifest request is expanded into every combination of permutation
count and speed scale; each variant carries its own derived seed.
"""

from signstitch import AugmentSchedule, StitchRequest, Stitcher, default_skeleton, expand_schedule
from signstitch import permute_glosses, realize_variant
from signstitch.synthetic import toy_dictionary

d = toy_dictionary(10, seed=5)
stitcher = Stitcher(d, default_skeleton())
req = StitchRequest(["SIGN000", "SIGN001", "SIGN002", "SIGN003", "SIGN004", "SIGN005"], request_id="s1")

# %%
# Permuting N glosses shuffles one randomly placed window of that length,
# so N = 1 leaves the order alone. The swaps mode instead applies N random
# adjacent swaps.
for n in (0, 1, 3, 10):
    print(n, "window", permute_glosses(req.glosses, n, seed=7))
    print(n, "swaps ", permute_glosses(req.glosses, n, seed=7, mode="swaps"))

# %%
# Cross with speed scales. The scale resamples the finished sequence, so a
# scale of 1.5 gives 1.5 times as many frames.
sched = AugmentSchedule(permutation_ns=(0, 3), speed_scales=(0.7, 1.0, 1.5), seed=1)
for v in expand_schedule([req], sched):
    res = realize_variant(v, stitcher)
    print(f"{v.name:20s} seed={v.seed:20d} frames={len(res.poses):4d} {' '.join(v.request.glosses)}")
