"""From joint motion to image tensors.

Walks the encoding pipeline stage by stage on a synthetic punch-like
sequence, then writes PNG previews of the multi-scale magnitude and
orientation images under demos/out/.

Run from the repo root:  python demos/02_motion_images.py
"""

from pathlib import Path

import numpy as np

from skelimage import (
    MAGNITUDE,
    MAGNITUDE_ORIENTATION,
    NUM_JOINTS,
    ORIENTATION,
    BodyTrack,
    EncoderConfig,
    build_chain_matrix,
    default_chain,
    encode_skelemotion,
    export_png,
    filter_orientation_tsa,
    magnitude,
    motion_difference,
    orientation,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)
rng = np.random.default_rng(7)

# A "punch": the right arm joints (10, 11, 12, 24, 25 in 1-based Kinect
# numbering) shoot forward during the middle of the clip, everything else
# only jitters.
T = 60
frames = rng.uniform(-0.02, 0.02, (T, NUM_JOINTS, 3))
frames += rng.uniform(-0.5, 0.5, (1, NUM_JOINTS, 3))  # static pose offsets
punch = np.clip(np.linspace(-1.0, 2.0, T), 0.0, 1.0)  # ramp in the middle
for joint in (10, 11, 12, 24, 25):
    frames[:, joint - 1, 2] += 0.6 * punch
track = BodyTrack.dense("actor", frames)

chain = default_chain()
S = build_chain_matrix(track, chain)
print(f"chain matrix S: {S.shape}  (chain rows x frames x xyz)")

# Stage by stage at a single temporal distance.
d = 10
D = motion_difference(S, d)
M = magnitude(D)
theta = filter_orientation_tsa(orientation(D), M, 0.004, d)
print(
    f"d={d}: displacement {D.values.shape}, magnitude {M.values.shape}, "
    f"orientation {theta.values.shape}"
)
print(
    f"  zeroed orientation cells (magnitude below 0.004*{d}): "
    f"{float(np.mean(theta.values == 0.0)):.0%}"
)

# The full encoder normalizes each scale into [0, 1], resizes every map to
# a fixed width, and stacks the scales along the channel axis.
mag_img = encode_skelemotion(track, chain, EncoderConfig(MAGNITUDE))
ori_img = encode_skelemotion(track, chain, EncoderConfig(ORIENTATION))
both_img = encode_skelemotion(track, chain, EncoderConfig(MAGNITUDE_ORIENTATION))
print(f"magnitude image: {mag_img.values.shape}  channels {mag_img.layout_string()}")
print(f"orientation image: {ori_img.values.shape}")
print(f"combined image: {both_img.values.shape}")

# Previews: one grayscale per magnitude scale, one RGB per orientation scale
# (planes xy / yz / zx mapped to red / green / blue).  The moving-arm chain
# rows show up as bright horizontal bands.
for i, desc in enumerate(mag_img.channel_layout):
    path = out_dir / f"magnitude_d{desc.scale}.png"
    export_png(mag_img, [i], path)
    print(f"wrote {path}")
for scale_start in range(0, 9, 3):
    scale = ori_img.channel_layout[scale_start].scale
    path = out_dir / f"orientation_d{scale}.png"
    export_png(ori_img, [scale_start, scale_start + 1, scale_start + 2], path)
    print(f"wrote {path}")
