"""Skeleton-image representations for 3D action recognition.

Converts per-frame 3D joint positions into fixed-size image tensors
(motion magnitude / orientation maps with temporal scale aggregation, plus
coordinate-image baselines), serializes them bit-exactly, and provides
dataset protocol manifests and score-level fusion utilities.
"""

from .skeleton_data import (
    NUM_JOINTS,
    PROTOCOLS,
    BodyTrack,
    DatasetManifest,
    SampleInfo,
    SampleMeta,
    SkeletonParseError,
    SkeletonSequence,
    build_manifest,
    densify_track,
    metadata_from_ntu_name,
    motion_energy,
    parse_interchange,
    parse_ntu_skeleton,
    read_manifest_ids,
    select_bodies,
    write_interchange,
    write_manifest,
)
from .chain_builder import (
    KINECT_CHAIN,
    KINECT_EDGES,
    ChainOrder,
    build_chain_matrix,
    default_chain,
    depth_first_chain,
    load_chain,
)
from .motion_encoder import (
    DEFAULT_DISTANCES,
    DEFAULT_MAGNITUDE_THRESHOLD,
    DEFAULT_MAX_PERSONS,
    DEFAULT_TARGET_WIDTH,
    MAGNITUDE,
    MAGNITUDE_ORIENTATION,
    ORIENTATION,
    ORIENTATION_PLANES,
    ChannelDesc,
    EncodedImage,
    EncoderConfig,
    MagnitudeMap,
    MotionTensor,
    OrientationMap,
    early_fuse,
    encode_skelemotion,
    filter_orientation,
    filter_orientation_tsa,
    magnitude,
    motion_difference,
    normalize,
    orientation,
    resize_temporal,
    stack_persons,
)
from .baselines import (
    COORDINATE,
    NAIVE_MOTION,
    TSSI,
    encode_coordinate_image,
    encode_naive_motion,
    encode_tssi,
)
from .tensor_io import (
    TensorFormatError,
    export_png,
    parse_tensor,
    read_header,
    read_tensor,
    tensor_bytes,
    write_tensor,
)
from .fusion_eval import (
    AccuracyReport,
    ScoreMatrix,
    late_fuse,
    per_class_accuracy,
    read_labels,
    read_scores,
    write_labels,
    write_scores,
)

__version__ = "0.1.0"
