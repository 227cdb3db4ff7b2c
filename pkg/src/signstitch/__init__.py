"""Synthesise continuous sign-language skeleton sequences by stitching isolated signs.

Typical use::

    from signstitch import Stitcher, StitchRequest, default_skeleton, load_dictionary

    stitcher = Stitcher(load_dictionary("dict.json"), default_skeleton())
    result = stitcher.stitch(StitchRequest(["WETTER", "MORGEN", "REGEN"]))
    result.poses.frames  # (U, 61, 3)
"""

from .augment import (
    AugmentSchedule,
    Variant,
    expand_schedule,
    load_schedule,
    permute_glosses,
    realize_variant,
    scale_speed,
)
from .dictionary import (
    CoverageReport,
    DictEntry,
    Dictionary,
    EmbeddingTable,
    NearestSignIndex,
    Resolution,
    coverage,
    dump_dictionary,
    load_dictionary,
    load_embeddings,
    lookup,
    resolve,
    save_dictionary,
)
from .errors import (
    ConfigurationError,
    DegenerateFrameError,
    DuplicateGlossError,
    FormatError,
    InvalidInputError,
    SchemaError,
    SignStitchError,
    UnresolvableGlossError,
)
from .metrics import ScoreReport, bleu, rouge_l, score
from .poseio import decode_sspk, encode_sspk, read_sspk, write_sspk
from .skeleton import (
    AngleSequence,
    CanonicalSkeleton,
    JointLayout,
    PoseSequence,
    default_skeleton,
    forward_kinematics,
    frame_velocity,
    load_skeleton,
    normalize_pose,
    resample,
    save_skeleton,
)
from .stitcher import (
    StitchRequest,
    StitchResult,
    Stitcher,
    TransitionPlan,
    TransitionPolicy,
    butterworth_lowpass,
    interpolate_transition,
    plan_transition,
    retrieve_signs,
    stitch,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSequence",
    "AugmentSchedule",
    "CanonicalSkeleton",
    "ConfigurationError",
    "CoverageReport",
    "DegenerateFrameError",
    "DictEntry",
    "Dictionary",
    "DuplicateGlossError",
    "EmbeddingTable",
    "FormatError",
    "InvalidInputError",
    "JointLayout",
    "NearestSignIndex",
    "PoseSequence",
    "Resolution",
    "SchemaError",
    "ScoreReport",
    "SignStitchError",
    "StitchRequest",
    "StitchResult",
    "Stitcher",
    "TransitionPlan",
    "TransitionPolicy",
    "UnresolvableGlossError",
    "Variant",
    "bleu",
    "butterworth_lowpass",
    "coverage",
    "decode_sspk",
    "default_skeleton",
    "dump_dictionary",
    "encode_sspk",
    "expand_schedule",
    "forward_kinematics",
    "frame_velocity",
    "interpolate_transition",
    "load_dictionary",
    "load_embeddings",
    "load_schedule",
    "load_skeleton",
    "lookup",
    "normalize_pose",
    "permute_glosses",
    "plan_transition",
    "read_sspk",
    "realize_variant",
    "resample",
    "resolve",
    "retrieve_signs",
    "rouge_l",
    "save_dictionary",
    "save_skeleton",
    "scale_speed",
    "score",
    "stitch",
    "write_sspk",
]
