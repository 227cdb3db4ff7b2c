"""Pose sequence files.

SSPK layout (little-endian)::

    offset  size  field
    0       4     magic b"SSPK"
    4       2     u16 version (1)
    6       2     u16 keypoints (61)
    8       4     u32 frames
    12      4     f32 fps
    16      ...   frames * keypoints * 3 f32, row-major (frame, keypoint, xyz)

The JSON variant carries the same fields with coordinates as nested lists.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .skeleton import N_KEYPOINTS, PathOrStream, PoseSequence, _read_source

MAGIC = b"SSPK"
VERSION = 1
HEADER = struct.Struct("<4sHHIf")


def encode_sspk(seq: PoseSequence) -> bytes:
    frames = np.asarray(seq.frames)
    if frames.ndim != 3 or frames.shape[1:] != (N_KEYPOINTS, 3):
        raise FormatError(f"SSPK stores (U, {N_KEYPOINTS}, 3) poses, got {frames.shape}")
    payload = frames.astype("<f4", copy=False).tobytes(order="C")
    return HEADER.pack(MAGIC, VERSION, N_KEYPOINTS, len(frames), seq.fps) + payload


def decode_sspk(data: bytes) -> PoseSequence:
    if len(data) < HEADER.size:
        raise FormatError(f"SSPK stream too short for a header ({len(data)} bytes)")
    magic, version, keypoints, n_frames, fps = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad SSPK magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported SSPK version {version}")
    if keypoints != N_KEYPOINTS:
        raise FormatError(f"SSPK keypoint count {keypoints}, expected {N_KEYPOINTS}")
    if n_frames == 0:
        raise FormatError("SSPK file has zero frames")
    if not np.isfinite(fps) or fps <= 0:
        raise FormatError(f"invalid SSPK fps {fps}")
    expected = HEADER.size + n_frames * keypoints * 3 * 4
    if len(data) != expected:
        raise FormatError(f"SSPK size {len(data)} bytes, header implies {expected}")
    coords = np.frombuffer(data, dtype="<f4", offset=HEADER.size).reshape(n_frames, keypoints, 3)
    return PoseSequence(coords.astype(np.float32), float(fps))


def write_sspk(seq: PoseSequence, path: str | Path) -> None:
    Path(path).write_bytes(encode_sspk(seq))


def read_sspk(source: PathOrStream) -> PoseSequence:
    return decode_sspk(_read_source(source))


def encode_pose_json(seq: PoseSequence) -> bytes:
    # round through f32 so both formats carry identical values
    coords = np.asarray(seq.frames).astype("<f4").astype(float)
    fps = float(np.float32(seq.fps))
    doc = {
        "magic": MAGIC.decode(),
        "version": VERSION,
        "keypoints": int(coords.shape[1]),
        "frames": int(coords.shape[0]),
        "fps": fps,
        "coords": coords.tolist(),
    }
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


def decode_pose_json(data: bytes) -> PoseSequence:
    try:
        doc = json.loads(data)
        if doc["magic"] != MAGIC.decode() or doc["version"] != VERSION:
            raise FormatError("not a version-1 SSPK JSON document")
        coords = np.array(doc["coords"], dtype=float)
        if coords.shape != (doc["frames"], doc["keypoints"], 3) or doc["keypoints"] != N_KEYPOINTS:
            raise FormatError(f"coords shape {coords.shape} disagrees with the header fields")
        return PoseSequence(coords, float(doc["fps"]))
    except FormatError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"invalid pose JSON: {exc}") from exc


def encode_poses(seq: PoseSequence, fmt: str = "sspk") -> bytes:
    if fmt == "sspk":
        return encode_sspk(seq)
    if fmt == "json":
        return encode_pose_json(seq)
    raise ValueError(f"unknown pose format {fmt!r}")


def read_poses(path: str | Path) -> PoseSequence:
    """Read either format, dispatching on the leading bytes."""
    data = Path(path).read_bytes()
    if data[:4] == MAGIC:
        return decode_sspk(data)
    if data.lstrip()[:1] == b"{":
        return decode_pose_json(data)
    return decode_sspk(data)


def encode_sidecar(sidecar: dict) -> bytes:
    return (json.dumps(sidecar, sort_keys=True) + "\n").encode("utf-8")
