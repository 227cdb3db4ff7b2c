from __future__ import annotations

import struct

import numpy as np
import pytest

from signstitch.errors import FormatError
from signstitch.poseio import (
    decode_pose_json,
    decode_sspk,
    encode_pose_json,
    encode_poses,
    encode_sspk,
    read_poses,
    write_sspk,
)
from signstitch.skeleton import PoseSequence


@pytest.fixture
def seq(rng):
    return PoseSequence(rng.normal(size=(7, 61, 3)), 25.0)


def test_header_layout(seq):
    data = encode_sspk(seq)
    assert data[:4] == b"SSPK"
    assert struct.unpack("<HHIf", data[4:16]) == (1, 61, 7, 25.0)
    assert len(data) == 16 + 7 * 61 * 3 * 4


def test_payload_is_row_major_f32(seq):
    data = encode_sspk(seq)
    first = struct.unpack("<3f", data[16:28])
    np.testing.assert_array_equal(first, seq.frames[0, 0].astype(np.float32))


def test_round_trip_byte_identical(seq, tmp_path):
    path = tmp_path / "a.sspk"
    write_sspk(seq, path)
    back = read_poses(path)
    assert encode_sspk(back) == path.read_bytes()
    np.testing.assert_array_equal(back.frames, seq.frames.astype(np.float32))


def test_json_mirrors_sspk(seq, tmp_path):
    data = encode_poses(seq, "json")
    back = decode_pose_json(data)
    assert back.frames.tobytes() == decode_sspk(encode_sspk(seq)).frames.astype(float).tobytes()
    assert encode_pose_json(back) == data
    path = tmp_path / "a.json"
    path.write_bytes(data)
    assert len(read_poses(path)) == 7


def bad(data, offset, fmt, value):
    out = bytearray(data)
    struct.pack_into(fmt, out, offset, value)
    return bytes(out)


@pytest.mark.parametrize("mutate", [
    lambda d: b"SSPX" + d[4:],
    lambda d: bad(d, 4, "<H", 2),
    lambda d: bad(d, 6, "<H", 60),
    lambda d: bad(d, 8, "<I", 0),
    lambda d: bad(d, 8, "<I", 8),
    lambda d: bad(d, 12, "<f", -25.0),
    lambda d: bad(d, 12, "<f", float("nan")),
    lambda d: d[:-1],
    lambda d: d[:10],
    lambda d: d + b"\0",
])
def test_corruption_rejected(seq, mutate):
    with pytest.raises(FormatError):
        decode_sspk(mutate(encode_sspk(seq)))


@pytest.mark.parametrize("blob", [b"{", b'{"magic":"SSPK","version":2}', b'{"magic":"SSPK","version":1,"keypoints":61,'
                                  b'"frames":2,"fps":25,"coords":[]}'])
def test_bad_json(blob):
    with pytest.raises(FormatError):
        decode_pose_json(blob)


def test_wrong_shape_cannot_be_encoded():
    with pytest.raises(FormatError):
        encode_sspk(PoseSequence(np.zeros((3, 5, 3)), 25))


def test_unknown_format(seq):
    with pytest.raises(ValueError):
        encode_poses(seq, "bvh")
