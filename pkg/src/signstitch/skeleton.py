"""Skeleton data model, forward kinematics and per-sequence pose utilities.

Poses are stored as numpy arrays of shape ``(U, K, 3)`` and joint angles as
``(U, A)``; with the standard skeleton ``K = 61`` and ``A = 104``.

Angle convention: radians. A joint with several degrees of freedom applies
its rotations in x, y, z order, each about an axis of the frame produced by
the previous one (intrinsic), so the local rotation is ``Rx @ Ry @ Rz``
restricted to the joint's axes. A joint sits on a keypoint and rotates the
bone that ends at that keypoint together with everything below it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Union

import numpy as np

from .errors import DegenerateFrameError, InvalidInputError, SchemaError

N_KEYPOINTS = 61
N_ANGLES = 104
GROUP_SIZES = {"left_hand": 21, "right_hand": 21, "body": 9, "face": 10}
AXES = "xyz"
SKELETON_FILE_VERSION = 1

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class JointLayout:
    """Keypoint names, groups and the kinematic tree.

    ``parent_index[k]`` is -1 for the root.
    """

    keypoint_names: tuple[str, ...]
    parent_index: tuple[int, ...]
    groups: tuple[str, ...]
    neck_index: int
    shoulder_indices: tuple[int, int]
    torso_index: int
    order: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = len(self.keypoint_names)
        if len(self.parent_index) != k or len(self.groups) != k:
            raise InvalidInputError("names, parents and groups must have equal length")
        if len(set(self.keypoint_names)) != k:
            raise InvalidInputError("keypoint names must be unique")
        roots = [i for i, p in enumerate(self.parent_index) if p < 0]
        if len(roots) != 1:
            raise InvalidInputError(f"expected exactly one root keypoint, found {len(roots)}")
        for i, p in enumerate(self.parent_index):
            if p >= k or p == i:
                raise InvalidInputError(f"keypoint {i} has invalid parent {p}")
        object.__setattr__(self, "order", _topological_order(self.parent_index))
        for idx in (self.neck_index, *self.shoulder_indices, self.torso_index):
            if not 0 <= idx < k:
                raise InvalidInputError(f"reference keypoint index {idx} out of range")

    @property
    def n_keypoints(self) -> int:
        return len(self.keypoint_names)

    @property
    def root_index(self) -> int:
        return self.parent_index.index(-1)

    def index(self, name: str) -> int:
        return self.keypoint_names.index(name)

    def group_indices(self, group: str) -> list[int]:
        return [i for i, g in enumerate(self.groups) if g == group]

    def check_standard(self) -> None:
        """Raise unless this is the 61-keypoint hands/body/face layout."""
        if self.n_keypoints != N_KEYPOINTS:
            raise SchemaError(f"expected {N_KEYPOINTS} keypoints, got {self.n_keypoints}")
        for group, size in GROUP_SIZES.items():
            n = self.groups.count(group)
            if n != size:
                raise SchemaError(f"group {group!r} has {n} keypoints, expected {size}")
        unknown = set(self.groups) - set(GROUP_SIZES)
        if unknown:
            raise SchemaError(f"unknown keypoint groups {sorted(unknown)}")
        for idx in (self.neck_index, *self.shoulder_indices):
            if self.groups[idx] != "body":
                raise SchemaError(f"{self.keypoint_names[idx]!r} must be a body keypoint")
        if self.groups[self.root_index] != "body":
            raise SchemaError("the kinematic root must be a body keypoint")


def _topological_order(parents: tuple[int, ...]) -> tuple[int, ...]:
    children: dict[int, list[int]] = {}
    for i, p in enumerate(parents):
        children.setdefault(p, []).append(i)
    order: list[int] = []
    stack = list(reversed(children.get(-1, [])))
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(reversed(children.get(node, [])))
    if len(order) != len(parents):
        raise InvalidInputError("parent graph contains a cycle")
    return tuple(order)


@dataclass(frozen=True)
class Joint:
    keypoint: int
    axes: str

    @property
    def dof(self) -> int:
        return len(self.axes)


@dataclass(frozen=True, eq=False)
class CanonicalSkeleton:
    """Fixed bone lengths, rest directions and the angle-slot assignment.

    ``angle_slots[s] = (keypoint, axis)`` says which joint axis angle slot
    ``s`` drives. The root entries of ``bone_lengths`` and
    ``rest_directions`` are ignored (stored as zeros).
    """

    layout: JointLayout
    bone_lengths: np.ndarray
    rest_directions: np.ndarray
    joints: tuple[Joint, ...]
    angle_slots: tuple[tuple[int, str], ...]
    _slots_by_keypoint: dict = field(init=False, repr=False)
    _offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lay = self.layout
        lengths = np.array(self.bone_lengths, dtype=float)
        dirs = np.array(self.rest_directions, dtype=float)
        if lengths.shape != (lay.n_keypoints,) or dirs.shape != (lay.n_keypoints, 3):
            raise InvalidInputError("bone_lengths/rest_directions do not match the layout")
        root = lay.root_index
        lengths[root] = 0.0
        dirs[root] = 0.0
        non_root = np.arange(lay.n_keypoints) != root
        if not np.all(np.isfinite(lengths)) or np.any(lengths[non_root] <= 0):
            raise InvalidInputError("bone lengths must be finite and strictly positive")
        norms = np.linalg.norm(dirs[non_root], axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            bad = int(np.flatnonzero(non_root)[np.argmax(np.abs(norms - 1.0))])
            raise InvalidInputError(
                f"rest direction of {lay.keypoint_names[bad]!r} is not a unit vector"
            )

        axes_of: dict[int, str] = {}
        for j in self.joints:
            if j.keypoint in axes_of:
                raise InvalidInputError(f"keypoint {j.keypoint} has more than one joint")
            if not 1 <= j.dof <= 3 or "".join(sorted(j.axes)) != j.axes or set(j.axes) - set(AXES):
                raise InvalidInputError(f"joint at keypoint {j.keypoint} has invalid axes {j.axes!r}")
            if len(set(j.axes)) != len(j.axes):
                raise InvalidInputError(f"joint at keypoint {j.keypoint} repeats an axis")
            axes_of[j.keypoint] = j.axes

        by_kp: dict[int, list[tuple[str, int]]] = {}
        seen = set()
        for slot, (kp, axis) in enumerate(self.angle_slots):
            if axis not in axes_of.get(kp, ""):
                raise InvalidInputError(f"angle slot {slot} maps to unknown joint axis ({kp}, {axis})")
            if (kp, axis) in seen:
                raise InvalidInputError(f"joint axis ({kp}, {axis}) is mapped by two slots")
            seen.add((kp, axis))
            by_kp.setdefault(kp, []).append((axis, slot))
        total_dof = sum(j.dof for j in self.joints)
        if len(seen) != total_dof:
            raise InvalidInputError(
                f"{len(self.angle_slots)} angle slots do not cover {total_dof} joint axes"
            )
        for kp in by_kp:
            by_kp[kp].sort(key=lambda item: AXES.index(item[0]))

        lengths.flags.writeable = False
        dirs.flags.writeable = False
        offsets = lengths[:, None] * dirs
        offsets.flags.writeable = False
        object.__setattr__(self, "bone_lengths", lengths)
        object.__setattr__(self, "rest_directions", dirs)
        object.__setattr__(self, "_slots_by_keypoint", {k: tuple(v) for k, v in by_kp.items()})
        object.__setattr__(self, "_offsets", offsets)

    @property
    def n_angles(self) -> int:
        return len(self.angle_slots)

    @property
    def joint_dof(self) -> dict[int, int]:
        return {j.keypoint: j.dof for j in self.joints}

    def check_standard(self) -> None:
        self.layout.check_standard()
        if self.n_angles != N_ANGLES:
            raise SchemaError(f"expected {N_ANGLES} angle slots, got {self.n_angles}")

    def rest_pose(self) -> np.ndarray:
        return forward_kinematics(np.zeros(self.n_angles), self)


@dataclass
class AngleSequence:
    frames: np.ndarray
    fps: float

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.ndim != 2 or len(self.frames) == 0:
            raise InvalidInputError("angle sequence must be a non-empty (U, A) array")
        if self.fps <= 0:
            raise InvalidInputError("fps must be positive")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass
class PoseSequence:
    frames: np.ndarray
    fps: float

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.ndim != 3 or self.frames.shape[2] != 3 or len(self.frames) == 0:
            raise InvalidInputError("pose sequence must be a non-empty (U, K, 3) array")
        if self.fps <= 0:
            raise InvalidInputError("fps must be positive")

    def __len__(self) -> int:
        return len(self.frames)


def _axis_rotation(axis: str, theta: np.ndarray) -> np.ndarray:
    c = np.cos(theta)
    s = np.sin(theta)
    rot = np.zeros(theta.shape + (3, 3))
    i = AXES.index(axis)
    j, k = (i + 1) % 3, (i + 2) % 3
    rot[..., i, i] = 1.0
    rot[..., j, j] = c
    rot[..., k, k] = c
    rot[..., j, k] = -s
    rot[..., k, j] = s
    return rot


def forward_kinematics(angles, skel: CanonicalSkeleton) -> np.ndarray:
    """Place keypoints from joint angles using the canonical bone lengths.

    ``angles`` may be a single frame ``(A,)`` or a batch ``(U, A)``; the
    result is ``(K, 3)`` or ``(U, K, 3)`` respectively. The root keypoint is
    placed at the origin.
    """
    a = np.asarray(angles, dtype=float)
    single = a.ndim == 1
    a = np.atleast_2d(a)
    if a.ndim != 2 or a.shape[1] != skel.n_angles:
        raise InvalidInputError(f"expected {skel.n_angles} angles per frame, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        bad = np.argwhere(~np.isfinite(a))[0]
        raise InvalidInputError(f"non-finite angle at frame {bad[0]}, slot {bad[1]}")

    lay = skel.layout
    n = len(a)
    pos = np.zeros((n, lay.n_keypoints, 3))
    world: dict[int, np.ndarray] = {}
    identity = np.broadcast_to(np.eye(3), (n, 3, 3))
    for kp in lay.order:
        local = None
        for axis, slot in skel._slots_by_keypoint.get(kp, ()):
            r = _axis_rotation(axis, a[:, slot])
            local = r if local is None else local @ r
        parent = lay.parent_index[kp]
        if parent < 0:
            world[kp] = identity if local is None else local
            continue
        rot = world[parent] if local is None else world[parent] @ local
        world[kp] = rot
        pos[:, kp] = pos[:, parent] + rot @ skel._offsets[kp]
    return pos[0] if single else pos


def forward_kinematics_sequence(seq: AngleSequence, skel: CanonicalSkeleton) -> PoseSequence:
    return PoseSequence(forward_kinematics(seq.frames, skel), seq.fps)


def normalize_pose(seq: PoseSequence, layout: JointLayout, eps: float = 1e-12) -> PoseSequence:
    """Move the neck to the origin and rotate the body into the xy-plane.

    Per frame the left-to-right shoulder vector becomes +x and the torso's
    upward direction (torso keypoint towards neck, made orthogonal to the
    shoulder axis) becomes +y, so shoulders and torso lie in the xy-plane.
    """
    p = seq.frames - seq.frames[:, layout.neck_index][:, None, :]
    left, right = layout.shoulder_indices
    x = p[:, right] - p[:, left]
    nx = np.linalg.norm(x, axis=1)
    bad = np.flatnonzero(nx <= eps)
    if bad.size:
        raise DegenerateFrameError(int(bad[0]), "left and right shoulders coincide")
    ex = x / nx[:, None]
    up = -p[:, layout.torso_index]
    y = up - np.sum(up * ex, axis=1, keepdims=True) * ex
    ny = np.linalg.norm(y, axis=1)
    bad = np.flatnonzero(ny <= eps * np.maximum(1.0, np.linalg.norm(up, axis=1)))
    if bad.size:
        raise DegenerateFrameError(int(bad[0]), "torso is collinear with the shoulder axis")
    ey = y / ny[:, None]
    ez = np.cross(ex, ey)
    rot = np.stack([ex, ey, ez], axis=1)
    out = np.einsum("uij,ukj->uki", rot, p)
    out[:, layout.neck_index] = 0.0
    return PoseSequence(out, seq.fps)


def wrap_angles(a: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]; in-range values are returned bit-exact."""
    a = np.asarray(a, dtype=float)
    outside = (a <= -np.pi) | (a > np.pi)
    if not outside.any():
        return a
    wrapped = np.pi - np.mod(np.pi - a, 2 * np.pi)
    return np.where(outside, wrapped, a)


def _resample_array(x: np.ndarray, target_len: int) -> np.ndarray:
    u = len(x)
    if target_len == u:
        return x.copy()
    if target_len == 1:
        return x[:1].copy()
    if u == 1:
        return np.repeat(x, target_len, axis=0)
    j = np.arange(target_len)
    t = (j * (u - 1)) / (target_len - 1)
    i0 = np.minimum(np.floor(t).astype(int), u - 2)
    frac = (t - i0).reshape((-1,) + (1,) * (x.ndim - 1))
    out = x[i0] * (1.0 - frac) + x[i0 + 1] * frac
    out[0] = x[0]
    out[-1] = x[-1]
    return out


def resample(seq, target_len: int):
    """Linearly resample a sequence to exactly ``target_len`` frames.

    Frame ``j`` of the output samples the input at time ``j (U-1)/(L-1)``.
    Accepts a :class:`PoseSequence`, an :class:`AngleSequence` (angles are
    first mapped into (-pi, pi]) or a bare array with time on axis 0. The fps
    metadata is carried over unchanged.
    """
    if isinstance(target_len, bool) or int(target_len) != target_len or target_len < 1:
        raise InvalidInputError(f"target_len must be a positive integer, got {target_len!r}")
    target_len = int(target_len)
    if isinstance(seq, PoseSequence):
        return PoseSequence(_resample_array(seq.frames, target_len), seq.fps)
    if isinstance(seq, AngleSequence):
        return AngleSequence(_resample_array(wrap_angles(seq.frames), target_len), seq.fps)
    x = np.asarray(seq, dtype=float)
    if x.ndim == 0 or len(x) == 0:
        raise InvalidInputError("cannot resample an empty sequence")
    return _resample_array(x, target_len)


def frame_velocities(frames: np.ndarray) -> np.ndarray:
    """Mean per-keypoint displacement for every consecutive frame pair."""
    frames = np.asarray(frames, dtype=float)
    if len(frames) < 2:
        return np.zeros(0)
    return np.linalg.norm(np.diff(frames, axis=0), axis=-1).mean(axis=-1)


def frame_velocity(seq: PoseSequence, frame_index: int) -> float:
    """Mean keypoint displacement between ``frame_index`` and the next frame."""
    if not 0 <= frame_index < len(seq) - 1:
        raise InvalidInputError(
            f"frame_index {frame_index} out of range for a {len(seq)}-frame sequence"
        )
    step = seq.frames[frame_index + 1] - seq.frames[frame_index]
    return float(np.linalg.norm(step, axis=-1).mean())


# -- skeleton file ---------------------------------------------------------

PathOrStream = Union[str, Path, bytes, IO]


def _read_source(source: PathOrStream) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def skeleton_to_dict(skel: CanonicalSkeleton) -> dict:
    lay = skel.layout
    names = lay.keypoint_names
    keypoints = []
    for i, name in enumerate(names):
        p = lay.parent_index[i]
        keypoints.append(
            {
                "name": name,
                "group": lay.groups[i],
                "parent": None if p < 0 else names[p],
                "bone_length": None if p < 0 else float(skel.bone_lengths[i]),
                "rest_direction": [float(v) for v in skel.rest_directions[i]],
            }
        )
    return {
        "version": SKELETON_FILE_VERSION,
        "neck": names[lay.neck_index],
        "shoulders": [names[i] for i in lay.shoulder_indices],
        "torso": names[lay.torso_index],
        "keypoints": keypoints,
        "joints": [{"keypoint": names[j.keypoint], "dof": j.dof, "axes": list(j.axes)} for j in skel.joints],
        "angle_slots": [{"joint": names[k], "axis": ax} for k, ax in skel.angle_slots],
    }


def skeleton_from_dict(doc: dict, standard: bool = True) -> CanonicalSkeleton:
    """Build a skeleton from its JSON document.

    With ``standard=True`` (the default, used for files) anything other than
    61 keypoints and 104 angle slots is rejected.
    """
    try:
        if doc.get("version") != SKELETON_FILE_VERSION:
            raise SchemaError(f"unsupported skeleton file version {doc.get('version')!r}")
        kps = doc["keypoints"]
        slots = doc["angle_slots"]
        if standard and len(kps) != N_KEYPOINTS:
            raise SchemaError(f"skeleton file has {len(kps)} keypoints, expected {N_KEYPOINTS}")
        if standard and len(slots) != N_ANGLES:
            raise SchemaError(f"skeleton file has {len(slots)} angle slots, expected {N_ANGLES}")
        names = [k["name"] for k in kps]
        index = {n: i for i, n in enumerate(names)}
        parents = tuple(-1 if k["parent"] is None else index[k["parent"]] for k in kps)
        layout = JointLayout(
            keypoint_names=tuple(names),
            parent_index=parents,
            groups=tuple(k.get("group", "body") for k in kps),
            neck_index=index[doc["neck"]],
            shoulder_indices=(index[doc["shoulders"][0]], index[doc["shoulders"][1]]),
            torso_index=index[doc["torso"]],
        )
        lengths = [0.0 if k["bone_length"] is None else k["bone_length"] for k in kps]
        dirs = [k["rest_direction"] for k in kps]
        joints = []
        for j in doc["joints"]:
            axes = "".join(j["axes"])
            if len(axes) != j["dof"]:
                raise SchemaError(f"joint {j['keypoint']!r}: dof {j['dof']} != {len(axes)} axes")
            joints.append(Joint(index[j["keypoint"]], axes))
        angle_slots = tuple((index[s["joint"]], s["axis"]) for s in slots)
        skel = CanonicalSkeleton(layout, np.array(lengths), np.array(dirs), tuple(joints), angle_slots)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"invalid skeleton document: {exc}") from exc
    if standard:
        skel.check_standard()
    return skel


def load_skeleton(source: PathOrStream, standard: bool = True) -> CanonicalSkeleton:
    try:
        doc = json.loads(_read_source(source))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"skeleton file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("skeleton file must contain a JSON object")
    return skeleton_from_dict(doc, standard=standard)


def dump_skeleton(skel: CanonicalSkeleton) -> bytes:
    return (json.dumps(skeleton_to_dict(skel), indent=1, allow_nan=False) + "\n").encode("utf-8")


def save_skeleton(skel: CanonicalSkeleton, path: str | Path) -> None:
    Path(path).write_bytes(dump_skeleton(skel))


# -- the built-in 61-keypoint skeleton -------------------------------------

_FINGERS = ("thumb", "index", "middle", "ring", "pinky")
_FINGER_PARTS = {
    "thumb": ("cmc", "mcp", "ip", "tip"),
    "index": ("mcp", "pip", "dip", "tip"),
    "middle": ("mcp", "pip", "dip", "tip"),
    "ring": ("mcp", "pip", "dip", "tip"),
    "pinky": ("mcp", "pip", "dip", "tip"),
}
# wrist-to-base offset (x mirrored per side), then lengths of the three distal bones
_FINGER_GEOMETRY = {
    "thumb": ((0.030, -0.025, 0.015), (0.035, 0.030, 0.025)),
    "index": ((0.022, -0.088, 0.0), (0.045, 0.025, 0.022)),
    "middle": ((0.007, -0.090, 0.0), (0.050, 0.030, 0.024)),
    "ring": ((-0.008, -0.085, 0.0), (0.045, 0.028, 0.022)),
    "pinky": ((-0.022, -0.078, 0.0), (0.035, 0.020, 0.020)),
}
_FINGER_AXES = ("xz", "xz", "x", "x")

_BODY = (
    # name, parent, offset from parent, joint axes
    ("neck", None, (0.0, 0.0, 0.0), "xyz"),
    ("head", "neck", (0.0, 0.20, 0.0), "xyz"),
    ("left_shoulder", "neck", (-0.18, 0.0, 0.0), "yz"),
    ("right_shoulder", "neck", (0.18, 0.0, 0.0), "yz"),
    ("left_elbow", "left_shoulder", (0.0, -0.28, 0.0), "xyz"),
    ("right_elbow", "right_shoulder", (0.0, -0.28, 0.0), "xyz"),
    ("spine", "neck", (0.0, -0.45, 0.0), "xz"),
    ("left_hip", "spine", (-0.12, 0.0, 0.0), "z"),
    ("right_hip", "spine", (0.12, 0.0, 0.0), "z"),
)
_FACE = (
    ("nose", (0.0, -0.02, 0.10)),
    ("left_eye", (-0.035, 0.02, 0.085)),
    ("right_eye", (0.035, 0.02, 0.085)),
    ("left_ear", (-0.075, 0.0, 0.0)),
    ("right_ear", (0.075, 0.0, 0.0)),
    ("mouth_left", (-0.025, -0.06, 0.08)),
    ("mouth_right", (0.025, -0.06, 0.08)),
    ("upper_lip", (0.0, -0.05, 0.09)),
    ("lower_lip", (0.0, -0.07, 0.085)),
    ("chin", (0.0, -0.10, 0.07)),
)


def _hand_rows(side: str) -> list[tuple]:
    mirror = -1.0 if side == "left" else 1.0
    rows = [(f"{side}_wrist", f"{side}_elbow", (0.0, -0.26, 0.0), "xz")]
    for finger in _FINGERS:
        base, distal = _FINGER_GEOMETRY[finger]
        base = (mirror * base[0], base[1], base[2])
        direction = np.array(base) / np.linalg.norm(base)
        if finger != "thumb":
            direction = np.array([0.0, -1.0, 0.0])
        parent = f"{side}_wrist"
        offsets = [base] + [tuple(length * direction) for length in distal]
        for part, offset, axes in zip(_FINGER_PARTS[finger], offsets, _FINGER_AXES):
            name = f"{side}_{finger}_{part}"
            rows.append((name, parent, offset, axes))
            parent = name
    return rows


def default_skeleton() -> CanonicalSkeleton:
    """The built-in 61-keypoint, 104-angle signing skeleton.

    Keypoints are ordered left hand (21), right hand (21), body (9),
    face (10). The neck is the kinematic root; both hands hang off the
    elbows through their wrist keypoints and the face points off the head.
    Units are roughly metres with +x towards the right shoulder, +y up and
    +z forwards.
    """
    rows: list[tuple] = []
    groups: list[str] = []
    for side in ("left", "right"):
        hand = _hand_rows(side)
        rows += hand
        groups += [f"{side}_hand"] * len(hand)
    rows += list(_BODY)
    groups += ["body"] * len(_BODY)
    rows += [(name, "head", offset, "xy") for name, offset in _FACE]
    groups += ["face"] * len(_FACE)

    names = [r[0] for r in rows]
    index = {n: i for i, n in enumerate(names)}
    parents = tuple(-1 if r[1] is None else index[r[1]] for r in rows)
    offsets = np.array([r[2] for r in rows], dtype=float)
    lengths = np.linalg.norm(offsets, axis=1)
    dirs = np.zeros_like(offsets)
    nz = lengths > 0
    dirs[nz] = offsets[nz] / lengths[nz, None]

    layout = JointLayout(
        keypoint_names=tuple(names),
        parent_index=parents,
        groups=tuple(groups),
        neck_index=index["neck"],
        shoulder_indices=(index["left_shoulder"], index["right_shoulder"]),
        torso_index=index["spine"],
    )
    joints = tuple(Joint(i, r[3]) for i, r in enumerate(rows))
    slots = tuple((j.keypoint, ax) for j in joints for ax in j.axes)
    skel = CanonicalSkeleton(layout, lengths, dirs, joints, slots)
    skel.check_standard()
    return skel
