"""Sign stitching: retrieve signs, join them with planned transitions, smooth the result.

The pipeline for one request:

1. every gloss is resolved against the dictionary (embedding fallback for
   unknown glosses), its angle sequence is posed with the canonical skeleton
   and resampled to the requested duration;
2. consecutive signs are joined by linearly interpolated transition frames,
   with the frame count chosen so that the transition moves no faster than
   the motion at the neighbouring sign boundaries;
3. the whole pose sequence is low-pass filtered with a zero-phase
   Butterworth filter.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .dictionary import Dictionary, EmbeddingTable, NearestSignIndex, Resolution, resolve
from .errors import ConfigurationError, InvalidInputError, UnresolvableGlossError
from .skeleton import CanonicalSkeleton, PoseSequence, forward_kinematics, frame_velocities, resample

log = logging.getLogger(__name__)

DEFAULT_CUTOFF_HZ = 4.0
DEFAULT_FPS = 25.0
DEFAULT_FILTER_ORDER = 4
_STATIC_EPS = 1e-9


def round_half_up(x: float) -> int:
    """Frame-count rounding used throughout: halves round away from zero."""
    return int(math.floor(x + 0.5))


def _check_nyquist(cutoff_hz: float, fps: float) -> None:
    if not 0 < cutoff_hz < fps / 2:
        raise ConfigurationError(f"cutoff {cutoff_hz} Hz must lie in (0, {fps / 2}) for {fps} fps")


@dataclass(frozen=True)
class StitchRequest:
    """One sentence to synthesise.

    ``durations`` are output-rate frame counts, one per gloss; ``None``
    means each sign keeps its recorded length (rescaled to ``fps``).
    ``duration_scale`` multiplies every duration after defaulting.
    """

    glosses: tuple[str, ...]
    durations: tuple[int, ...] | None = None
    cutoff_hz: float = DEFAULT_CUTOFF_HZ
    fps: float = DEFAULT_FPS
    seed: int = 0
    request_id: str = ""
    duration_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "glosses", tuple(self.glosses))
        if not self.glosses:
            raise InvalidInputError("a request needs at least one gloss")
        if self.durations is not None:
            durations = tuple(int(d) for d in self.durations)
            if len(durations) != len(self.glosses):
                raise InvalidInputError(
                    f"{len(durations)} durations given for {len(self.glosses)} glosses"
                )
            if any(d < 1 for d in durations):
                raise InvalidInputError("durations must be positive frame counts")
            object.__setattr__(self, "durations", durations)
        if self.fps <= 0:
            raise ConfigurationError("fps must be positive")
        if self.duration_scale <= 0:
            raise InvalidInputError("duration_scale must be positive")
        if self.seed < 0:
            raise InvalidInputError("seed must be non-negative")
        _check_nyquist(self.cutoff_hz, self.fps)


@dataclass(frozen=True)
class TransitionPolicy:
    """How transition lengths are planned.

    ``velocity`` picks which boundary speed bounds the transition: ``"max"``
    (shorter transitions) or ``"min"``. ``max_frames`` is the length used
    between static boundaries; it only caps ordinary transitions when
    ``clamp_to_max`` is set, since capping can exceed the velocity bound.
    """

    boundary_window: int = 3
    min_frames: int = 1
    max_frames: int = 12
    velocity: str = "max"
    clamp_to_max: bool = False

    def __post_init__(self):
        if self.boundary_window < 1:
            raise InvalidInputError("boundary_window must be >= 1")
        if not 0 <= self.min_frames <= self.max_frames:
            raise InvalidInputError("need 0 <= min_frames <= max_frames")
        if self.velocity not in ("max", "min"):
            raise InvalidInputError(f"unknown velocity mode {self.velocity!r}")


@dataclass(frozen=True)
class TransitionPlan:
    n: int
    distance: float
    velocity: float
    capped: bool = False

    @property
    def step(self) -> float:
        """Mean keypoint displacement per frame inside the transition."""
        return self.distance / (self.n + 1)


@dataclass
class StitchResult:
    poses: PoseSequence
    gloss_spans: list[tuple[int, int]]
    transition_spans: list[tuple[int, int]]
    resolved_glosses: list[str]
    transitions: list[TransitionPlan] = field(default_factory=list)
    similarities: list[float] = field(default_factory=list)

    @property
    def segment_spans(self) -> list[tuple[int, int]]:
        return sorted(self.gloss_spans + self.transition_spans)

    def sidecar(self) -> dict:
        return {
            "gloss_spans": [list(s) for s in self.gloss_spans],
            "transition_spans": [list(s) for s in self.transition_spans],
            "resolved_glosses": list(self.resolved_glosses),
        }


def _boundary_speed(frames: np.ndarray, window: int, at_end: bool) -> float:
    if len(frames) < 2:
        return 0.0
    k = min(window, len(frames) - 1)
    part = frames[-(k + 1):] if at_end else frames[: k + 1]
    return float(frame_velocities(part).mean())


def plan_transition(out_seq, in_seq, policy: TransitionPolicy = TransitionPolicy()) -> TransitionPlan:
    """Choose how many frames to insert between two signs.

    ``n = max(ceil(d / v), min_frames)`` where ``d`` is the mean keypoint
    distance between the boundary poses and ``v`` the boundary speed (mean
    displacement per frame over the last/first ``boundary_window`` frame
    pairs, combined per ``policy.velocity``), so each of the ``n + 1`` steps
    moves at most ``v``. A gap between static boundaries gets ``max_frames``;
    with ``policy.clamp_to_max`` every ``n`` is also capped there and plans
    that exceed the bound are marked ``capped``.
    """
    a = out_seq.frames if isinstance(out_seq, PoseSequence) else np.asarray(out_seq)
    b = in_seq.frames if isinstance(in_seq, PoseSequence) else np.asarray(in_seq)
    if len(a) == 0 or len(b) == 0:
        raise InvalidInputError("cannot plan a transition from or to an empty sequence")
    d = float(np.linalg.norm(b[0] - a[-1], axis=-1).mean())
    v_out = _boundary_speed(a, policy.boundary_window, at_end=True)
    v_in = _boundary_speed(b, policy.boundary_window, at_end=False)
    v = max(v_out, v_in) if policy.velocity == "max" else min(v_out, v_in)
    if d <= _STATIC_EPS:
        return TransitionPlan(policy.min_frames, d, v)
    if v <= _STATIC_EPS:
        return TransitionPlan(policy.max_frames, d, v, capped=True)
    n = max(math.ceil(d / v), policy.min_frames)
    if policy.clamp_to_max and n > policy.max_frames:
        return TransitionPlan(policy.max_frames, d, v, capped=True)
    return TransitionPlan(n, d, v)


def interpolate_transition(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Frames strictly between ``a`` and ``b``: frame j (1-based) is a + (b-a) j/(n+1)."""
    if n < 0:
        raise InvalidInputError("transition length must be non-negative")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = (np.arange(1, n + 1) / (n + 1)).reshape((-1,) + (1,) * a.ndim)
    return a + (b - a) * w


def zero_phase_lowpass(x: np.ndarray, cutoff_hz: float, fps: float, order: int = DEFAULT_FILTER_ORDER) -> np.ndarray:
    """Forward-backward Butterworth low-pass along axis 0.

    Each pass uses an ``order``-pole filter, so the overall magnitude response
    is ``1 / (1 + (f / cutoff)^(2 order))`` and the phase is zero. Edges are
    padded by odd reflection over ``3 * order`` samples. The filtfilt start-up
    transient depends on direction, so the result is averaged with the
    mirrored run; filtering commutes exactly with time reversal. Sequences
    shorter than ``3 * order`` are returned unchanged with a warning.
    """
    _check_nyquist(cutoff_hz, fps)
    if order < 2 or order % 2:
        raise ConfigurationError(f"filter order must be a positive even integer, got {order}")
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 3 * order:
        log.warning("sequence of %d frames is shorter than %d; skipping low-pass filter", n, 3 * order)
        return x.copy()
    sos = signal.butter(order, cutoff_hz, btype="low", fs=fps, output="sos")
    padlen = min(3 * order, n - 1)
    ahead = signal.sosfiltfilt(sos, x, axis=0, padtype="odd", padlen=padlen)
    behind = signal.sosfiltfilt(sos, x[::-1], axis=0, padtype="odd", padlen=padlen)[::-1]
    return 0.5 * (ahead + behind)


def butterworth_lowpass(seq: PoseSequence, cutoff_hz: float, order: int = DEFAULT_FILTER_ORDER) -> PoseSequence:
    """Filter every coordinate channel of a pose sequence independently."""
    frames = seq.frames
    flat = frames.reshape(len(frames), -1)
    out = zero_phase_lowpass(flat, cutoff_hz, seq.fps, order)
    return PoseSequence(out.reshape(frames.shape), seq.fps)


def concatenate_with_transitions(segments: list[np.ndarray], policy: TransitionPolicy = TransitionPolicy()):
    """Join pose segments with planned transitions, before any filtering.

    Returns ``(frames, gloss_spans, transition_spans, plans)``. Spans are
    half-open ``(start, end)`` frame ranges; every boundary gets a transition
    span, possibly empty.
    """
    plans = [plan_transition(segments[i], segments[i + 1], policy) for i in range(len(segments) - 1)]
    total = sum(len(s) for s in segments) + sum(p.n for p in plans)
    out = np.empty((total,) + segments[0].shape[1:])
    gloss_spans, transition_spans = [], []
    pos = 0
    for i, seg in enumerate(segments):
        out[pos:pos + len(seg)] = seg
        gloss_spans.append((pos, pos + len(seg)))
        pos += len(seg)
        if i < len(plans):
            n = plans[i].n
            out[pos:pos + n] = interpolate_transition(seg[-1], segments[i + 1][0], n)
            transition_spans.append((pos, pos + n))
            pos += n
    return out, gloss_spans, transition_spans, plans


class Stitcher:
    """Holds the immutable dictionary, skeleton and embeddings for many requests.

    Forward kinematics of each dictionary entry is computed once and reused.
    """

    def __init__(
        self,
        dictionary: Dictionary,
        skeleton: CanonicalSkeleton,
        embeddings: EmbeddingTable | None = None,
        policy: TransitionPolicy = TransitionPolicy(),
        filter_order: int = DEFAULT_FILTER_ORDER,
        fold: bool = False,
    ):
        if dictionary.width != skeleton.n_angles:
            raise ConfigurationError(
                f"dictionary has {dictionary.width} angles per frame, skeleton expects {skeleton.n_angles}"
            )
        self.dictionary = dictionary
        self.skeleton = skeleton
        self.embeddings = embeddings
        self.policy = policy
        self.filter_order = filter_order
        self.fold = fold
        self._index = NearestSignIndex(dictionary, embeddings) if embeddings is not None else None
        self._poses: dict[str, np.ndarray] = {}

    def entry_poses(self, gloss: str) -> np.ndarray:
        poses = self._poses.get(gloss)
        if poses is None:
            poses = forward_kinematics(self.dictionary.entries[gloss].angles.frames, self.skeleton)
            poses.flags.writeable = False
            self._poses[gloss] = poses
        return poses

    def resolve(self, request: StitchRequest) -> list[Resolution]:
        out = []
        for position, gloss in enumerate(request.glosses):
            try:
                if self._index is None:
                    out.append(resolve(self.dictionary, gloss, None, fold=self.fold))
                else:
                    out.append(self._index.resolve(gloss, fold=self.fold))
            except UnresolvableGlossError as exc:
                raise UnresolvableGlossError(gloss, str(exc).split(": ", 1)[-1], position) from None
        return out

    def durations(self, request: StitchRequest, resolutions: list[Resolution]) -> list[int]:
        if request.durations is not None:
            base = list(request.durations)
        else:
            ratio = request.fps / self.dictionary.fps
            base = [max(1, round_half_up(r.entry.n_frames * ratio)) for r in resolutions]
        if request.duration_scale != 1.0:
            base = [max(1, round_half_up(d * request.duration_scale)) for d in base]
        return base

    def retrieve(self, request: StitchRequest) -> tuple[list[np.ndarray], list[Resolution]]:
        resolutions = self.resolve(request)
        lengths = self.durations(request, resolutions)
        segments = [resample(self.entry_poses(r.matched_gloss), d) for r, d in zip(resolutions, lengths)]
        return segments, resolutions

    def stitch(self, request: StitchRequest, apply_filter: bool = True) -> StitchResult:
        segments, resolutions = self.retrieve(request)
        frames, gloss_spans, transition_spans, plans = concatenate_with_transitions(segments, self.policy)
        if apply_filter:
            flat = frames.reshape(len(frames), -1)
            frames = zero_phase_lowpass(flat, request.cutoff_hz, request.fps, self.filter_order).reshape(frames.shape)
        return StitchResult(
            poses=PoseSequence(frames, request.fps),
            gloss_spans=gloss_spans,
            transition_spans=transition_spans,
            resolved_glosses=[r.matched_gloss for r in resolutions],
            transitions=plans,
            similarities=[r.similarity for r in resolutions],
        )


def retrieve_signs(
    request: StitchRequest,
    dictionary: Dictionary,
    embeddings: EmbeddingTable | None,
    skeleton: CanonicalSkeleton,
) -> list[PoseSequence]:
    segments, _ = Stitcher(dictionary, skeleton, embeddings).retrieve(request)
    return [PoseSequence(s, request.fps) for s in segments]


def stitch(
    request: StitchRequest,
    dictionary: Dictionary,
    embeddings: EmbeddingTable | None,
    skeleton: CanonicalSkeleton,
    policy: TransitionPolicy = TransitionPolicy(),
) -> StitchResult:
    return Stitcher(dictionary, skeleton, embeddings, policy).stitch(request)

