"""Gloss-order permutation, speed variation and schedule expansion.

Randomness comes from ``numpy.random.Generator`` over the PCG64 bit
generator seeded with a 64-bit integer. Shuffles are explicit Fisher-Yates
loops over ``Generator.integers`` so results do not depend on how numpy
implements ``permutation``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, SchemaError
from .skeleton import PathOrStream, PoseSequence, _read_source, resample
from .stitcher import StitchRequest, StitchResult, Stitcher, round_half_up

PERMUTE_MODES = ("window", "swaps")
SPEED_MODES = ("sequence", "durations")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def permutation_indices(g: int, n: int, seed: int, mode: str = "window") -> list[int]:
    """Index order produced by :func:`permute_glosses` for a length-``g`` list.

    ``window``: draw a start uniformly from the ``g - w + 1`` windows of
    length ``w = min(n, g)``, then Fisher-Yates shuffle that window.
    ``swaps``: ``n`` times, swap a uniformly drawn adjacent pair.
    """
    if n < 0:
        raise InvalidInputError("permutation count must be >= 0")
    if mode not in PERMUTE_MODES:
        raise InvalidInputError(f"unknown permute mode {mode!r}")
    order = list(range(g))
    if n == 0 or g < 2:
        return order
    rng = make_rng(seed)
    if mode == "swaps":
        for _ in range(n):
            i = int(rng.integers(0, g - 1))
            order[i], order[i + 1] = order[i + 1], order[i]
        return order
    w = min(n, g)
    start = int(rng.integers(0, g - w + 1))
    for i in range(w - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        order[start + i], order[start + j] = order[start + j], order[start + i]
    return order


def permute_glosses(glosses: Sequence[str], n: int, seed: int, mode: str = "window") -> list[str]:
    """Randomly reorder ``n`` sequential glosses; ``n = 0`` is the identity."""
    return [glosses[i] for i in permutation_indices(len(glosses), n, seed, mode)]


def scaled_length(n_frames: int, scale: float) -> int:
    if scale <= 0:
        raise InvalidInputError(f"speed scale must be positive, got {scale}")
    length = round_half_up(n_frames * scale)
    if length < 1:
        raise InvalidInputError(f"scale {scale} leaves no frames from {n_frames}")
    return length


def scale_speed(poses: PoseSequence, scale: float) -> PoseSequence:
    """Resample to ``round(U * scale)`` frames at unchanged fps."""
    return resample(poses, scaled_length(len(poses), scale))


def rescale_spans(spans, old_len: int, new_len: int):
    if old_len == new_len:
        return list(spans)
    f = lambda b: round_half_up(b * new_len / old_len)  # noqa: E731
    return [(f(a), f(b)) for a, b in spans]


@dataclass(frozen=True)
class AugmentSchedule:
    permutation_ns: tuple[int, ...] = (0,)
    speed_scales: tuple[float, ...] = (1.0,)
    copies_per_combo: int = 1
    seed: int = 0
    permute_mode: str = "window"
    speed_mode: str = "sequence"

    def __post_init__(self):
        object.__setattr__(self, "permutation_ns", tuple(int(n) for n in self.permutation_ns))
        object.__setattr__(self, "speed_scales", tuple(float(s) for s in self.speed_scales))
        if any(n < 0 for n in self.permutation_ns):
            raise InvalidInputError("permutation counts must be >= 0")
        if any(not s > 0 for s in self.speed_scales):
            raise InvalidInputError("speed scales must be positive")
        if self.copies_per_combo < 1:
            raise InvalidInputError("copies must be >= 1")
        if self.seed < 0:
            raise InvalidInputError("seed must be non-negative")
        if self.permute_mode not in PERMUTE_MODES:
            raise InvalidInputError(f"unknown permute_mode {self.permute_mode!r}")
        if self.speed_mode not in SPEED_MODES:
            raise InvalidInputError(f"unknown speed_mode {self.speed_mode!r}")

    def as_dict(self) -> dict:
        return {
            "permutation_ns": list(self.permutation_ns),
            "speed_scales": list(self.speed_scales),
            "copies": self.copies_per_combo,
            "seed": self.seed,
            "permute_mode": self.permute_mode,
            "speed_mode": self.speed_mode,
        }


def load_schedule(source: PathOrStream) -> AugmentSchedule:
    try:
        doc = json.loads(_read_source(source))
        return AugmentSchedule(
            permutation_ns=tuple(doc.get("permutation_ns", [0])),
            speed_scales=tuple(doc.get("speed_scales", [1.0])),
            copies_per_combo=int(doc.get("copies", 1)),
            seed=int(doc.get("seed", 0)),
            permute_mode=doc.get("permute_mode", "window"),
            speed_mode=doc.get("speed_mode", "sequence"),
        )
    except InvalidInputError as exc:
        raise SchemaError(f"invalid schedule: {exc}") from exc
    except (ValueError, TypeError, AttributeError) as exc:
        raise SchemaError(f"schedule is not a valid JSON object: {exc}") from exc


def derive_seed(base_seed: int, request_id: str, n: int, scale: float, copy: int) -> int:
    """64-bit seed that depends only on the provenance tuple."""
    key = f"{base_seed}|{request_id}|{n}|{float(scale)!r}|{copy}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Variant:
    """An augmented request plus the post-stitch operations still to apply."""

    request: StitchRequest
    source_id: str
    n: int
    scale: float
    copy: int
    seed: int
    speed_mode: str = "sequence"
    order: tuple[int, ...] = field(default=(), repr=False)

    @property
    def name(self) -> str:
        return f"{self.source_id}.N{self.n}.s{self.scale!r}.c{self.copy}"

    @property
    def post_scale(self) -> float:
        return self.scale if self.speed_mode == "sequence" else 1.0

    def provenance(self) -> dict:
        return {
            "source_id": self.source_id,
            "n": self.n,
            "scale": self.scale,
            "copy": self.copy,
            "seed": self.seed,
            "speed_mode": self.speed_mode,
            "glosses": list(self.request.glosses),
        }


def expand_schedule(requests: Sequence[StitchRequest], schedule: AugmentSchedule) -> list[Variant]:
    """Cross every request with every (N, scale, copy) combination.

    Permutation happens here, before retrieval, so explicit durations move
    with their glosses. Requests without an id are named by position.
    """
    variants = []
    for index, req in enumerate(requests):
        rid = req.request_id or str(index)
        for n in schedule.permutation_ns:
            for scale in schedule.speed_scales:
                for copy in range(schedule.copies_per_combo):
                    seed = derive_seed(schedule.seed, rid, n, scale, copy)
                    order = permutation_indices(len(req.glosses), n, seed, schedule.permute_mode)
                    durations = None if req.durations is None else tuple(req.durations[i] for i in order)
                    dscale = req.duration_scale * scale if schedule.speed_mode == "durations" else req.duration_scale
                    new = replace(
                        req,
                        glosses=tuple(req.glosses[i] for i in order),
                        durations=durations,
                        seed=seed,
                        request_id=rid,
                        duration_scale=dscale,
                    )
                    variants.append(Variant(new, rid, n, scale, copy, seed, schedule.speed_mode, tuple(order)))
    return variants


def realize_variant(variant: Variant, stitcher: Stitcher) -> StitchResult:
    """Stitch a variant and apply its sequence-level speed change."""
    result = stitcher.stitch(variant.request)
    if variant.post_scale == 1.0:
        return result
    u = len(result.poses)
    poses = scale_speed(result.poses, variant.post_scale)
    result.gloss_spans = rescale_spans(result.gloss_spans, u, len(poses))
    result.transition_spans = rescale_spans(result.transition_spans, u, len(poses))
    result.poses = poses
    return result
