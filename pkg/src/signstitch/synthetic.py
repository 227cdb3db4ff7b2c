"""Seeded toy dictionaries, embeddings and sentences for tests and demos.

Each toy sign holds a sign-specific offset from the neutral pose and moves
every angle sinusoidally around it, which gives non-static sign boundaries
and realistic-looking gaps between consecutive signs.
"""

from __future__ import annotations

import numpy as np

from .dictionary import Dictionary, EmbeddingTable
from .skeleton import N_ANGLES
from .stitcher import StitchRequest


def toy_sign(rng: np.random.Generator, n_frames: int, fps: float = 25.0, width: int = N_ANGLES,
             offset_scale: float = 0.15, amplitude: tuple[float, float] = (0.05, 0.2),
             freq_hz: tuple[float, float] = (0.5, 1.5)) -> np.ndarray:
    t = np.arange(n_frames)[:, None] / fps
    offset = rng.normal(0.0, offset_scale, width)
    amp = rng.uniform(*amplitude, width)
    freq = rng.uniform(*freq_hz, width)
    phase = rng.uniform(0, 2 * np.pi, width)
    return offset + amp * np.sin(2 * np.pi * freq * t + phase)


def toy_dictionary(n_signs: int = 20, seed: int = 0, frames: tuple[int, int] = (30, 50),
                   fps: float = 25.0, width: int = N_ANGLES) -> Dictionary:
    """Signs named ``SIGN000``, ``SIGN001``, ... with lengths drawn from ``frames`` (inclusive)."""
    rng = np.random.default_rng(seed)
    arrays = []
    for i in range(n_signs):
        u = int(rng.integers(frames[0], frames[1] + 1))
        arrays.append((f"SIGN{i:03d}", toy_sign(rng, u, fps, width)))
    return Dictionary.from_arrays(arrays, fps=fps, skeleton_id="default")


def toy_embeddings(glosses, dim: int = 16, seed: int = 0, extra: int = 0) -> EmbeddingTable:
    """Gaussian vectors for ``glosses`` plus ``extra`` out-of-vocabulary tokens ``OOV000``..."""
    rng = np.random.default_rng(seed)
    vectors = {g: rng.normal(size=dim) for g in glosses}
    for i in range(extra):
        vectors[f"OOV{i:03d}"] = rng.normal(size=dim)
    return EmbeddingTable(dim, vectors)


def toy_requests(d: Dictionary, n: int, glosses_per_request: int = 8, seed: int = 0,
                 with_durations: bool = False, cutoff_hz: float = 4.0) -> list[StitchRequest]:
    rng = np.random.default_rng(seed)
    keys = d.glosses
    out = []
    for i in range(n):
        picks = [keys[j] for j in rng.integers(0, len(keys), glosses_per_request)]
        durations = None
        if with_durations:
            durations = tuple(int(x) for x in rng.integers(15, 60, glosses_per_request))
        out.append(StitchRequest(tuple(picks), durations, cutoff_hz=cutoff_hz, request_id=f"req{i:04d}"))
    return out
