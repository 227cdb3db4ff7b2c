"""The isolated-sign dictionary: persistence, gloss lookup and embedding fallback."""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DuplicateGlossError, FormatError, SchemaError, UnresolvableGlossError
from .skeleton import N_ANGLES, AngleSequence, PathOrStream, _read_source

log = logging.getLogger(__name__)

DICTIONARY_FILE_VERSION = 1
LOW_SIMILARITY_WARNING = 0.5

_VARIANT_SUFFIX = re.compile(r"[-_]?\d+$")


def fold_gloss(gloss: str) -> str:
    """Optional gloss normalisation: upper-case and drop a numbered variant suffix.

    ``"regen2"`` and ``"REGEN-1"`` both fold to ``"REGEN"``.
    """
    folded = gloss.upper()
    stripped = _VARIANT_SUFFIX.sub("", folded)
    return stripped or folded


@dataclass(frozen=True)
class DictEntry:
    gloss: str
    angles: AngleSequence

    @property
    def n_frames(self) -> int:
        return len(self.angles)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Mapping gloss -> recorded joint-angle sequence, all at one capture rate."""

    entries: Mapping[str, DictEntry]
    fps: float = 25.0
    skeleton_id: str = "default"

    def __post_init__(self):
        if not self.entries:
            raise SchemaError("dictionary has no entries")
        widths = {e.angles.frames.shape[1] for e in self.entries.values()}
        if len(widths) != 1:
            raise SchemaError(f"dictionary entries have mixed frame widths {sorted(widths)}")
        if self.fps <= 0:
            raise SchemaError("dictionary fps must be positive")

    @classmethod
    def from_arrays(cls, arrays: Iterable[tuple[str, np.ndarray]], fps: float = 25.0, skeleton_id: str = "default"):
        entries: dict[str, DictEntry] = {}
        for gloss, frames in arrays:
            if gloss in entries:
                raise DuplicateGlossError(gloss)
            entries[gloss] = DictEntry(gloss, AngleSequence(np.asarray(frames, dtype=float), fps))
        return cls(entries, fps, skeleton_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, gloss: str) -> bool:
        return gloss in self.entries

    @property
    def glosses(self) -> list[str]:
        return sorted(self.entries)

    @property
    def width(self) -> int:
        return next(iter(self.entries.values())).angles.frames.shape[1]

    def folded_index(self) -> dict[str, str]:
        """Folded gloss -> original key; the lexicographically smallest key wins on collisions."""
        index: dict[str, str] = {}
        for gloss in sorted(self.entries):
            index.setdefault(fold_gloss(gloss), gloss)
        return index


# -- dictionary file -------------------------------------------------------


def _check_frames(gloss: str, frames, width: int) -> np.ndarray:
    if not isinstance(frames, list) or not frames:
        raise SchemaError(f"entry {gloss!r}: frames must be a non-empty list")
    for i, row in enumerate(frames):
        if not isinstance(row, list) or len(row) != width:
            n = len(row) if isinstance(row, list) else "?"
            raise SchemaError(f"entry {gloss!r}, frame {i}: expected {width} angles, got {n}")
    try:
        arr = np.array(frames, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"entry {gloss!r}: non-numeric angle ({exc})") from exc
    if not np.all(np.isfinite(arr)):
        i = int(np.argwhere(~np.isfinite(arr))[0][0])
        raise SchemaError(f"entry {gloss!r}, frame {i}: non-finite angle")
    return arr


def dictionary_from_doc(doc, width: int = N_ANGLES) -> Dictionary:
    if not isinstance(doc, dict):
        raise FormatError("dictionary file must contain a JSON object")
    if doc.get("version") != DICTIONARY_FILE_VERSION:
        raise SchemaError(f"unsupported dictionary version {doc.get('version')!r}")
    fps = doc.get("fps")
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or not fps > 0:
        raise SchemaError(f"invalid dictionary fps {fps!r}")
    skeleton_id = doc.get("skeleton_id")
    if not isinstance(skeleton_id, str):
        raise SchemaError("skeleton_id must be a string")
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise SchemaError("entries must be a list")
    arrays = []
    seen = set()
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise SchemaError(f"entry {i} is not an object")
        gloss = item.get("gloss")
        if not isinstance(gloss, str) or not gloss:
            raise SchemaError(f"entry {i}: gloss must be a non-empty string")
        if gloss in seen:
            raise DuplicateGlossError(gloss)
        seen.add(gloss)
        arrays.append((gloss, _check_frames(gloss, item.get("frames"), width)))
    return Dictionary.from_arrays(arrays, float(fps), skeleton_id)


def load_dictionary(source: PathOrStream, width: int = N_ANGLES) -> Dictionary:
    """Read and validate a dictionary file (path, bytes or binary stream)."""
    try:
        doc = json.loads(_read_source(source))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"dictionary is not valid JSON: {exc}") from exc
    return dictionary_from_doc(doc, width)


def dump_dictionary(d: Dictionary) -> bytes:
    """Serialise deterministically; entries keep their insertion order."""
    fps = d.fps
    if float(fps).is_integer():
        fps = int(fps)
    parts = [
        '{"version": %d, "fps": %s, "skeleton_id": %s, "entries": ['
        % (DICTIONARY_FILE_VERSION, json.dumps(fps), json.dumps(d.skeleton_id))
    ]
    rows = []
    for entry in d.entries.values():
        frames = ",\n  ".join(json.dumps(row, allow_nan=False) for row in entry.angles.frames.tolist())
        rows.append('\n {"gloss": %s, "frames": [\n  %s]}' % (json.dumps(entry.gloss), frames))
    parts.append(",".join(rows))
    parts.append("\n]}\n")
    return "".join(parts).encode("utf-8")


def save_dictionary(d: Dictionary, path: str | Path) -> None:
    Path(path).write_bytes(dump_dictionary(d))


# -- embeddings ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    dim: int
    vectors: Mapping[str, np.ndarray]

    def __post_init__(self):
        for token, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise SchemaError(f"embedding for {token!r} has shape {vec.shape}, expected ({self.dim},)")
            if not np.all(np.isfinite(vec)) or np.linalg.norm(vec) <= 1e-12:
                raise SchemaError(f"embedding for {token!r} is zero or non-finite")

    @classmethod
    def from_mapping(cls, vectors: Mapping[str, Iterable[float]]) -> "EmbeddingTable":
        arrs = {k: np.asarray(v, dtype=float) for k, v in vectors.items()}
        dim = len(next(iter(arrs.values()))) if arrs else 0
        return cls(dim, arrs)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors


def load_embeddings(source: PathOrStream) -> EmbeddingTable:
    """Parse the text format: a ``dim N`` header then ``token v1 ... vN`` lines."""
    try:
        text = _read_source(source).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"embedding file is not UTF-8: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("embedding file is empty")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "dim" or not header[1].isdigit():
        raise FormatError(f"bad embedding header {lines[0]!r}, expected 'dim N'")
    dim = int(header[1])
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != dim + 1:
            raise SchemaError(f"line {lineno}: expected token and {dim} values, got {len(fields) - 1}")
        if fields[0] in vectors:
            raise SchemaError(f"line {lineno}: duplicate token {fields[0]!r}")
        try:
            vectors[fields[0]] = np.array([float(v) for v in fields[1:]])
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
    return EmbeddingTable(dim, vectors)


def dump_embeddings(emb: EmbeddingTable) -> bytes:
    lines = [f"dim {emb.dim}"]
    lines += [token + " " + " ".join(repr(float(v)) for v in vec) for token, vec in emb.vectors.items()]
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- queries ---------------------------------------------------------------


def lookup(d: Dictionary, gloss: str, fold: bool = False) -> DictEntry | None:
    """Exact, case-sensitive lookup; ``None`` on a miss."""
    entry = d.entries.get(gloss)
    if entry is None and fold:
        key = d.folded_index().get(fold_gloss(gloss))
        entry = d.entries.get(key) if key is not None else None
    return entry


@dataclass(frozen=True)
class Resolution:
    entry: DictEntry
    matched_gloss: str
    similarity: float


class NearestSignIndex:
    """Cosine nearest-neighbour search over the dictionary glosses that have embeddings.

    Candidates are kept in lexicographic order so that ``argmax`` (first
    maximum) implements the smallest-gloss tie-break.
    """

    def __init__(self, d: Dictionary, emb: EmbeddingTable):
        self.dictionary = d
        self.embeddings = emb
        self.candidates = [g for g in sorted(d.entries) if g in emb.vectors]
        if self.candidates:
            m = np.stack([emb.vectors[g] for g in self.candidates])
            self._unit = m / np.sqrt(np.sum(m * m, axis=1))[:, None]
        else:
            self._unit = np.zeros((0, emb.dim))

    def nearest(self, query: np.ndarray) -> tuple[str, float]:
        if not self.candidates:
            raise UnresolvableGlossError("<query>", "no dictionary gloss has an embedding")
        q = np.asarray(query, dtype=float)
        q = q / math.sqrt(float(np.sum(q * q)))
        sims = np.sum(self._unit * q, axis=1)
        best = int(np.argmax(sims))
        return self.candidates[best], float(np.clip(sims[best], -1.0, 1.0))

    def resolve(self, gloss: str, fold: bool = False) -> Resolution:
        d = self.dictionary
        entry = lookup(d, gloss, fold=fold)
        if entry is not None:
            return Resolution(entry, entry.gloss, 1.0)
        vec = self.embeddings.vectors.get(gloss)
        if vec is None:
            raise UnresolvableGlossError(gloss, "not in the dictionary and has no embedding")
        if not self.candidates:
            raise UnresolvableGlossError(gloss, "no dictionary gloss has an embedding")
        match, sim = self.nearest(vec)
        if sim < LOW_SIMILARITY_WARNING:
            log.warning("gloss %r substituted by %r with low cosine similarity %.3f", gloss, match, sim)
        return Resolution(d.entries[match], match, sim)


def resolve(d: Dictionary, gloss: str, emb: EmbeddingTable | None, fold: bool = False) -> Resolution:
    """Exact lookup, falling back to the most cosine-similar dictionary gloss.

    Exact hits short-circuit with similarity 1.0 and never touch ``emb``.
    """
    entry = lookup(d, gloss, fold=fold)
    if entry is not None:
        return Resolution(entry, entry.gloss, 1.0)
    if emb is None:
        raise UnresolvableGlossError(gloss, "not in the dictionary and no embeddings were given")
    return NearestSignIndex(d, emb).resolve(gloss, fold=fold)


@dataclass(frozen=True)
class CoverageReport:
    covered_count: int
    missing_list: list[str]
    ratio: float

    def as_dict(self) -> dict:
        return {"covered_count": self.covered_count, "missing_list": self.missing_list, "ratio": self.ratio}


def coverage(d: Dictionary, vocab: Iterable[str]) -> CoverageReport:
    vocab = set(vocab)
    missing = sorted(g for g in vocab if g not in d.entries)
    covered = len(vocab) - len(missing)
    ratio = covered / len(vocab) if vocab else 1.0
    return CoverageReport(covered, missing, ratio)
