"""Command-line entry point: ``signstitch {build-dict,stitch,augment,coverage,score,inspect}``.

Exit codes: 0 success, 1 validation or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import augment as aug
from .dictionary import (
    Dictionary,
    coverage,
    dump_dictionary,
    load_dictionary,
    load_embeddings,
)
from .errors import FormatError, SchemaError, SignStitchError
from .metrics import score_lines
from .poseio import MAGIC, encode_poses, encode_sidecar, read_poses
from .skeleton import N_ANGLES, PoseSequence, default_skeleton, load_skeleton, normalize_pose, resample
from .stitcher import DEFAULT_CUTOFF_HZ, DEFAULT_FPS, StitchRequest, StitchResult, Stitcher, round_half_up

log = logging.getLogger("signstitch")

SUFFIX = {"sspk": ".sspk", "json": ".json"}


class CommandError(SignStitchError):
    pass


# -- manifest ----------------------------------------------------------------


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    glosses: tuple[str, ...]
    durations_frames: tuple[int, ...] | None = None
    cutoff_hz: float | None = None
    fps: float | None = None
    text: str | None = None

    def request(self, default_cutoff: float, default_fps: float) -> StitchRequest:
        return StitchRequest(
            glosses=self.glosses,
            durations=self.durations_frames,
            cutoff_hz=self.cutoff_hz if self.cutoff_hz is not None else default_cutoff,
            fps=self.fps if self.fps is not None else default_fps,
            request_id=self.id,
        )


def load_manifest(path: str | Path) -> list[ManifestRecord]:
    """JSON-lines manifest; blank lines are ignored."""
    records = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise SchemaError(f"{path}:{lineno}: record must be an object")
        rid = doc.get("id")
        glosses = doc.get("glosses")
        if not isinstance(rid, str) or not rid:
            raise SchemaError(f"{path}:{lineno}: record needs a string id")
        if rid in seen:
            raise SchemaError(f"{path}:{lineno}: duplicate record id {rid!r}")
        seen.add(rid)
        if not isinstance(glosses, list) or not all(isinstance(g, str) for g in glosses):
            raise SchemaError(f"{path}:{lineno}: record {rid!r} glosses must be a list of strings")
        durations = doc.get("durations_frames")
        if durations is not None:
            if not isinstance(durations, list) or len(durations) != len(glosses):
                raise SchemaError(f"{path}:{lineno}: record {rid!r} durations do not match its glosses")
            durations = tuple(durations)
        records.append(
            ManifestRecord(rid, tuple(glosses), durations, doc.get("cutoff_hz"), doc.get("fps"), doc.get("text"))
        )
    return records


# -- shared helpers ----------------------------------------------------------


def _load_skeleton(args):
    return load_skeleton(args.skeleton) if getattr(args, "skeleton", None) else default_skeleton()


def _make_stitcher(args) -> Stitcher:
    d = load_dictionary(args.dict)
    emb = load_embeddings(args.embeddings) if args.embeddings else None
    return Stitcher(d, _load_skeleton(args), emb, fold=args.fold)


def _postprocess(result: StitchResult, args, layout) -> StitchResult:
    poses = result.poses
    if args.subsample_fps:
        target = max(1, round_half_up(len(poses) * args.subsample_fps / poses.fps))
        u = len(poses)
        poses = PoseSequence(resample(poses, target).frames, args.subsample_fps)
        result.gloss_spans = aug.rescale_spans(result.gloss_spans, u, target)
        result.transition_spans = aug.rescale_spans(result.transition_spans, u, target)
    if args.normalize:
        poses = normalize_pose(poses, layout)
    result.poses = poses
    return result


def _run_jobs(fn, items, jobs: int):
    """Apply ``fn`` to items, in order; exceptions are returned, not raised."""

    def safe(item):
        try:
            return fn(item)
        except SignStitchError as exc:
            return exc

    if jobs <= 1:
        return [safe(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(safe, items))


def _write_outputs(out_dir: Path, name: str, result: StitchResult, fmt: str) -> None:
    (out_dir / f"{name}{SUFFIX[fmt]}").write_bytes(encode_poses(result.poses, fmt))
    (out_dir / f"{name}.spans.json").write_bytes(encode_sidecar(result.sidecar()))


# -- commands ------------------------------------------------------------------


def _read_angle_file(path: Path) -> tuple[list[tuple[str, np.ndarray]], Dictionary | None]:
    """Entries from one input file, plus the dictionary itself if it was one."""
    if path.suffix == ".npy":
        try:
            arr = np.load(path, allow_pickle=False)
        except ValueError as exc:
            raise FormatError(f"unreadable .npy file ({exc})") from exc
        return [(path.stem, np.atleast_2d(arr))], None
    if path.suffix == ".json":
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"invalid JSON ({exc})") from exc
        if isinstance(doc, dict) and "entries" in doc:
            d = load_dictionary(path)
            return [(g, e.angles.frames) for g, e in d.entries.items()], d
        if isinstance(doc, dict) and isinstance(doc.get("frames"), list):
            try:
                return [(doc.get("gloss") or path.stem, np.array(doc["frames"], dtype=float))], None
            except ValueError as exc:
                raise SchemaError(f"entry {doc.get('gloss') or path.stem!r}: ragged or non-numeric frames") from exc
        raise SchemaError("unrecognised JSON angle file")
    try:
        arr = np.loadtxt(path, delimiter="," if path.suffix == ".csv" else None, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"unreadable angle table ({exc})") from exc
    return [(path.stem, arr)], None


def cmd_build_dict(args) -> int:
    entries: list[tuple[str, np.ndarray]] = []
    fps = args.fps
    skeleton_id = None
    if args.skeleton:
        load_skeleton(args.skeleton)
        skeleton_id = Path(args.skeleton).stem
    for name in args.inputs:
        path = Path(name)
        try:
            found, source_dict = _read_angle_file(path)
            for gloss, arr in found:
                if arr.ndim != 2 or arr.shape[1] != N_ANGLES:
                    raise SchemaError(f"entry {gloss!r}: frames are {arr.shape[-1]} wide, expected {N_ANGLES}")
                if not np.all(np.isfinite(arr)):
                    raise SchemaError(f"entry {gloss!r}: non-finite angle")
        except SignStitchError as exc:
            raise CommandError(f"{path}: {exc}") from exc
        if source_dict is not None:
            fps = fps or source_dict.fps
            skeleton_id = skeleton_id or source_dict.skeleton_id
        entries += found
    try:
        d = Dictionary.from_arrays(entries, fps=fps or DEFAULT_FPS, skeleton_id=skeleton_id or "default")
    except SignStitchError as exc:
        raise CommandError(str(exc)) from exc
    Path(args.output).write_bytes(dump_dictionary(d))
    print(f"wrote {args.output}: {len(d)} entries at {d.fps:g} fps")
    return 0


def cmd_stitch(args) -> int:
    stitcher = _make_stitcher(args)
    records = load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    layout = stitcher.skeleton.layout

    def work(rec: ManifestRecord):
        req = rec.request(args.cutoff, args.fps)
        return _postprocess(stitcher.stitch(req), args, layout)

    failures = 0
    total = 0
    written = 0
    for rec, res in zip(records, _run_jobs(work, records, args.jobs)):
        if isinstance(res, Exception):
            failures += 1
            log.warning("record %s failed: %s", rec.id, res)
            if args.strict:
                raise CommandError(f"record {rec.id}: {res}")
            continue
        _write_outputs(out_dir, rec.id, res, args.format)
        written += 1
        total += len(res.poses)
    print(f"stitched {written} sequences, {total} frames, {failures} failed")
    return 0


def cmd_augment(args) -> int:
    stitcher = _make_stitcher(args)
    records = load_manifest(args.manifest)
    schedule = aug.load_schedule(args.schedule)
    if args.seed is not None:
        schedule = aug.AugmentSchedule(**{**_schedule_kwargs(schedule), "seed": args.seed})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    layout = stitcher.skeleton.layout

    failures = 0
    variants = []
    texts = {}
    for rec in records:
        try:
            variants += aug.expand_schedule([rec.request(args.cutoff, args.fps)], schedule)
            texts[rec.id] = rec.text
        except SignStitchError as exc:
            failures += 1
            log.warning("record %s failed: %s", rec.id, exc)
            if args.strict:
                raise CommandError(f"record {rec.id}: {exc}") from exc

    def work(v: aug.Variant):
        return _postprocess(aug.realize_variant(v, stitcher), args, layout)

    lines = []
    total = 0
    failed_ids = set()
    for v, res in zip(variants, _run_jobs(work, variants, args.jobs)):
        if isinstance(res, Exception):
            failed_ids.add(v.source_id)
            log.warning("variant %s failed: %s", v.name, res)
            if args.strict:
                raise CommandError(f"variant {v.name}: {res}")
            continue
        _write_outputs(out_dir, v.name, res, args.format)
        total += len(res.poses)
        rec = {
            "id": v.name,
            "glosses": list(v.request.glosses),
            "durations_frames": None if v.request.durations is None else list(v.request.durations),
            "cutoff_hz": v.request.cutoff_hz,
            "text": texts.get(v.source_id),
            "seed": v.seed,
            "provenance": v.provenance(),
            "frames": len(res.poses),
        }
        lines.append(json.dumps(rec, sort_keys=True))
    (out_dir / "augmented_manifest.jsonl").write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")
    failures += len(failed_ids)
    print(f"augmented {len(lines)} variants, {total} frames, {failures} records failed")
    return 0


def _schedule_kwargs(s: aug.AugmentSchedule) -> dict:
    return {
        "permutation_ns": s.permutation_ns,
        "speed_scales": s.speed_scales,
        "copies_per_combo": s.copies_per_combo,
        "seed": s.seed,
        "permute_mode": s.permute_mode,
        "speed_mode": s.speed_mode,
    }


def cmd_coverage(args) -> int:
    d = load_dictionary(args.dict)
    vocab: set[str] = set()
    if args.vocab:
        vocab |= set(Path(args.vocab).read_text(encoding="utf-8").split())
    if args.manifest:
        for rec in load_manifest(args.manifest):
            vocab |= set(rec.glosses)
    report = coverage(d, vocab)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_score(args) -> int:
    hyps = Path(args.hypotheses).read_text(encoding="utf-8").splitlines()
    refs = Path(args.references).read_text(encoding="utf-8").splitlines()
    if len(hyps) != len(refs):
        raise CommandError(f"line counts differ: {len(hyps)} hypotheses vs {len(refs)} references")
    if args.lowercase:
        hyps = [h.lower() for h in hyps]
        refs = [r.lower() for r in refs]
    report = score_lines(hyps, refs, smooth=args.smooth)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_inspect(args) -> int:
    for name in args.files:
        path = Path(name)
        head = path.read_bytes()[:64]
        if head[:4] == MAGIC or path.suffix == ".sspk" or b'"magic"' in head:
            seq = read_poses(path)
            print(f"{path}: {len(seq)} frames x {seq.frames.shape[1]} keypoints at {seq.fps:g} fps")
        else:
            d = load_dictionary(path)
            print(f"{path}: dictionary with {len(d)} entries at {d.fps:g} fps")
    return 0


# -- argument parsing ------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dict", required=True, help="dictionary file")
    p.add_argument("--manifest", required=True, help="JSON-lines manifest")
    p.add_argument("--out-dir", required=True, help="created if missing")
    p.add_argument("--skeleton", help="skeleton file (default: built-in skeleton)")
    p.add_argument("--embeddings", help="gloss embedding file for out-of-vocabulary fallback")
    p.add_argument("--seed", type=int, default=None, help="augmentation base seed; overrides the schedule file")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (output does not depend on it)")
    p.add_argument("--format", choices=("sspk", "json"), default="sspk", help="pose file format")
    p.add_argument("--fps", type=float, default=DEFAULT_FPS, help="output frame rate unless a record sets its own")
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF_HZ,
                   help="low-pass cutoff in Hz unless a record sets its own")
    p.add_argument("--subsample-fps", type=float, default=None, help="resample finished sequences to this rate")
    p.add_argument("--normalize", action="store_true", help="neck at the origin, shoulders along +x")
    p.add_argument("--strict", action="store_true", help="abort on the first failing record")
    p.add_argument("--fold", action="store_true", help="case-fold glosses and strip variant numbers")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signstitch", description="Stitch isolated signs into continuous skeleton sequences."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    p = sub.add_parser("build-dict", help="build a dictionary from raw angle files")
    p.add_argument("inputs", nargs="+", help=".npy/.csv/.txt angle tables or dictionary/entry JSON files")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--skeleton")
    p.add_argument("--fps", type=float, default=None)
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("stitch", parents=[common], help="stitch manifest records into pose files")
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("augment", parents=[common], help="expand an augmentation schedule and stitch every variant")
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("coverage", help="report which glosses the dictionary covers")
    p.add_argument("--dict", required=True)
    p.add_argument("--vocab", help="file of whitespace-separated glosses")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("score", help="BLEU-1..4 and ROUGE-L of hypothesis vs reference lines")
    p.add_argument("hypotheses")
    p.add_argument("references")
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--lowercase", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("inspect", help="validate pose or dictionary files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (SignStitchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
