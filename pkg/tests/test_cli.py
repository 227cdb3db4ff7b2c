from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from signstitch.cli import load_manifest, main
from signstitch.dictionary import dump_dictionary, load_dictionary
from signstitch.errors import SchemaError
from signstitch.metrics import score_lines
from signstitch.poseio import read_poses
from signstitch.skeleton import default_skeleton
from signstitch.synthetic import toy_dictionary


@pytest.fixture(scope="module")
def small_dict():
    return toy_dictionary(8, seed=4, frames=(20, 30))


@pytest.fixture
def dict_path(tmp_path, small_dict):
    path = tmp_path / "dict.json"
    path.write_bytes(dump_dictionary(small_dict))
    return path


def write_manifest(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


@pytest.fixture
def manifest(tmp_path):
    return write_manifest(tmp_path / "m.jsonl", [
        {"id": "a", "glosses": ["SIGN000", "SIGN001", "SIGN002"], "text": "es regnet"},
        {"id": "b", "glosses": ["SIGN003", "SIGN004"], "durations_frames": [30, 12]},
        {"id": "c", "glosses": ["SIGN005"], "cutoff_hz": 6.0},
    ])


def run_stitch(dict_path, manifest, out, *extra):
    return main(["stitch", "--dict", str(dict_path), "--manifest", str(manifest), "--out-dir", str(out), *extra])


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestBuildDict:
    def test_two_files(self, tmp_path, capsys, rng):
        np.save(tmp_path / "REGEN.npy", rng.normal(size=(5, 104)))
        np.savetxt(tmp_path / "SONNE.csv", rng.normal(size=(3, 104)), delimiter=",")
        out = tmp_path / "d.json"
        assert main(["build-dict", str(tmp_path / "REGEN.npy"), str(tmp_path / "SONNE.csv"), "-o", str(out)]) == 0
        d = load_dictionary(out)
        assert d.glosses == ("REGEN", "SONNE") or sorted(d.glosses) == ["REGEN", "SONNE"]
        assert "2 entries at 25 fps" in capsys.readouterr().out

    def test_entry_json(self, tmp_path):
        src = tmp_path / "e.json"
        src.write_text(json.dumps({"gloss": "WIND", "frames": [[0.1] * 104] * 2}))
        assert main(["build-dict", str(src), "-o", str(tmp_path / "d.json"), "--fps", "50"]) == 0
        d = load_dictionary(tmp_path / "d.json")
        assert d.fps == 50 and d.entries["WIND"].n_frames == 2

    def test_narrow_file_names_entry(self, tmp_path, capsys, rng):
        np.save(tmp_path / "OK.npy", rng.normal(size=(2, 104)))
        np.save(tmp_path / "SCHMAL.npy", rng.normal(size=(2, 103)))
        out = tmp_path / "d.json"
        assert main(["build-dict", str(tmp_path / "OK.npy"), str(tmp_path / "SCHMAL.npy"), "-o", str(out)]) == 1
        err = capsys.readouterr().err
        assert "SCHMAL.npy" in err and "'SCHMAL'" in err and "103" in err
        assert not out.exists()

    def test_rebuild_is_byte_identical(self, tmp_path, dict_path):
        out = tmp_path / "again.json"
        assert main(["build-dict", str(dict_path), "-o", str(out)]) == 0
        assert out.read_bytes() == dict_path.read_bytes()

    def test_duplicate_across_files(self, tmp_path, dict_path):
        assert main(["build-dict", str(dict_path), str(dict_path), "-o", str(tmp_path / "x.json")]) == 1


class TestStitch:
    def test_three_records(self, tmp_path, dict_path, manifest, capsys):
        out = tmp_path / "out"
        assert run_stitch(dict_path, manifest, out) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["a.spans.json", "a.sspk", "b.spans.json", "b.sspk", "c.spans.json", "c.sspk"]
        total = sum(len(read_poses(out / f"{r}.sspk")) for r in "abc")
        assert f"stitched 3 sequences, {total} frames, 0 failed" in capsys.readouterr().out
        side = json.loads((out / "b.spans.json").read_text())
        assert side["gloss_spans"][0] == [0, 30]
        assert side["resolved_glosses"] == ["SIGN003", "SIGN004"]

    def test_unresolvable_skipped(self, tmp_path, dict_path, manifest, capsys, caplog):
        bad = write_manifest(tmp_path / "bad.jsonl", [json.loads(x) for x in manifest.read_text().splitlines()][:2]
                             + [{"id": "z", "glosses": ["SIGN000", "NEBEL"]}])
        out = tmp_path / "out"
        assert run_stitch(dict_path, bad, out) == 0
        captured = capsys.readouterr()
        assert len(list(out.glob("*.sspk"))) == 2
        assert "record z failed" in caplog.text and "NEBEL" in caplog.text
        assert "1 failed" in captured.out

    def test_strict_aborts(self, tmp_path, dict_path):
        bad = write_manifest(tmp_path / "bad.jsonl", [{"id": "z", "glosses": ["NEBEL"]}])
        assert run_stitch(dict_path, bad, tmp_path / "out", "--strict") == 1

    def test_embeddings_fallback(self, tmp_path, dict_path, small_dict, rng):
        lines = ["dim 4"] + [f"{g} " + " ".join(map(str, rng.normal(size=4))) for g in small_dict.glosses]
        lines.append("NEBEL " + lines[3].split(" ", 1)[1])
        emb = tmp_path / "emb.txt"
        emb.write_text("\n".join(lines) + "\n")
        m = write_manifest(tmp_path / "m.jsonl", [{"id": "z", "glosses": ["NEBEL"]}])
        out = tmp_path / "out"
        assert run_stitch(dict_path, m, out, "--embeddings", str(emb), "--strict") == 0
        side = json.loads((out / "z.spans.json").read_text())
        assert side["resolved_glosses"] == [small_dict.glosses[2]]

    def test_rerun_and_jobs_identical(self, tmp_path, dict_path, manifest):
        run_stitch(dict_path, manifest, tmp_path / "one")
        run_stitch(dict_path, manifest, tmp_path / "two")
        run_stitch(dict_path, manifest, tmp_path / "four", "--jobs", "4")
        assert snapshot(tmp_path / "one") == snapshot(tmp_path / "two") == snapshot(tmp_path / "four")

    def test_inputs_untouched(self, tmp_path, dict_path, manifest):
        before = dict_path.read_bytes(), manifest.read_bytes()
        run_stitch(dict_path, manifest, tmp_path / "out")
        assert (dict_path.read_bytes(), manifest.read_bytes()) == before

    def test_subsample_and_normalize(self, tmp_path, dict_path, manifest):
        run_stitch(dict_path, manifest, tmp_path / "full")
        run_stitch(dict_path, manifest, tmp_path / "sub", "--subsample-fps", "12", "--normalize")
        full = read_poses(tmp_path / "full" / "a.sspk")
        sub = read_poses(tmp_path / "sub" / "a.sspk")
        assert sub.fps == 12 and len(sub) == int(np.floor(len(full) * 12 / 25 + 0.5))
        neck = default_skeleton().layout.neck_index
        assert np.abs(sub.frames[:, neck]).max() < 1e-6
        side = json.loads((tmp_path / "sub" / "a.spans.json").read_text())
        assert side["gloss_spans"][-1][1] == len(sub)

    def test_json_format(self, tmp_path, dict_path, manifest):
        out = tmp_path / "out"
        assert run_stitch(dict_path, manifest, out, "--format", "json") == 0
        assert len(read_poses(out / "a.json")) > 0

    def test_record_cutoff_wins(self, tmp_path, dict_path):
        m = write_manifest(tmp_path / "m.jsonl", [{"id": "x", "glosses": ["SIGN001"], "cutoff_hz": 20.0}])
        assert run_stitch(dict_path, m, tmp_path / "out", "--strict") == 1
        assert run_stitch(dict_path, m, tmp_path / "out", "--fps", "50", "--strict") == 0

    def test_bad_manifest(self, tmp_path, dict_path):
        m = write_manifest(tmp_path / "m.jsonl", [{"id": "x", "glosses": ["A"]}, {"id": "x", "glosses": ["B"]}])
        assert run_stitch(dict_path, m, tmp_path / "out") == 1


class TestAugment:
    def run(self, tmp_path, dict_path, sched, out, *extra):
        m = write_manifest(tmp_path / "m.jsonl", [{"id": "r1", "glosses": ["SIGN000", "SIGN001", "SIGN002", "SIGN003"],
                                                  "text": "heute"}])
        s = tmp_path / "sched.json"
        s.write_text(json.dumps(sched))
        return main(["augment", "--dict", str(dict_path), "--manifest", str(m), "--schedule", str(s),
                     "--out-dir", str(out), *extra])

    def test_four_variants(self, tmp_path, dict_path):
        out = tmp_path / "out"
        assert self.run(tmp_path, dict_path, {"permutation_ns": [0, 3], "speed_scales": [1.0, 1.5]}, out) == 0
        names = sorted(p.name for p in out.glob("*.sspk"))
        assert names == ["r1.N0.s1.0.c0.sspk", "r1.N0.s1.5.c0.sspk", "r1.N3.s1.0.c0.sspk", "r1.N3.s1.5.c0.sspk"]
        rows = [json.loads(x) for x in (out / "augmented_manifest.jsonl").read_text().splitlines()]
        assert len(rows) == 4 and all(r["text"] == "heute" for r in rows)
        base = len(read_poses(out / "r1.N0.s1.0.c0.sspk"))
        assert len(read_poses(out / "r1.N0.s1.5.c0.sspk")) == int(np.floor(base * 1.5 + 0.5))

    def test_copies_have_distinct_seeds_and_rerun_matches(self, tmp_path, dict_path):
        sched = {"permutation_ns": [0, 3], "speed_scales": [1.0, 1.5], "copies": 2, "seed": 5}
        self.run(tmp_path, dict_path, sched, tmp_path / "a")
        self.run(tmp_path, dict_path, sched, tmp_path / "b")
        rows = [json.loads(x) for x in (tmp_path / "a" / "augmented_manifest.jsonl").read_text().splitlines()]
        assert len(rows) == 8 and len({r["seed"] for r in rows}) == 8
        assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")

    def test_seed_flag_overrides(self, tmp_path, dict_path):
        sched = {"permutation_ns": [3], "speed_scales": [1.0], "seed": 5}
        self.run(tmp_path, dict_path, sched, tmp_path / "a")
        self.run(tmp_path, dict_path, sched, tmp_path / "b", "--seed", "6")
        seed = lambda d: json.loads((tmp_path / d / "augmented_manifest.jsonl").read_text())["seed"]  # noqa: E731
        assert seed("a") != seed("b")

    def test_bad_schedule(self, tmp_path, dict_path):
        assert self.run(tmp_path, dict_path, {"speed_scales": [0]}, tmp_path / "a") == 1


class TestScore:
    def test_identical(self, tmp_path, capsys):
        f = tmp_path / "h.txt"
        f.write_text("es regnet morgen\nheute sonne im norden\n")
        assert main(["score", str(f), str(f)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["bleu"] == [100.0] * 4 and rep["rouge_l"] == 1.0

    def test_mismatch(self, tmp_path, capsys):
        (tmp_path / "h").write_text("a\nb\n")
        (tmp_path / "r").write_text("a\n")
        assert main(["score", str(tmp_path / "h"), str(tmp_path / "r")]) == 1
        err = capsys.readouterr().err
        assert "2" in err and "1" in err

    def test_matches_library(self, tmp_path, capsys):
        hyps = ["der wind weht", "morgen regen im sueden", "a b c"]
        refs = ["der wind weht stark", "morgen regen", "a b d"]
        (tmp_path / "h").write_text("\n".join(hyps) + "\n")
        (tmp_path / "r").write_text("\n".join(refs) + "\n")
        main(["score", str(tmp_path / "h"), str(tmp_path / "r")])
        assert json.loads(capsys.readouterr().out) == json.loads(json.dumps(score_lines(hyps, refs).as_dict()))

    def test_lowercase_flag(self, tmp_path, capsys):
        (tmp_path / "h").write_text("Regen\n")
        (tmp_path / "r").write_text("regen\n")
        main(["score", str(tmp_path / "h"), str(tmp_path / "r")])
        assert json.loads(capsys.readouterr().out)["bleu_1"] == 0.0
        main(["score", str(tmp_path / "h"), str(tmp_path / "r"), "--lowercase"])
        assert json.loads(capsys.readouterr().out)["bleu_1"] == 100.0


class TestMisc:
    def test_coverage(self, tmp_path, dict_path, manifest, capsys):
        vocab = tmp_path / "v.txt"
        vocab.write_text("SIGN000 NEBEL\n")
        assert main(["coverage", "--dict", str(dict_path), "--vocab", str(vocab), "--manifest", str(manifest)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["missing_list"] == ["NEBEL"] and rep["covered_count"] == 6

    def test_inspect(self, tmp_path, dict_path, manifest, capsys):
        run_stitch(dict_path, manifest, tmp_path / "out")
        path = tmp_path / "out" / "a.sspk"
        assert main(["inspect", str(path), str(dict_path)]) == 0
        data = bytearray(path.read_bytes())
        data[4] = 9
        path.write_bytes(bytes(data))
        assert main(["inspect", str(path)]) == 1
        assert "version" in capsys.readouterr().err

    def test_narrow_dictionary_rejected(self, tmp_path, manifest):
        doc = {"version": 1, "fps": 25, "skeleton_id": "x", "entries": [{"gloss": "A", "frames": [[0.0] * 103]}]}
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert main(["inspect", str(bad)]) == 1
        assert run_stitch(bad, manifest, tmp_path / "out") == 1

    def test_usage_errors(self):
        with pytest.raises(SystemExit) as info:
            main(["stitch"])
        assert info.value.code == 2
        with pytest.raises(SystemExit) as info:
            main(["stitch", "--dict", "d", "--manifest", "m", "--out-dir", "o", "--jobs", "0"])
        assert info.value.code == 2

    def test_console_entry(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "signstitch", "score", "x", "y", "z"], capture_output=True)
        assert proc.returncode == 2

    def test_manifest_duration_length(self, tmp_path):
        m = write_manifest(tmp_path / "m.jsonl", [{"id": "x", "glosses": ["A", "B"], "durations_frames": [3]}])
        with pytest.raises(SchemaError, match="durations"):
            load_manifest(m)
