"""End-to-end command line behavior: encode batches, info/preview, splits,
and fusion."""

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from skelimage import (
    NUM_JOINTS,
    ScoreMatrix,
    read_manifest_ids,
    read_tensor,
    write_scores,
)
from skelimage.cli import main

from util_synth import make_ntu_text


def write_sample(directory, name, rng, frames=40):
    joints = rng.uniform(-1, 1, (frames, NUM_JOINTS, 3))
    per_frame = [[("1", joints[t])] for t in range(frames)]
    path = directory / f"{name}.skeleton"
    path.write_text(make_ntu_text(per_frame))
    return path


@pytest.fixture
def sample_dir(tmp_path, rng):
    directory = tmp_path / "raw"
    directory.mkdir()
    for i in range(3):
        write_sample(directory, f"S001C001P00{i}R001A00{i}", rng)
    return directory


class TestEncode:
    def test_batch_success(self, sample_dir, tmp_path, capsys):
        out = tmp_path / "tensors"
        code = main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        assert code == 0
        tensors = sorted(p.name for p in out.glob("*.tensor"))
        assert len(tensors) == 3
        assert "encoded 3 failed 0" in capsys.readouterr().out
        img = read_tensor(out / tensors[0])
        assert img.values.shape == (49, 100, 6)  # mag TSA x 2 persons

    def test_corrupt_input_logged_not_fatal(self, sample_dir, tmp_path, capsys):
        bad = sample_dir / "broken.skeleton"
        bad.write_text("not a skeleton\n")
        out = tmp_path / "tensors"
        code = main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 1
        assert len(list(out.glob("*.tensor"))) == 3
        assert "FAIL" in captured.err
        assert "broken.skeleton" in captured.err

    def test_rerun_is_byte_identical(self, sample_dir, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out_a)]) == 0
        assert main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out_b)]) == 0
        for path_a in sorted(out_a.glob("*.tensor")):
            path_b = out_b / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes()

    def test_worker_count_does_not_change_bytes(self, sample_dir, tmp_path):
        out_serial, out_parallel = tmp_path / "serial", tmp_path / "parallel"
        ok = main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out_serial)])
        assert ok == 0
        ok = main(
            ["encode", str(sample_dir / "*.skeleton"), "--out", str(out_parallel), "--workers", "3"]
        )
        assert ok == 0
        names = sorted(p.name for p in out_serial.glob("*.tensor"))
        assert names == sorted(p.name for p in out_parallel.glob("*.tensor"))
        for name in names:
            assert (out_serial / name).read_bytes() == (out_parallel / name).read_bytes()

    def test_unwritable_out_dir_exits_2(self, sample_dir, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        out = blocker / "nested"
        code = main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        assert code == 2
        assert "error: cannot write to output directory" in capsys.readouterr().err

    def test_no_inputs_matched(self, tmp_path, capsys):
        code = main(["encode", str(tmp_path / "nothing-*.skeleton"), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "no input files matched" in capsys.readouterr().err

    def test_interchange_input_and_representations(self, tmp_path, rng):
        import skelimage as sk

        track = sk.BodyTrack.dense("0", rng.uniform(-1, 1, (30, NUM_JOINTS, 3)))
        seq = sk.SkeletonSequence("inter-1", 30, (track,))
        path = tmp_path / "inter-1.json"
        path.write_text(sk.write_interchange(seq))
        for rep, channels in (
            ("coord", 6),
            ("tssi", 6),
            ("naive-motion", 6),
            ("skelemotion-ori", 18),
            ("skelemotion-magori", 24),
        ):
            out = tmp_path / f"out-{rep}"
            code = main(
                ["encode", str(path), "--out", str(out), "--representation", rep]
            )
            assert code == 0
            img = read_tensor(out / "inter-1.tensor")
            assert img.values.shape[2] == channels

    def test_config_file_with_flag_override(self, sample_dir, tmp_path):
        config = tmp_path / "enc.cfg"
        config.write_text(
            "representation = skelemotion-mag\n"
            "width = 50  # overridden by the flag below\n"
            "distances = 2,4\n"
        )
        out = tmp_path / "out"
        code = main(
            [
                "encode",
                str(sample_dir / "*.skeleton"),
                "--out",
                str(out),
                "--config",
                str(config),
                "--width",
                "80",
            ]
        )
        assert code == 0
        img = read_tensor(next(out.glob("*.tensor")))
        assert img.values.shape == (49, 80, 4)  # 2 scales x 2 persons, width from flag

    def test_custom_chain_file(self, sample_dir, tmp_path):
        chain_file = tmp_path / "chain.txt"
        chain_file.write_text("1\n2\n3\n2\n1\n")
        out = tmp_path / "out"
        code = main(
            [
                "encode",
                str(sample_dir / "*.skeleton"),
                "--out",
                str(out),
                "--chain-file",
                str(chain_file),
            ]
        )
        assert code == 0
        assert read_tensor(next(out.glob("*.tensor"))).values.shape == (5, 100, 6)

    def test_manifest_filter(self, sample_dir, tmp_path):
        manifest = tmp_path / "train.manifest"
        manifest.write_text("# protocol: cross-subject\n# split: train\nS001C001P000R001A000\n")
        out = tmp_path / "out"
        code = main(
            [
                "encode",
                str(sample_dir / "*.skeleton"),
                "--out",
                str(out),
                "--manifest",
                str(manifest),
            ]
        )
        assert code == 0
        assert [p.name for p in out.glob("*.tensor")] == ["S001C001P000R001A000.tensor"]


class TestInfoAndPreview:
    def test_info_prints_dims(self, sample_dir, tmp_path, capsys):
        out = tmp_path / "tensors"
        main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        capsys.readouterr()
        tensor = next(out.glob("*.tensor"))
        assert main(["info", str(tensor)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "49 100 6"
        assert lines[2] == "dtype: f32l"
        assert lines[3].startswith("layout: p0:magnitude:d5;")

    def test_info_rejects_png(self, tmp_path, capsys):
        png = tmp_path / "x.png"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8)).save(png)
        assert main(["info", str(png)]) == 1
        assert "not a tensor file" in capsys.readouterr().err

    def test_info_truncated_header(self, tmp_path, capsys):
        stub = tmp_path / "stub.tensor"
        stub.write_bytes(b"SKLTENSR\x01\x00")
        assert main(["info", str(stub)]) == 1
        assert "truncated" in capsys.readouterr().err

    def test_preview_grayscale_and_rgb(self, sample_dir, tmp_path, capsys):
        out = tmp_path / "tensors"
        main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        tensor = next(out.glob("*.tensor"))
        gray = tmp_path / "gray.png"
        assert main(["preview", str(tensor), "--out", str(gray)]) == 0
        with Image.open(gray) as picture:
            assert picture.mode == "L"
            assert picture.size == (100, 49)
        rgb = tmp_path / "rgb.png"
        assert main(["preview", str(tensor), "--channels", "0,1,2", "--out", str(rgb)]) == 0
        with Image.open(rgb) as picture:
            assert picture.mode == "RGB"

    def test_preview_bad_channel(self, sample_dir, tmp_path, capsys):
        out = tmp_path / "tensors"
        main(["encode", str(sample_dir / "*.skeleton"), "--out", str(out)])
        capsys.readouterr()
        tensor = next(out.glob("*.tensor"))
        code = main(["preview", str(tensor), "--channels", "99", "--out", str(tmp_path / "x.png")])
        assert code == 1
        assert "invalid channel index 99" in capsys.readouterr().err


class TestSplit:
    def test_cross_setup(self, tmp_path, capsys):
        table = tmp_path / "meta.csv"
        table.write_text(
            "sample_id,subject,camera,setup\n"
            "s1,p1,c1,1\ns2,p2,c2,2\ns3,p3,c3,3\ns4,p4,c1,4\n"
        )
        out = tmp_path / "manifests"
        assert main(["split", str(table), "--protocol", "cross-setup", "--out", str(out)]) == 0
        assert set(read_manifest_ids(out / "train.manifest")) == {"s2", "s4"}
        assert set(read_manifest_ids(out / "test.manifest")) == {"s1", "s3"}

    def test_cross_subject_with_list(self, tmp_path):
        table = tmp_path / "meta.csv"
        table.write_text("sample_id,subject\ns1,p1\ns2,p2\ns3,p1\n")
        out = tmp_path / "manifests"
        code = main(
            [
                "split",
                str(table),
                "--protocol",
                "cross-subject",
                "--train-subjects",
                "p1",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert set(read_manifest_ids(out / "train.manifest")) == {"s1", "s3"}

    def test_missing_subject_field(self, tmp_path, capsys):
        table = tmp_path / "meta.csv"
        table.write_text("sample_id,setup\ns1,1\n")
        code = main(
            [
                "split",
                str(table),
                "--protocol",
                "cross-subject",
                "--train-subjects",
                "p1",
                "--out",
                str(tmp_path / "m"),
            ]
        )
        assert code == 1
        assert "missing subject" in capsys.readouterr().err


class TestFuse:
    def _write_scores(self, path, rows, labels=("A", "B")):
        ids = tuple(f"s{i}" for i in range(len(rows)))
        write_scores(ScoreMatrix(ids, np.asarray(rows, dtype=float), labels), path)

    def test_two_files_report_accuracy(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        self._write_scores(a, [[0.9, 0.1], [0.8, 0.2], [0.2, 0.8], [0.3, 0.7]])
        self._write_scores(b, [[0.7, 0.3], [0.6, 0.4], [0.1, 0.9], [0.4, 0.6]])
        labels = tmp_path / "labels.txt"
        labels.write_text("s0 A\ns1 A\ns2 B\ns3 B\n")
        fused = tmp_path / "fused.txt"
        code = main(["fuse", str(a), str(b), "--labels", str(labels), "--out", str(fused)])
        assert code == 0
        out = capsys.readouterr().out
        assert "mean accuracy 1.000000" in out
        assert fused.exists()

    def test_mismatched_ids(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        self._write_scores(a, [[0.9, 0.1]])
        write_scores(
            ScoreMatrix(("other",), np.array([[0.5, 0.5]]), ("A", "B")), b
        )
        labels = tmp_path / "labels.txt"
        labels.write_text("s0 A\n")
        code = main(["fuse", str(a), str(b), "--labels", str(labels)])
        assert code == 1
        assert "sample id mismatch at row 0" in capsys.readouterr().err

    def test_single_file(self, tmp_path, capsys):
        a = tmp_path / "a.txt"
        self._write_scores(a, [[0.9, 0.1], [0.2, 0.8]])
        labels = tmp_path / "labels.txt"
        labels.write_text("s0 A\ns1 A\n")
        assert main(["fuse", str(a), "--labels", str(labels)]) == 0
        out = capsys.readouterr().out
        assert "class A accuracy 0.500000" in out
        assert "mean accuracy 0.500000" in out
