"""Late fusion, macro accuracy, and the score/label text formats."""

from __future__ import annotations

import numpy as np
import pytest

from skelimage import (
    ScoreMatrix,
    late_fuse,
    per_class_accuracy,
    read_labels,
    read_scores,
    write_labels,
    write_scores,
)


def matrix(scores, ids=None, labels=("A", "B")):
    scores = np.asarray(scores, dtype=np.float64)
    if ids is None:
        ids = tuple(f"s{i}" for i in range(scores.shape[0]))
    return ScoreMatrix(tuple(ids), scores, tuple(labels))


class TestLateFuse:
    def test_identical_matrices_fuse_to_same(self, rng):
        m = matrix(rng.uniform(0, 1, (5, 2)))
        assert np.array_equal(late_fuse([m, m]).scores, m.scores)
        # k >= 3 is idempotent up to summation rounding only
        assert np.abs(late_fuse([m, m, m]).scores - m.scores).max() <= 1e-12

    def test_opposing_one_hot_scores(self):
        a = matrix([[1.0, 0.0]])
        b = matrix([[0.0, 1.0]])
        assert late_fuse([a, b]).scores.tolist() == [[0.5, 0.5]]

    def test_three_way_mean_matches_direct_average(self, rng):
        mats = [matrix(rng.uniform(0, 1, (4, 2))) for _ in range(3)]
        fused = late_fuse(mats)
        direct = (mats[0].scores + mats[1].scores + mats[2].scores) / 3.0
        assert np.abs(fused.scores - direct).max() <= 1e-12

    def test_permutation_equivariant(self, rng):
        mats = [matrix(rng.uniform(0, 1, (6, 2))) for _ in range(4)]
        forward = late_fuse(mats)
        backward = late_fuse(mats[::-1])
        assert np.abs(forward.scores - backward.scores).max() <= 1e-12

    def test_id_mismatch_names_first_divergence(self, rng):
        a = matrix(rng.uniform(0, 1, (3, 2)), ids=("x", "y", "z"))
        b = matrix(rng.uniform(0, 1, (3, 2)), ids=("x", "w", "z"))
        with pytest.raises(ValueError, match=r"row 1: 'y' vs 'w'"):
            late_fuse([a, b])

    def test_class_mismatch(self, rng):
        a = matrix(rng.uniform(0, 1, (2, 2)), labels=("A", "B"))
        b = matrix(rng.uniform(0, 1, (2, 2)), labels=("A", "C"))
        with pytest.raises(ValueError, match="class label mismatch"):
            late_fuse([a, b])

    def test_scaling_preserves_argmax(self, rng):
        mats = [matrix(rng.uniform(0, 1, (10, 2))) for _ in range(2)]
        fused = late_fuse(mats)
        scaled = late_fuse(
            [ScoreMatrix(m.sample_ids, m.scores * 7.5, m.class_labels) for m in mats]
        )
        assert np.array_equal(
            np.argmax(fused.scores, axis=1), np.argmax(scaled.scores, axis=1)
        )


class TestPerClassAccuracy:
    def test_all_correct(self):
        preds = matrix([[0.9, 0.1], [0.1, 0.9]])
        report = per_class_accuracy(preds, {"s0": "A", "s1": "B"})
        assert report.per_class == {"A": 1.0, "B": 1.0}
        assert report.mean_accuracy == 1.0

    def test_macro_average_three_samples(self):
        # class A: 2 samples both right; class B: 1 sample wrong -> mean 0.5
        preds = matrix([[0.9, 0.1], [0.8, 0.2], [0.7, 0.3]])
        report = per_class_accuracy(preds, {"s0": "A", "s1": "A", "s2": "B"})
        assert report.per_class == {"A": 1.0, "B": 0.0}
        assert report.mean_accuracy == 0.5

    def test_tie_goes_to_lowest_class_index(self):
        preds = matrix([[0.5, 0.5]])
        report = per_class_accuracy(preds, {"s0": "A"})
        assert report.per_class == {"A": 1.0}

    def test_unlabeled_sample(self):
        preds = matrix([[0.5, 0.4]])
        with pytest.raises(ValueError, match="unlabeled sample 's0'"):
            per_class_accuracy(preds, {})

    def test_mean_in_unit_interval_and_balanced_case(self, rng):
        scores = rng.uniform(0, 1, (20, 2))
        preds = matrix(scores)
        labels = {f"s{i}": ("A" if i < 10 else "B") for i in range(20)}
        report = per_class_accuracy(preds, labels)
        assert 0.0 <= report.mean_accuracy <= 1.0
        picks = np.argmax(scores, axis=1)
        plain = np.mean(
            [("A", "B")[p] == labels[f"s{i}"] for i, p in enumerate(picks)]
        )
        assert report.mean_accuracy == pytest.approx(plain)


class TestScoreFiles:
    def test_round_trip_exact(self, rng, tmp_path):
        m = matrix(rng.standard_normal((7, 3)), labels=("x", "y", "z"))
        path = tmp_path / "scores.txt"
        write_scores(m, path)
        back = read_scores(path)
        assert back.sample_ids == m.sample_ids
        assert back.class_labels == m.class_labels
        assert np.array_equal(back.scores, m.scores)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("bogus A B\ns0 1 2\n")
        with pytest.raises(ValueError, match="header"):
            read_scores(path)

    def test_row_width_checked(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("sample_id A B\ns0 1.0\n")
        with pytest.raises(ValueError, match="expected 3 fields"):
            read_scores(path)

    def test_labels_round_trip(self, tmp_path):
        path = tmp_path / "labels.txt"
        write_labels({"s0": "A", "s1": "B"}, path)
        assert read_labels(path) == {"s0": "A", "s1": "B"}

    def test_labels_reject_bad_lines(self, tmp_path):
        path = tmp_path / "labels.txt"
        path.write_text("s0 A extra\n")
        with pytest.raises(ValueError, match="sample_id label"):
            read_labels(path)
