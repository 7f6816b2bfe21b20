"""Chain constants, generic tree traversal, and the chain gather."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from skelimage import (
    KINECT_CHAIN,
    KINECT_EDGES,
    NUM_JOINTS,
    BodyTrack,
    ChainOrder,
    build_chain_matrix,
    default_chain,
    depth_first_chain,
    load_chain,
)

from util_synth import random_track

# The published 49-entry traversal, spelled out independently of the
# module's constant.
PUBLISHED_CHAIN = (
    2, 21, 3, 4, 3, 21, 5, 6, 7, 8, 22, 23, 22, 8, 7, 6, 5, 21,
    9, 10, 11, 12, 24, 25, 24, 12, 11, 10, 9, 21, 2, 1, 13, 14,
    15, 16, 15, 14, 13, 1, 17, 18, 19, 20, 19, 18, 17, 1, 2,
)


class TestDefaultChain:
    def test_length(self):
        assert len(default_chain()) == 49

    def test_endpoints(self):
        entries = default_chain().entries
        assert entries[0] == 2
        assert entries[-1] == 2

    def test_matches_published_sequence_verbatim(self):
        assert default_chain().entries == PUBLISHED_CHAIN

    def test_entries_in_joint_range(self):
        assert all(1 <= e <= NUM_JOINTS for e in default_chain().entries)


class TestDepthFirstChain:
    def test_path_graph(self):
        assert depth_first_chain([(1, 2), (2, 3)], 1).entries == (1, 2, 3, 2, 1)

    def test_star(self):
        assert depth_first_chain([(1, 2), (1, 3)], 1).entries == (1, 2, 1, 3, 1)

    def test_length_is_two_edges_plus_one(self, rng):
        # random trees: node i + 1 attaches to a uniformly chosen earlier node
        for _ in range(20):
            n = int(rng.integers(2, 30))
            edges = [(int(rng.integers(1, i)), i) for i in range(2, n + 1)]
            chain = depth_first_chain(edges, root=1)
            assert len(chain) == 2 * len(edges) + 1

    def test_cycle_rejected(self):
        with pytest.raises(ValueError, match="not a tree|cycle"):
            depth_first_chain([(1, 2), (2, 3), (3, 1)], 1)

    def test_disconnected_rejected(self):
        with pytest.raises(ValueError, match="not a tree|disconnected"):
            depth_first_chain([(1, 2), (3, 4)], 1)

    def test_bad_root(self):
        with pytest.raises(ValueError, match="root"):
            depth_first_chain([(1, 2)], 9)

    def test_kinect_tree_against_published_chain(self):
        # Ascending-child-order traversal of the documented Kinect tree.
        # Hand-traced expected walk: root 2 descends into the base-spine
        # subtree (joint 1, legs) before the spine-shoulder subtree
        # (joint 21, head and arms) because 1 < 21.
        expected = (
            2, 1, 13, 14, 15, 16, 15, 14, 13, 1, 17, 18, 19, 20, 19, 18, 17,
            1, 2, 21, 3, 4, 3, 21, 5, 6, 7, 8, 22, 23, 22, 8, 7, 6, 5, 21,
            9, 10, 11, 12, 24, 25, 24, 12, 11, 10, 9, 21, 2,
        )
        walked = depth_first_chain(KINECT_EDGES, root=2).entries
        assert walked == expected
        # The published constant visits the root's subtrees in the opposite
        # order, so the two closed walks differ yet are rotations of each
        # other over the same tree; the constant stays authoritative.
        assert walked != KINECT_CHAIN
        assert Counter(walked) == Counter(KINECT_CHAIN)
        assert walked[18:] + walked[1:19] == KINECT_CHAIN


class TestBuildChainMatrix:
    def test_all_zero_track(self):
        track = BodyTrack.dense("0", np.zeros((4, NUM_JOINTS, 3)))
        matrix = build_chain_matrix(track, default_chain())
        assert matrix.shape == (49, 4, 3)
        assert not matrix.any()

    def test_rows_carry_source_joint_values(self):
        # joint j holds constant value j + 1 on the x axis
        frames = np.zeros((3, NUM_JOINTS, 3))
        frames[:, :, 0] = np.arange(1, NUM_JOINTS + 1)
        track = BodyTrack.dense("0", frames)
        chain = default_chain()
        matrix = build_chain_matrix(track, chain)
        for c, entry in enumerate(chain.entries):
            assert np.array_equal(matrix[c, :, 0], np.full(3, float(entry)))

    def test_single_frame(self):
        track = BodyTrack.dense("0", np.zeros((1, NUM_JOINTS, 3)))
        assert build_chain_matrix(track, default_chain()).shape == (49, 1, 3)

    def test_pure_gather(self, rng):
        track = random_track(rng, frames=7)
        chain = default_chain()
        matrix = build_chain_matrix(track, chain)
        for c, entry in enumerate(chain.entries):
            assert np.array_equal(matrix[c], track.frames[:, entry - 1, :])

    def test_permuting_chain_permutes_rows(self, rng):
        track = random_track(rng, frames=5)
        entries = list(default_chain().entries)
        perm = rng.permutation(len(entries))
        base = build_chain_matrix(track, default_chain())
        permuted = build_chain_matrix(track, ChainOrder(tuple(entries[i] for i in perm)))
        assert np.array_equal(permuted, base[perm])

    def test_repeated_entries_duplicate_rows(self, rng):
        track = random_track(rng, frames=6)
        matrix = build_chain_matrix(track, ChainOrder((5, 5, 9)))
        assert np.array_equal(matrix[0], matrix[1])

    def test_entry_out_of_range(self):
        track = BodyTrack.dense("0", np.zeros((2, NUM_JOINTS, 3)))
        with pytest.raises(ValueError, match="out of range"):
            build_chain_matrix(track, ChainOrder((1, 26)))


class TestLoadChain:
    def test_round_trip_file(self, tmp_path):
        path = tmp_path / "chain.txt"
        path.write_text("# head first\n2\n3\n2\n")
        assert load_chain(path).entries == (2, 3, 2)

    def test_junk_line(self, tmp_path):
        path = tmp_path / "chain.txt"
        path.write_text("2\nbogus\n")
        with pytest.raises(ValueError, match="bogus"):
            load_chain(path)
