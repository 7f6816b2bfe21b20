"""Joint traversal chains and the chain-ordered coordinate matrix.

A chain order is a walk over the skeleton tree that visits every edge twice
(once entering, once returning), so physically connected joints stay in
neighboring rows of the resulting image.  The 49-entry Kinect-25 chain is
shipped verbatim as the default; ``depth_first_chain`` regenerates chains
for other skeletons.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .skeleton_data import BodyTrack

# Published traversal over the 25 Kinect v2 joints (1-based indices).
KINECT_CHAIN = (
    2, 21, 3, 4, 3, 21, 5, 6, 7, 8, 22, 23, 22, 8, 7, 6, 5, 21,
    9, 10, 11, 12, 24, 25, 24, 12, 11, 10, 9, 21, 2, 1, 13, 14,
    15, 16, 15, 14, 13, 1, 17, 18, 19, 20, 19, 18, 17, 1, 2,
)

# Kinect v2 skeleton tree, 1-based joint indices.  Hand tips (22, 24) hang
# off the hands and thumbs (23, 25) off the tips, matching the duplicated
# row pattern of KINECT_CHAIN.
KINECT_EDGES = (
    (1, 2), (2, 21), (21, 3), (3, 4),
    (21, 5), (5, 6), (6, 7), (7, 8), (8, 22), (22, 23),
    (21, 9), (9, 10), (10, 11), (11, 12), (12, 24), (24, 25),
    (1, 13), (13, 14), (14, 15), (15, 16),
    (1, 17), (17, 18), (18, 19), (19, 20),
)


@dataclass(frozen=True)
class ChainOrder:
    """Ordered, possibly repeating 1-based joint indices."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(int(e) for e in self.entries)
        if not entries:
            raise ValueError("chain must have at least one entry")
        if any(e < 1 for e in entries):
            raise ValueError("chain entries are 1-based joint indices")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)


def default_chain() -> ChainOrder:
    """The 49-entry depth-first chain over the 25 Kinect v2 joints."""
    return ChainOrder(KINECT_CHAIN)


def depth_first_chain(edges: Iterable[tuple[int, int]], root: int) -> ChainOrder:
    """Walk a joint tree depth-first, recording enter and return visits.

    Children are visited in ascending joint-index order; the walk appends a
    joint each time it enters or returns to it and closes at the root, so a
    tree with E edges yields a chain of length 2E + 1.
    """
    adjacency: dict[int, set[int]] = {}
    edge_list = [(int(a), int(b)) for a, b in edges]
    for a, b in edge_list:
        if a == b:
            raise ValueError(f"self-loop at joint {a}")
        adjacency.setdefault(a, set())
        adjacency.setdefault(b, set())
        if b in adjacency[a]:
            raise ValueError(f"duplicate edge {a}-{b}")
        adjacency[a].add(b)
        adjacency[b].add(a)
    root = int(root)
    if root not in adjacency:
        raise ValueError(f"root {root} is not a joint of the tree")
    if len(edge_list) != len(adjacency) - 1:
        raise ValueError("adjacency is not a tree (edge count != joint count - 1)")

    order: list[int] = []
    seen = {root}

    def walk(node: int, parent: int | None) -> None:
        order.append(node)
        for neighbor in sorted(adjacency[node]):
            if neighbor == parent:
                continue
            if neighbor in seen:
                raise ValueError("adjacency contains a cycle")
            seen.add(neighbor)
            walk(neighbor, node)
            order.append(node)

    walk(root, None)
    if len(seen) != len(adjacency):
        raise ValueError("adjacency is disconnected")
    return ChainOrder(tuple(order))


def build_chain_matrix(track: BodyTrack, chain: ChainOrder) -> np.ndarray:
    """Gather a track's joints along the chain: output (C, T, 3).

    ``result[c, t, axis] == track.frames[t, chain.entries[c] - 1, axis]``.
    """
    joints = track.frames.shape[1]
    for entry in chain.entries:
        if entry > joints:
            raise ValueError(f"chain entry {entry} out of range for {joints} joints")
    index = np.asarray(chain.entries, dtype=np.intp) - 1
    return np.ascontiguousarray(np.transpose(track.frames[:, index, :], (1, 0, 2)))


def load_chain(path: str | Path) -> ChainOrder:
    """Load a chain order from a text file, one 1-based joint index per line."""
    entries = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            entries.append(int(line))
        except ValueError:
            raise ValueError(f"{path}:{n}: expected a joint index, got {line!r}") from None
    if not entries:
        raise ValueError(f"{path}: chain file is empty")
    return ChainOrder(tuple(entries))
