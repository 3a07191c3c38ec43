"""
Disjoint sets and partitions of {0, ..., n-1}.

A :class:`DisjointSet` is the mutable representative function r with
r(r(i)) = r(i). Finds compress paths, so a DisjointSet is single-writer and
must not be shared between threads. Canonical arrays (the minimum element
of each class) and :class:`Partition` blocks are immutable and comparable.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import NotAPartition, SizeMismatch

log = logging.getLogger(__name__)

_KEY_SHIFT = 32


class DisjointSet:
    """Union-find with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent: List[int] = list(range(n))
        self.rank: List[int] = [0] * n
        self.ops = 0

    @classmethod
    def from_representatives(cls, reps: Sequence[int]) -> "DisjointSet":
        """Wrap a representative array; entries must point inside the array."""
        n = len(reps)
        ds = cls(n)
        for i, r in enumerate(reps):
            if not 0 <= r < n:
                raise NotAPartition(f"Representative {r} of {i} is out of range")
        ds.parent = [int(r) for r in reps]
        return ds

    def __len__(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"DisjointSet(n={len(self.parent)})"

    def find(self, i: int) -> int:
        self.ops += 1
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        self.ops += 1
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1

    def representatives(self) -> List[int]:
        return [self.find(i) for i in range(len(self.parent))]


def ds_find(ds: DisjointSet, i: int) -> int:
    return ds.find(i)


def ds_union(ds: DisjointSet, i: int, j: int) -> None:
    ds.union(i, j)


@dataclass(frozen=True)
class Partition:
    """Blocks of a partition of {0, ..., n-1}; validated on construction."""

    blocks: Tuple[Tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        seen = [False] * self.n
        for block in self.blocks:
            if not block:
                raise NotAPartition("Partition blocks must be non-empty")
            for x in block:
                if not 0 <= x < self.n:
                    raise NotAPartition(f"Element {x} is outside 0..{self.n - 1}")
                if seen[x]:
                    raise NotAPartition(f"Element {x} appears in more than one block")
                seen[x] = True
        if not all(seen):
            missing = seen.index(False)
            raise NotAPartition(f"Element {missing} is in no block")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: Optional[int] = None) -> "Partition":
        tupled = tuple(tuple(int(x) for x in block) for block in blocks)
        if n is None:
            n = sum(len(b) for b in tupled)
        return cls(tupled, n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Group elements by label; blocks come out normalized."""
        groups: Dict[int, List[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(i)
        return cls(tuple(tuple(g) for g in groups.values()), len(labels)).normalized()

    def normalized(self) -> "Partition":
        """Ascending within each block, blocks ordered by their minimum."""
        blocks = sorted(tuple(sorted(b)) for b in self.blocks)
        return Partition(tuple(blocks), self.n)

    def to_lists(self) -> List[List[int]]:
        return [list(b) for b in self.blocks]

    def labels(self) -> List[int]:
        out = [0] * self.n
        for k, block in enumerate(self.blocks):
            for x in block:
                out[x] = k
        return out


def _check_same_size(r1: DisjointSet, r2: DisjointSet) -> None:
    if len(r1) != len(r2):
        raise SizeMismatch(f"Disjoint sets over {len(r1)} and {len(r2)} elements")


def intersection(r1: DisjointSet, r2: DisjointSet) -> DisjointSet:
    """
    Disjoint set whose classes are the pairwise intersections of the classes
    of ``r1`` and ``r2``.

    Each i is keyed by its pair of representatives packed into one 64-bit
    integer; the last index seen with a key becomes its representative.
    """
    _check_same_size(r1, r2)
    keys = [(a << _KEY_SHIFT) | b for a, b in zip(r1.representatives(), r2.representatives())]
    g = dict(zip(keys, range(len(keys))))
    log.debug("Intersection over %d elements has %d classes", len(keys), len(g))
    return DisjointSet.from_representatives([g[k] for k in keys])


def canonical(r: DisjointSet) -> Tuple[int, ...]:
    """Representative function mapping each element to the minimum of its class."""
    reps = r.representatives()
    t = list(range(len(reps)))
    for i, ri in enumerate(reps):
        if i < t[ri]:
            t[ri] = i
    return tuple(t[ri] for ri in reps)


def equal(r1: DisjointSet, r2: DisjointSet) -> bool:
    _check_same_size(r1, r2)
    return canonical(r1) == canonical(r2)


def partition_to_ds(P: Partition) -> DisjointSet:
    ds = DisjointSet(P.n)
    for block in P.blocks:
        head = block[0]
        for x in block[1:]:
            ds.union(head, x)
    return ds


def ds_to_partition(ds: DisjointSet) -> Partition:
    groups: Dict[int, List[int]] = defaultdict(list)
    for i, m in enumerate(canonical(ds)):
        groups[m].append(i)
    # canonical keys are class minima, so insertion order is by minimum
    return Partition(tuple(tuple(groups[m]) for m in groups), len(ds))


def intersect_partitions(P1: Partition, P2: Partition) -> Partition:
    if P1.n != P2.n:
        raise SizeMismatch(f"Partitions of {P1.n} and {P2.n} elements")
    return ds_to_partition(intersection(partition_to_ds(P1), partition_to_ds(P2)))


def components(n: int, edges: Iterable[Sequence[int]]) -> DisjointSet:
    """Connected components of an undirected graph on n nodes."""
    ds = DisjointSet(n)
    for u, v in edges:
        ds.union(int(u), int(v))
    return ds


def common_components(n: int, edges_1: Iterable[Sequence[int]], edges_2: Iterable[Sequence[int]]) -> DisjointSet:
    """Classes of nodes connected to each other in both graphs."""
    return intersection(components(n, edges_1), components(n, edges_2))
