"""
Deterministic and random generators for lattices, maps, relations and
partitions.

Every random generator takes a ``numpy.random.Generator``; build one from a
:class:`GenConfig` so identical configurations give identical output.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CycleDetected, LatticeError, NotAPartition, OutputTooLarge, TooLarge
from .lattice import (
    DEFAULT_TABLE_THRESHOLD,
    MAX_POWERSET_RANK,
    BitsetLattice,
    Lattice,
    TabledLattice,
    build_from_covers,
    build_from_meet_closed,
    build_from_sets,
)
from .partitions import Partition, intersect_partitions

log = logging.getLogger(__name__)

MAX_POSET_SIZE = 16
MAX_ARBITRARY_TARGET = 512
MAX_PARTITION_SIZE = 10**6


@dataclass
class GenConfig:
    """Seed and size knobs shared by the generators."""

    seed: int = 0
    cover_probability: float = 0.3
    max_attempts: int = 20
    max_size: int = DEFAULT_TABLE_THRESHOLD
    stirling_cache: int = 1000

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @classmethod
    def from_config(cls, config, seed: int = 0) -> "GenConfig":
        return cls(
            seed=seed,
            cover_probability=config.get("generators.cover_probability"),
            max_attempts=config.get("generators.max_attempts"),
            max_size=config.get("generators.max_lattice_size"),
            stirling_cache=config.get("generators.stirling_cache"),
        )


# Fixed lattices


def powerset_lattice(k: int) -> BitsetLattice:
    if k > MAX_POWERSET_RANK:
        raise TooLarge(f"Powerset rank {k} exceeds {MAX_POWERSET_RANK}")
    return BitsetLattice(k)


def mn_lattice(n: int) -> TabledLattice:
    """n pairwise incomparable atoms 1..n between bottom 0 and top n+1."""
    if n < 0:
        raise LatticeError("M_n needs n >= 0")
    top = n + 1
    if n == 0:
        return build_from_covers(2, [(0, 1)])
    pairs = [(0, i) for i in range(1, n + 1)] + [(i, top) for i in range(1, n + 1)]
    return build_from_covers(n + 2, pairs)


def chain_lattice(n: int) -> TabledLattice:
    return build_from_covers(n, [(i, i + 1) for i in range(n - 1)])


def grid_lattice(a: int, b: int) -> TabledLattice:
    """Product of an a-chain and a b-chain; (i, j) has index i * b + j."""
    pairs = []
    for i in range(a):
        for j in range(b):
            if i + 1 < a:
                pairs.append((i * b + j, (i + 1) * b + j))
            if j + 1 < b:
                pairs.append((i * b + j, i * b + j + 1))
    return build_from_covers(a * b, pairs)


def downset_lattice(
    k: int, less_pairs: Iterable[Sequence[int]], max_size: int = DEFAULT_TABLE_THRESHOLD
) -> TabledLattice:
    """
    Lattice of down-sets of a poset on k points, ordered by inclusion.

    ``less_pairs`` holds (i, j) with i below j; it is closed transitively.
    Down-sets are discovered breadth-first from the empty set by adding one
    point whose strict down-set is already present.

    Raises:
        OutputTooLarge: more than ``max_size`` down-sets.
    """
    below = [1 << i for i in range(k)]
    for i, j in less_pairs:
        below[int(j)] |= 1 << int(i)
    for m in range(k):
        for j in range(k):
            if below[j] >> m & 1:
                below[j] |= below[m]
    for i in range(k):
        for j in range(i + 1, k):
            if below[j] >> i & 1 and below[i] >> j & 1:
                raise CycleDetected(f"Points {i} and {j} are below each other")
    strict = [below[p] & ~(1 << p) for p in range(k)]

    seen = {0}
    queue = deque([0])
    while queue:
        d = queue.popleft()
        for p in range(k):
            if d >> p & 1 or strict[p] & ~d:
                continue
            e = d | (1 << p)
            if e not in seen:
                seen.add(e)
                if len(seen) > max_size:
                    raise OutputTooLarge(f"More than {max_size} down-sets")
                queue.append(e)
    return build_from_sets(seen, max(max_size, 1))


def lattice_from_family(sets: Iterable[int], m: int) -> TabledLattice:
    """
    Close a family of subsets of an m-set under intersection, adjoin the
    whole set and order by inclusion.
    """
    full = (1 << m) - 1
    family = {full}
    for s in sets:
        # one pass suffices since family is already closed
        family |= {s & x for x in family}
    return build_from_meet_closed(family)


# Random lattices


def random_poset_pairs(k: int, rng: np.random.Generator, p: float = 0.3) -> List[Tuple[int, int]]:
    """Each (i, j) with i < j independently with probability p."""
    return [(i, j) for i in range(k) for j in range(i + 1, k) if rng.random() < p]


def random_distributive(k_poset: int, rng: np.random.Generator, config: Optional[GenConfig] = None) -> TabledLattice:
    """
    Down-set lattice of a random poset on ``k_poset`` points.

    Oversized outputs are redrawn up to ``config.max_attempts`` times.
    """
    config = config or GenConfig()
    if k_poset > MAX_POSET_SIZE:
        raise TooLarge(f"Poset size {k_poset} exceeds {MAX_POSET_SIZE}")
    for attempt in range(1, config.max_attempts + 1):
        pairs = random_poset_pairs(k_poset, rng, config.cover_probability)
        try:
            return downset_lattice(k_poset, pairs, config.max_size)
        except OutputTooLarge:
            log.debug("Attempt %d produced too many down-sets, redrawing", attempt)
    raise OutputTooLarge(
        f"No poset on {k_poset} points gave at most {config.max_size} down-sets in {config.max_attempts} attempts"
    )


def random_arbitrary(target_n: int, rng: np.random.Generator) -> TabledLattice:
    """
    A random, generally non-distributive lattice of roughly ``target_n``
    elements: random subsets of a small ground set, closed under
    intersection, with the ground set as top.
    """
    if target_n > MAX_ARBITRARY_TARGET:
        raise TooLarge(f"Target size {target_n} exceeds {MAX_ARBITRARY_TARGET}")
    m = max(2, target_n.bit_length() + 2)
    full = (1 << m) - 1
    family = {full}
    tries = 0
    while len(family) < target_n and tries < 20 * max(target_n, 1):
        s = int(rng.integers(0, full + 1))
        family |= {s & x for x in family}
        tries += 1
    L = build_from_meet_closed(family)
    log.debug("random_arbitrary: target %d, got %d elements", target_n, L.n)
    return L


# Partitions


class StirlingTable:
    """
    Cached Stirling numbers of the second kind, kept only as the floats the
    sampler needs.

    Rows are computed exactly with Python integers, one row at a time, and
    reduced to ``ratio(m, j) = S(m-1, j-1) / S(m, j)`` and the block-count
    weights ``S(m, k) / B(m)``.
    """

    def __init__(self, limit: int = 1000):
        self.limit = limit
        self._row: List[int] = [1]
        self._ratios: List[np.ndarray] = [np.zeros(1)]
        self._weights: List[np.ndarray] = [np.ones(1)]

    @property
    def size(self) -> int:
        return len(self._ratios) - 1

    def extend(self, n: int) -> None:
        if n > self.limit:
            raise TooLarge(f"Stirling table is capped at n={self.limit}")
        while self.size < n:
            prev = self._row
            m = len(prev)
            row = [0] * (m + 1)
            ratios = np.zeros(m + 1)
            for j in range(1, m + 1):
                row[j] = prev[j - 1] + (j * prev[j] if j < m else 0)
                ratios[j] = prev[j - 1] / row[j]
            bell = sum(row)
            self._row = row
            self._ratios.append(ratios)
            self._weights.append(np.array([s / bell for s in row]))

    def ratio(self, m: int, j: int) -> float:
        return float(self._ratios[m][j])

    def weights(self, n: int) -> np.ndarray:
        self.extend(n)
        return self._weights[n]


@lru_cache(maxsize=4)
def stirling_table(limit: int = 1000) -> StirlingTable:
    """Shared table per cap, so repeated sampling reuses computed rows."""
    return StirlingTable(limit)


def _exact_labels(n: int, rng: np.random.Generator, table: StirlingTable) -> List[int]:
    w = table.weights(n)
    k = int(rng.choice(n + 1, p=w / w.sum()))
    opens = [False] * (n + 1)
    j = k
    for m in range(n, 0, -1):
        if rng.random() < table.ratio(m, j):
            opens[m] = True
            j -= 1
    labels = []
    blocks = 0
    for m in range(1, n + 1):
        if opens[m]:
            labels.append(blocks)
            blocks += 1
        else:
            labels.append(int(rng.integers(blocks)))
    return labels


def _urn_labels(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Throw n balls into M urns, P(M = m) proportional to m^n / m!.

    M is truncated to m <= n and weights below 1e-12 of the largest are
    dropped, so the sampler is uniform only up to that tolerance.
    """
    ms = np.arange(1, n + 1, dtype=np.float64)
    log_w = n * np.log(ms) - np.cumsum(np.log(ms))
    p = np.exp(log_w - log_w.max())
    p[p < 1e-12] = 0.0
    urns = int(rng.choice(n, p=p / p.sum())) + 1
    return rng.integers(urns, size=n)


def random_partition(n: int, rng: np.random.Generator, cache_limit: int = 1000) -> Partition:
    """
    Uniformly random partition of {0, ..., n-1}.

    Up to ``cache_limit`` the block count is drawn with Stirling weights and
    elements are placed with the conditional recurrence; above it the urn
    method draws the number of urns with floating-point weights.
    """
    if n > MAX_PARTITION_SIZE:
        raise TooLarge(f"Partition size {n} exceeds {MAX_PARTITION_SIZE}")
    if n == 0:
        return Partition((), 0)
    if n <= cache_limit:
        return Partition.from_labels(_exact_labels(n, rng, stirling_table(cache_limit)))
    return Partition.from_labels(_urn_labels(n, rng).tolist())


def perturb_partition(P: Partition, rng: np.random.Generator) -> Partition:
    """A partition differing from P: two random blocks merged, or the only block split."""
    blocks = [list(b) for b in P.blocks]
    if len(blocks) >= 2:
        i, j = (int(x) for x in rng.choice(len(blocks), size=2, replace=False))
        merged = blocks[i] + blocks[j]
        rest = [b for k, b in enumerate(blocks) if k not in (i, j)]
        return Partition.from_blocks(rest + [merged], P.n).normalized()
    if P.n < 2:
        raise NotAPartition("A partition of fewer than two elements has no neighbour")
    block = list(blocks[0])
    rng.shuffle(block)
    cut = int(rng.integers(1, len(block)))
    return Partition.from_blocks([block[:cut], block[cut:]], P.n).normalized()


@dataclass(frozen=True)
class DKInstance:
    P_i: Partition
    P_j: Partition
    P_m: Partition
    expected: bool


def random_dk_instance(n: int, rng: np.random.Generator, cache_limit: int = 1000) -> DKInstance:
    """Two random partitions and, with equal odds, their intersection or a perturbation of it."""
    P_i = random_partition(n, rng, cache_limit)
    P_j = random_partition(n, rng, cache_limit)
    truth = intersect_partitions(P_i, P_j)
    if rng.random() < 0.5:
        return DKInstance(P_i, P_j, truth, True)
    return DKInstance(P_i, P_j, perturb_partition(truth, rng), False)


# Relations


def random_relation(n: int, rng: np.random.Generator, density: float = 0.5) -> np.ndarray:
    return rng.random((n, n)) < density


def random_relation_pair(n: int, rng: np.random.Generator, density: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    return random_relation(n, rng, density), random_relation(n, rng, density)


def random_equivalence(n: int, rng: np.random.Generator) -> np.ndarray:
    labels = np.asarray(random_partition(n, rng).labels())
    return labels[:, None] == labels[None, :]


# Instances by kind name


LATTICE_KINDS = ("powerset", "mn", "chain", "dist", "arb")


def lattice_of_kind(kind: str, param: int, rng: np.random.Generator, config: Optional[GenConfig] = None) -> Lattice:
    """Dispatch on the kind names used by the CLI and the benchmarks."""
    if kind == "powerset":
        return powerset_lattice(param)
    if kind == "mn":
        return mn_lattice(param)
    if kind == "chain":
        return chain_lattice(param)
    if kind == "dist":
        return random_distributive(param, rng, config)
    if kind == "arb":
        return random_arbitrary(param, rng)
    raise LatticeError(f"Unknown lattice kind {kind!r}; choose from {LATTICE_KINDS}")
