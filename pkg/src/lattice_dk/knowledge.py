"""
Knowledge structures, knowledge operators and distributed knowledge.

States are 0..n-1 and an event is a bitmask with bit k set iff state k is
in it. An agent's accessibility relation is an n x n boolean matrix and its
knowledge operator maps E to the states whose accessible set lies inside E.
Viewed on the powerset ordered by reverse inclusion, knowledge operators are
exactly the join-endomorphisms, and the operator of the intersected relation
(distributed knowledge) is their meet.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .endo import Endo
from .errors import NotAPartition, SizeMismatch, TooManyStates
from .lattice import BitsetLattice, OpCounters
from .meet import dmeet_plus
from .partitions import Partition, equal, intersection, partition_to_ds

log = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 20
DEFAULT_ENDO_MEET_MAX_STATES = 12
MAX_CODE_BITS = 32


# Events


def full_event(n: int) -> int:
    return (1 << n) - 1


def singleton(k: int) -> int:
    return 1 << k


def complement(E: int, n: int) -> int:
    return full_event(n) ^ E


def implies(E: int, F: int, n: int) -> int:
    """The event E => F, i.e. (not E) or F."""
    return complement(E, n) | F


def event_of(states: Iterable[int]) -> int:
    return reduce(lambda acc, k: acc | (1 << k), states, 0)


def states_of(E: int) -> List[int]:
    return [k for k in range(E.bit_length()) if E >> k & 1]


# Relations


def as_relation(R: Union[np.ndarray, Sequence[Sequence[bool]]]) -> np.ndarray:
    M = np.asarray(R, dtype=bool)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SizeMismatch(f"Relation must be a square matrix, got shape {M.shape}")
    return M


def relation_from_edges(n: int, edges: Iterable[Sequence[int]]) -> np.ndarray:
    R = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        R[int(a), int(b)] = True
    return R


def relation_edges(R: np.ndarray) -> List[List[int]]:
    return [[int(a), int(b)] for a, b in np.argwhere(as_relation(R))]


def row_masks(R: np.ndarray) -> List[int]:
    """Bitmask of R(w) for every state w."""
    M = as_relation(R)
    return [event_of(np.flatnonzero(row).tolist()) for row in M]


def is_reflexive(R: np.ndarray) -> bool:
    return bool(np.diagonal(as_relation(R)).all())


def is_symmetric(R: np.ndarray) -> bool:
    M = as_relation(R)
    return bool((M == M.T).all())


def is_transitive(R: np.ndarray) -> bool:
    M = as_relation(R).astype(np.int64)
    return not ((M @ M > 0) & (M == 0)).any()


def is_euclidean(R: np.ndarray) -> bool:
    """(a, b) and (a, c) in R imply (b, c) in R."""
    M = as_relation(R).astype(np.int64)
    return not ((M.T @ M > 0) & (M == 0)).any()


def is_equivalence(R: np.ndarray) -> bool:
    return is_reflexive(R) and is_symmetric(R) and is_transitive(R)


def relation_from_partition(P: Partition) -> np.ndarray:
    labels = np.asarray(P.labels(), dtype=np.int64)
    return labels[:, None] == labels[None, :]


def partition_from_relation(R: np.ndarray) -> Partition:
    M = as_relation(R)
    if not is_equivalence(M):
        raise NotAPartition("Relation is not an equivalence")
    # first state in each row is the class minimum
    return Partition.from_labels(M.argmax(axis=1).tolist())


def group_relation(relations: Sequence[np.ndarray]) -> np.ndarray:
    """Relation behind the distributed knowledge of a whole group."""
    if not relations:
        raise SizeMismatch("A group needs at least one agent")
    mats = [as_relation(R) for R in relations]
    if len({M.shape for M in mats}) != 1:
        raise SizeMismatch("Relations of a group must share the state space")
    return reduce(np.logical_and, mats)


# Operators


def k_of(R: np.ndarray, E: int) -> int:
    """K(E) = {w | R(w) is a subset of E}."""
    return event_of(w for w, m in enumerate(row_masks(R)) if m & ~E == 0)


def dk_of(R_i: np.ndarray, R_j: np.ndarray, E: int) -> int:
    """Distributed knowledge of agents i and j applied to E."""
    A, B = as_relation(R_i), as_relation(R_j)
    if A.shape != B.shape:
        raise SizeMismatch(f"Relations of shapes {A.shape} and {B.shape}")
    return k_of(A & B, E)


@dataclass(eq=False)
class KOpArray:
    """Knowledge operator tabulated over all 2^n events: vk[E] = K(E)."""

    n: int
    vk: np.ndarray

    def __post_init__(self):
        self.vk = np.asarray(self.vk, dtype=np.uint32)
        if self.vk.shape != (1 << self.n,):
            raise SizeMismatch(f"Operator over {self.n} states needs {1 << self.n} entries, got {self.vk.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KOpArray):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.vk, other.vk))

    def __getitem__(self, E: int) -> int:
        return int(self.vk[E])

    def __len__(self) -> int:
        return len(self.vk)


def build_kop_array(R: np.ndarray, max_states: int = DEFAULT_MAX_STATES) -> KOpArray:
    """
    Tabulate the knowledge operator of ``R`` over every event.

    Raises:
        TooManyStates: the relation has more than ``max_states`` states.
    """
    M = as_relation(R)
    n = M.shape[0]
    if n > min(max_states, MAX_CODE_BITS):
        raise TooManyStates(f"{n} states exceed the operator cap of {min(max_states, MAX_CODE_BITS)}")
    events = np.arange(1 << n, dtype=np.uint64)
    vk = np.zeros(1 << n, dtype=np.uint64)
    for w, m in enumerate(row_masks(M)):
        mask = np.uint64(m)
        vk |= ((events & mask) == mask).astype(np.uint64) << np.uint64(w)
    log.debug("Tabulated knowledge operator over %d states (%d events)", n, 1 << n)
    return KOpArray(n, vk.astype(np.uint32))


def relation_from_kop(K: KOpArray) -> np.ndarray:
    """(w, v) is in R iff w is outside K(not {v})."""
    full = full_event(K.n)
    probes = np.array([full ^ (1 << v) for v in range(K.n)], dtype=np.int64)
    cols = K.vk[probes].astype(np.int64) if K.n else np.zeros(0, dtype=np.int64)
    shifts = np.arange(K.n, dtype=np.int64)
    return ((cols[None, :] >> shifts[:, None]) & 1) == 0


def _operator_codes(K: Union[KOpArray, np.ndarray, Sequence[int]]) -> np.ndarray:
    return K.vk if isinstance(K, KOpArray) else np.asarray(K)


def is_wiser(VK_i: KOpArray, VK_j: KOpArray) -> bool:
    """Agent i knows every event agent j knows."""
    vi, vj = _operator_codes(VK_i), _operator_codes(VK_j)
    if vi.shape != vj.shape:
        raise SizeMismatch("Operators over different state spaces")
    return bool(((vj & ~vi) == 0).all())


# Deciding distributed knowledge


def decide_dk_operators(VK_i, VK_j, VK_m) -> bool:
    """
    Whether K_m is the distributed knowledge of i and j, probing only the
    n co-singleton events Omega - {k}.
    """
    vi, vj, vm = (_operator_codes(K) for K in (VK_i, VK_j, VK_m))
    if not (len(vi) == len(vj) == len(vm)):
        raise SizeMismatch(f"Operator sizes {len(vi)}, {len(vj)}, {len(vm)} differ")
    size = len(vi)
    if size == 0 or size & (size - 1):
        raise SizeMismatch(f"Operator size {size} is not a power of two")
    n = size.bit_length() - 1
    full = full_event(n)
    for k in range(n):
        p = full - (1 << k)
        if int(vm[p]) != int(vi[p]) | int(vj[p]):
            return False
    return True


def decide_dk_relations(M_i: np.ndarray, M_j: np.ndarray, M_m: np.ndarray) -> bool:
    """Whether R_m is the entrywise conjunction of R_i and R_j."""
    A, B, C = (as_relation(M) for M in (M_i, M_j, M_m))
    if not (A.shape == B.shape == C.shape):
        raise SizeMismatch(f"Relation shapes {A.shape}, {B.shape}, {C.shape} differ")
    return bool(np.array_equal(C, A & B))


PartitionLike = Union[Partition, Sequence[Sequence[int]]]


def _as_partition(P: PartitionLike) -> Partition:
    return P if isinstance(P, Partition) else Partition.from_blocks(P)


def decide_dk_partitions(P_i: PartitionLike, P_j: PartitionLike, P_m: PartitionLike) -> bool:
    """Whether P_m is the common refinement of P_i and P_j, via disjoint sets."""
    Pi, Pj, Pm = (_as_partition(P) for P in (P_i, P_j, P_m))
    if not (Pi.n == Pj.n == Pm.n):
        raise SizeMismatch(f"Partitions of {Pi.n}, {Pj.n}, {Pm.n} states")
    q = intersection(partition_to_ds(Pi), partition_to_ds(Pj))
    return equal(q, partition_to_ds(Pm))


# Operators as join-endomorphisms of (P(Omega), reverse inclusion)


def endo_from_kop(K: KOpArray) -> Endo:
    return Endo(BitsetLattice(K.n, dual=True), K.vk.tolist(), validated=True)


def relation_from_endo(f: Endo) -> np.ndarray:
    """Relation of a join-endomorphism of the reverse-inclusion powerset."""
    L = f.lattice
    if not isinstance(L, BitsetLattice) or not L.dual:
        raise SizeMismatch("Expected a map on a reverse-inclusion powerset lattice")
    n = L.k
    full = full_event(n)
    R = np.zeros((n, n), dtype=bool)
    for v in range(n):
        image = f[full ^ (1 << v)]
        for w in range(n):
            R[w, v] = not (image >> w & 1)
    return R


def dk_as_endo_meet(
    R_i: np.ndarray,
    R_j: np.ndarray,
    max_states: int = DEFAULT_ENDO_MEET_MAX_STATES,
    counters: Optional[OpCounters] = None,
) -> Endo:
    """Distributed knowledge as the meet of the two operators in E(L)."""
    A, B = as_relation(R_i), as_relation(R_j)
    if A.shape != B.shape:
        raise SizeMismatch(f"Relations of shapes {A.shape} and {B.shape}")
    n = A.shape[0]
    if n > max_states:
        raise TooManyStates(f"{n} states exceed the endomorphism-meet cap of {max_states}")
    L = BitsetLattice(n, dual=True)
    f = Endo(L, build_kop_array(A, max_states).vk.tolist(), validated=True)
    g = Endo(L, build_kop_array(B, max_states).vk.tolist(), validated=True)
    return dmeet_plus(L, f, g, counters).result


@dataclass
class KnowledgeStructure:
    """Agents' accessibility relations over n states."""

    n: int
    relations: Dict[str, np.ndarray] = field(default_factory=dict)
    partitions: Dict[str, Partition] = field(default_factory=dict)

    def add_relation(self, agent: str, R: np.ndarray) -> None:
        M = as_relation(R)
        if M.shape[0] != self.n:
            raise SizeMismatch(f"Relation over {M.shape[0]} states, structure has {self.n}")
        self.relations[agent] = M
        self.partitions.pop(agent, None)

    def add_partition(self, agent: str, P: PartitionLike) -> None:
        part = _as_partition(P)
        if part.n != self.n:
            raise SizeMismatch(f"Partition of {part.n} states, structure has {self.n}")
        self.relations[agent] = relation_from_partition(part)
        self.partitions[agent] = part

    @property
    def agents(self) -> List[str]:
        return sorted(self.relations)

    def knows(self, agent: str, E: int) -> int:
        return k_of(self.relations[agent], E)

    def operator(self, agent: str, max_states: int = DEFAULT_MAX_STATES) -> KOpArray:
        return build_kop_array(self.relations[agent], max_states)

    def distributed(self, *agents: str) -> np.ndarray:
        return group_relation([self.relations[a] for a in agents])

    def is_aumann(self) -> bool:
        return all(is_equivalence(R) for R in self.relations.values())
