"""
Finite lattices: order, join, meet, covers and join-irreducible elements.

Two backends share the :class:`Lattice` interface. :class:`TabledLattice`
keeps dense n x n order, join and meet tables and is what
:func:`build_from_covers` returns. :class:`BitsetLattice` computes joins and
meets on bitmask codes and is used for powerset lattices, which are too big
to tabulate.
"""

import heapq
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CycleDetected, NotALattice, NotBounded, TooLarge

log = logging.getLogger(__name__)

DEFAULT_TABLE_THRESHOLD = 4096
MAX_POWERSET_RANK = 24


@dataclass
class OpCounters:
    """Tallies of binary join and meet evaluations for one algorithm run."""

    joins: int = 0
    meets: int = 0

    @property
    def total(self) -> int:
        return self.joins + self.meets

    def reset(self) -> None:
        self.joins = 0
        self.meets = 0


class Lattice:
    """
    A finite lattice on the elements 0..n-1.

    ``join`` and ``meet`` increment the counters they are given; the
    underscored ``_join``/``_meet`` are the uncounted lookups used by
    validation code. Instances are immutable after construction.
    """

    n: int
    bottom: int
    top: int

    # Backend primitives

    def le(self, a: int, b: int) -> bool:
        raise NotImplementedError

    def _join(self, a: int, b: int) -> int:
        raise NotImplementedError

    def _meet(self, a: int, b: int) -> int:
        raise NotImplementedError

    def lower_covers(self, a: int) -> List[int]:
        raise NotImplementedError

    def upper_covers(self, a: int) -> List[int]:
        raise NotImplementedError

    @property
    def topo(self) -> List[int]:
        raise NotImplementedError

    @property
    def ji(self) -> List[int]:
        raise NotImplementedError

    # Counted operations

    def join(self, a: int, b: int, counters: Optional[OpCounters] = None) -> int:
        if counters is not None:
            counters.joins += 1
        return self._join(a, b)

    def meet(self, a: int, b: int, counters: Optional[OpCounters] = None) -> int:
        if counters is not None:
            counters.meets += 1
        return self._meet(a, b)

    def join_all(self, items: Iterable[int], counters: Optional[OpCounters] = None) -> int:
        """Fold join over ``items`` starting from bottom; one join per item."""
        acc = self.bottom
        for x in items:
            acc = self.join(acc, x, counters)
        return acc

    def meet_all(self, items: Iterable[int], counters: Optional[OpCounters] = None) -> int:
        """Fold meet over ``items`` starting from top; one meet per item."""
        acc = self.top
        for x in items:
            acc = self.meet(acc, x, counters)
        return acc

    # Derived queries

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.le(a, b)

    def down(self, e: int) -> List[int]:
        return [x for x in range(self.n) if self.le(x, e)]

    def up(self, a: int) -> List[int]:
        return [x for x in range(self.n) if self.le(a, x)]

    @cached_property
    def ji_set(self) -> FrozenSet[int]:
        return frozenset(self.ji)

    def is_join_irreducible(self, a: int) -> bool:
        return len(self.lower_covers(a)) == 1

    def ji_downset(self, e: int) -> List[int]:
        """Join-irreducible elements below ``e``, in ascending index order."""
        return [c for c in self.ji if self.le(c, e)]

    def cover_pairs(self) -> List[Tuple[int, int]]:
        """All (lower, upper) cover pairs, ordered by upper then lower element."""
        return [(b, a) for a in range(self.n) for b in self.lower_covers(a)]

    def subtract(self, c: int, a: int) -> int:
        """Least e with a v e >= c, as the meet of every such e. Uncounted."""
        acc = self.top
        for e in range(self.n):
            if self.le(c, self._join(a, e)):
                acc = self._meet(acc, e)
        return acc

    def distributivity_witness(self) -> Optional[Tuple[int, int, int]]:
        """First triple (a, b, c) with a ^ (b v c) != (a ^ b) v (a ^ c), or None."""
        for a in range(self.n):
            for b in range(self.n):
                for c in range(self.n):
                    lhs = self._meet(a, self._join(b, c))
                    rhs = self._join(self._meet(a, b), self._meet(a, c))
                    if lhs != rhs:
                        return a, b, c
        return None

    @cached_property
    def is_distributive(self) -> bool:
        return self.distributivity_witness() is None


def _topo_sort(n: int, lower: Sequence[Sequence[int]]) -> List[int]:
    """Repeatedly extract the minimal element with the smallest index."""
    uppers: List[List[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for b in range(n):
        for a in set(lower[b]):
            uppers[a].append(b)
            indeg[b] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in uppers[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != n:
        stuck = sorted(set(range(n)) - set(order))
        raise CycleDetected(f"Cover relation has a cycle through elements {stuck[:8]}")
    return order


class TabledLattice(Lattice):
    """Lattice backed by precomputed order, join and meet tables."""

    def __init__(self, leq: np.ndarray, join_table: np.ndarray, meet_table: np.ndarray):
        self.n = int(leq.shape[0])
        self.leq = leq
        self.join_table = join_table
        self.meet_table = meet_table
        self.codes: Optional[List[int]] = None
        for arr in (self.leq, self.join_table, self.meet_table):
            arr.flags.writeable = False

        self.bottom = int(np.flatnonzero(leq.all(axis=1))[0])
        self.top = int(np.flatnonzero(leq.all(axis=0))[0])

        # child[b, a] iff a covers b
        lt = leq & ~np.eye(self.n, dtype=bool)
        lt_f = lt.astype(np.float32)
        child = lt & ~(lt_f @ lt_f > 0)
        self._lower = [np.flatnonzero(child[:, a]).tolist() for a in range(self.n)]
        self._upper = [np.flatnonzero(child[a]).tolist() for a in range(self.n)]

    def __repr__(self) -> str:
        return f"TabledLattice(n={self.n}, ji={len(self.ji)})"

    @cached_property
    def _jt(self) -> List[List[int]]:
        return self.join_table.tolist()

    @cached_property
    def _mt(self) -> List[List[int]]:
        return self.meet_table.tolist()

    def le(self, a: int, b: int) -> bool:
        return self._mt[a][b] == a

    def _join(self, a: int, b: int) -> int:
        return self._jt[a][b]

    def _meet(self, a: int, b: int) -> int:
        return self._mt[a][b]

    def lower_covers(self, a: int) -> List[int]:
        return self._lower[a]

    def upper_covers(self, a: int) -> List[int]:
        return self._upper[a]

    @cached_property
    def topo(self) -> List[int]:
        return _topo_sort(self.n, self._lower)

    @cached_property
    def ji(self) -> List[int]:
        return [a for a in range(self.n) if len(self._lower[a]) == 1]

    def down(self, e: int) -> List[int]:
        return np.flatnonzero(self.leq[:, e]).tolist()

    def up(self, a: int) -> List[int]:
        return np.flatnonzero(self.leq[a]).tolist()

    def subtract(self, c: int, a: int) -> int:
        candidates = np.flatnonzero(self.leq[c, self.join_table[a]])
        acc = self.top
        for e in candidates.tolist():
            acc = self._mt[acc][e]
        return acc

    def distributivity_witness(self) -> Optional[Tuple[int, int, int]]:
        jt = self.join_table
        mt = self.meet_table
        for a in range(self.n):
            row = mt[a]
            diff = row[jt] != jt[np.ix_(row, row)]
            if diff.any():
                b, c = (int(x) for x in np.argwhere(diff)[0])
                log.debug("Distributivity fails at (%d, %d, %d)", a, b, c)
                return a, b, c
        return None


def _submasks(mask: int) -> Iterator[int]:
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


class BitsetLattice(Lattice):
    """
    Powerset lattice of a k-element set with elements coded as bitmasks.

    With ``dual=False`` the order is inclusion (join = OR, meet = AND,
    bottom = 0). With ``dual=True`` the order is reverse inclusion: join is
    intersection, meet is union and bottom is the full set.
    """

    def __init__(self, k: int, dual: bool = False):
        if k < 0 or k > MAX_POWERSET_RANK:
            raise TooLarge(f"Powerset rank must be between 0 and {MAX_POWERSET_RANK}, got {k}")
        self.k = k
        self.dual = dual
        self.n = 1 << k
        self.full = self.n - 1
        self.bottom = self.full if dual else 0
        self.top = 0 if dual else self.full

    def __repr__(self) -> str:
        return f"BitsetLattice(k={self.k}, dual={self.dual})"

    def le(self, a: int, b: int) -> bool:
        if self.dual:
            return b & ~a == 0
        return a & ~b == 0

    def _join(self, a: int, b: int) -> int:
        return a & b if self.dual else a | b

    def _meet(self, a: int, b: int) -> int:
        return a | b if self.dual else a & b

    def _bits(self, mask: int) -> List[int]:
        return [1 << i for i in range(self.k) if mask >> i & 1]

    def lower_covers(self, a: int) -> List[int]:
        if self.dual:
            return sorted(a | bit for bit in self._bits(self.full ^ a))
        return sorted(a ^ bit for bit in self._bits(a))

    def upper_covers(self, a: int) -> List[int]:
        if self.dual:
            return sorted(a ^ bit for bit in self._bits(a))
        return sorted(a | bit for bit in self._bits(self.full ^ a))

    @cached_property
    def topo(self) -> List[int]:
        if self.dual:
            return sorted(range(self.n), key=lambda x: (self.k - bin(x).count("1"), x))
        # numeric order already extracts the smallest minimal element first
        return list(range(self.n))

    @cached_property
    def ji(self) -> List[int]:
        if self.dual:
            return sorted(self.full ^ (1 << i) for i in range(self.k))
        return [1 << i for i in range(self.k)]

    def is_join_irreducible(self, a: int) -> bool:
        return a in self.ji_set

    def down(self, e: int) -> List[int]:
        if self.dual:
            return sorted(e | s for s in _submasks(self.full ^ e))
        return sorted(_submasks(e))

    def up(self, a: int) -> List[int]:
        if self.dual:
            return sorted(_submasks(a))
        return sorted(a | s for s in _submasks(self.full ^ a))

    def subtract(self, c: int, a: int) -> int:
        if self.dual:
            return c | (self.full ^ a)
        return c & ~a

    def distributivity_witness(self) -> Optional[Tuple[int, int, int]]:
        return None

    @property
    def leq(self) -> np.ndarray:
        """Dense order table; only available for k <= 12."""
        if self.k > 12:
            raise TooLarge(f"Dense order table of a rank-{self.k} powerset is too large")
        codes = np.arange(self.n)
        if self.dual:
            return (codes[None, :] & ~codes[:, None]) == 0
        return (codes[:, None] & ~codes[None, :]) == 0


def _resolve_bounds(up: np.ndarray, what: str) -> np.ndarray:
    """
    Resolve least upper bounds for every pair from the up-set rows ``up``.

    Row i of ``up`` marks the elements above i. The candidate for (i, k) is
    the common upper bound with the largest up-set; it is the least one iff
    its up-set is the whole set of common upper bounds.
    """
    n = up.shape[0]
    sizes = up.sum(axis=1)
    table = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        common = up[i] & up
        cand = np.where(common, sizes, -1).argmax(axis=1)
        ok = common.sum(axis=1) == sizes[cand]
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            raise NotALattice(f"Elements {i} and {k} have no unique {what}")
        table[i] = cand
    return table


def build_from_leq(leq: np.ndarray, table_threshold: int = DEFAULT_TABLE_THRESHOLD) -> TabledLattice:
    """
    Build a tabled lattice from a reflexive, transitive order matrix.

    Args:
        leq: n x n boolean matrix, ``leq[a, b]`` iff a <= b.
        table_threshold: Largest n accepted.

    Returns:
        The validated lattice.
    """
    leq = np.array(leq, dtype=bool)
    n = leq.shape[0]
    if leq.shape != (n, n):
        raise NotALattice(f"Order matrix must be square, got shape {leq.shape}")
    if n == 0:
        raise NotBounded("A lattice needs at least one element")
    if n > table_threshold:
        raise TooLarge(f"{n} elements exceed the table threshold {table_threshold}")
    np.fill_diagonal(leq, True)
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        a, b = (int(x) for x in np.argwhere(both)[0])
        raise CycleDetected(f"Elements {a} and {b} are below each other")
    leq_f = leq.astype(np.float32)
    if ((leq_f @ leq_f > 0) & ~leq).any():
        raise NotALattice("Order matrix is not transitive")

    if np.count_nonzero(leq.all(axis=1)) != 1:
        raise NotBounded("Order has no unique bottom element")
    if np.count_nonzero(leq.all(axis=0)) != 1:
        raise NotBounded("Order has no unique top element")

    join_table = _resolve_bounds(leq, "least upper bound")
    meet_table = _resolve_bounds(np.ascontiguousarray(leq.T), "greatest lower bound")
    return TabledLattice(leq, join_table, meet_table)


def _by_rank(codes: Iterable[int]) -> List[int]:
    return sorted(set(codes), key=lambda c: (bin(c).count("1"), c))


def _inclusion(codes: np.ndarray) -> np.ndarray:
    return (codes[:, None] & ~codes[None, :]) == 0


def build_from_sets(codes: Iterable[int], table_threshold: int = DEFAULT_TABLE_THRESHOLD) -> TabledLattice:
    """
    Lattice of a family of sets (bitmask codes) closed under union and
    intersection, ordered by inclusion.

    Elements are indexed by (cardinality, code); ``codes`` on the result
    lists the set behind every index.
    """
    ordered = np.array(_by_rank(codes), dtype=np.int64)
    n = len(ordered)
    if n == 0:
        raise NotBounded("A lattice needs at least one element")
    if n > table_threshold:
        raise TooLarge(f"{n} elements exceed the table threshold {table_threshold}")
    order = np.argsort(ordered, kind="stable")
    sorted_codes = ordered[order]

    def lookup(values: np.ndarray, what: str) -> np.ndarray:
        pos = np.clip(np.searchsorted(sorted_codes, values), 0, n - 1)
        if not (sorted_codes[pos] == values).all():
            raise NotALattice(f"Set family is not closed under {what}")
        return order[pos]

    join_table = lookup(ordered[:, None] | ordered[None, :], "union")
    meet_table = lookup(ordered[:, None] & ordered[None, :], "intersection")
    L = TabledLattice(_inclusion(ordered), join_table, meet_table)
    L.codes = ordered.tolist()
    return L


def build_from_meet_closed(codes: Iterable[int], table_threshold: int = DEFAULT_TABLE_THRESHOLD) -> TabledLattice:
    """
    Lattice of a family of sets closed under intersection and containing a
    largest set; joins are resolved from the inclusion order.
    """
    ordered = np.array(_by_rank(codes), dtype=np.int64)
    L = build_from_leq(_inclusion(ordered), table_threshold)
    L.codes = ordered.tolist()
    return L


def build_from_covers(
    n: int,
    cover_pairs: Iterable[Sequence[int]],
    table_threshold: int = DEFAULT_TABLE_THRESHOLD,
) -> TabledLattice:
    """
    Build a lattice from (lower, upper) pairs.

    The pairs may include transitive edges; the covering relation is
    recomputed from the order they generate.

    Raises:
        NotALattice: an index is out of range or some pair lacks a join or meet.
        NotBounded: no unique bottom or top.
        CycleDetected: the pairs contain a cycle.
        TooLarge: n exceeds ``table_threshold``.
    """
    if n < 1:
        raise NotBounded("A lattice needs at least one element")
    if n > table_threshold:
        raise TooLarge(f"{n} elements exceed the table threshold {table_threshold}")
    lower: List[List[int]] = [[] for _ in range(n)]
    for pair in cover_pairs:
        lo, hi = (int(x) for x in pair)
        if not (0 <= lo < n and 0 <= hi < n):
            raise NotALattice(f"Cover pair ({lo}, {hi}) is out of range for n={n}")
        if lo == hi:
            raise CycleDetected(f"Element {lo} covers itself")
        lower[hi].append(lo)

    # below[b] marks every element <= b
    below = np.zeros((n, n), dtype=bool)
    for b in _topo_sort(n, lower):
        below[b, b] = True
        for a in lower[b]:
            below[b] |= below[a]
    return build_from_leq(below.T, table_threshold)
