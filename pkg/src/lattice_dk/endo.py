"""
Self-maps and join-endomorphisms of a finite lattice.

An :class:`Endo` is any total map on the elements of a lattice. Whether it
preserves joins is checked on demand and memoized, so arbitrary maps can
flow through the meet algorithms before they are repaired.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import LatticeError, NotDistributive, NotJoinIrreducible, SizeMismatch
from .lattice import Lattice, OpCounters

log = logging.getLogger(__name__)


class Endo:
    """A self-map of ``lattice`` stored as an index array."""

    def __init__(self, lattice: Lattice, values: Iterable[int], validated: Optional[bool] = None):
        self.lattice = lattice
        self.map: Tuple[int, ...] = tuple(int(v) for v in values)
        if len(self.map) != lattice.n:
            raise SizeMismatch(f"Map has {len(self.map)} entries, lattice has {lattice.n}")
        if self.map and (min(self.map) < 0 or max(self.map) >= lattice.n):
            raise LatticeError(f"Map images must lie in 0..{lattice.n - 1}")
        self._valid = validated

    @property
    def validated(self) -> bool:
        """True iff the map is a join-endomorphism; computed once."""
        if self._valid is None:
            self._valid = is_join_endo(self.lattice, self.map)
        return self._valid

    def __getitem__(self, a: int) -> int:
        return self.map[a]

    def __len__(self) -> int:
        return len(self.map)

    def __iter__(self) -> Iterator[int]:
        return iter(self.map)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Endo):
            return self.map == other.map
        if isinstance(other, (list, tuple)):
            return self.map == tuple(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.map)

    def __repr__(self) -> str:
        return f"Endo({list(self.map)})"

    def to_list(self) -> List[int]:
        return list(self.map)


MapLike = Union[Endo, Sequence[int]]


def _values(h: MapLike) -> Sequence[int]:
    return h.map if isinstance(h, Endo) else h


@dataclass(frozen=True)
class JIRelation:
    """Pairs (a, b) of join-irreducible elements."""

    pairs: FrozenSet[Tuple[int, int]]

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self.pairs))


def require_distributive(L: Lattice) -> None:
    if not L.is_distributive:
        raise NotDistributive(f"{L!r} is not distributive (witness {L.distributivity_witness()})")


def find_join_conflict(L: Lattice, h: MapLike) -> Optional[Tuple[int, int]]:
    """
    First pair violating join preservation, scanning row-major with a < b.

    Returns ``(bottom, bottom)`` when h does not fix bottom and None when h
    is a join-endomorphism.
    """
    v = _values(h)
    if v[L.bottom] != L.bottom:
        return L.bottom, L.bottom
    jn = L._join
    for a in range(L.n):
        ha = v[a]
        for b in range(a + 1, L.n):
            if v[jn(a, b)] != jn(ha, v[b]):
                return a, b
    return None


def is_join_endo(L: Lattice, h: MapLike) -> bool:
    return find_join_conflict(L, h) is None


def is_monotone(L: Lattice, h: MapLike) -> bool:
    v = _values(h)
    return all(L.le(v[a], v[b]) for a in range(L.n) for b in L.upper_covers(a))


def below(L: Lattice, f: MapLike, g: MapLike) -> bool:
    """Pointwise order: f(x) <= g(x) for every x."""
    return all(L.le(x, y) for x, y in zip(_values(f), _values(g)))


def pointwise_meet(L: Lattice, f: MapLike, g: MapLike, counters: Optional[OpCounters] = None) -> Endo:
    """The pointwise meet; in general not a join-endomorphism."""
    fv, gv = _values(f), _values(g)
    if len(fv) != len(gv):
        raise SizeMismatch("Maps are over different lattices")
    return Endo(L, (L.meet(x, y, counters) for x, y in zip(fv, gv)))


def pointwise_join(L: Lattice, f: MapLike, g: MapLike, counters: Optional[OpCounters] = None) -> Endo:
    fv, gv = _values(f), _values(g)
    if len(fv) != len(gv):
        raise SizeMismatch("Maps are over different lattices")
    valid = None
    if isinstance(f, Endo) and isinstance(g, Endo) and f._valid and g._valid:
        valid = True
    return Endo(L, (L.join(x, y, counters) for x, y in zip(fv, gv)), validated=valid)


def constant_bottom(L: Lattice) -> Endo:
    return Endo(L, [L.bottom] * L.n, validated=True)


def identity(L: Lattice) -> Endo:
    return Endo(L, range(L.n), validated=True)


def f_ab(L: Lattice, a: int, b: int) -> Endo:
    """The map sending the up-set of ``a`` to ``b`` and everything else to bottom."""
    if a not in L.ji_set:
        raise NotJoinIrreducible(f"Element {a} is not join-irreducible")
    values = [L.bottom] * L.n
    for x in L.up(a):
        values[x] = b
    # a is join-prime only when L is distributive
    return Endo(L, values, validated=True if L.is_distributive else None)


def f_outside(L: Lattice, c: int, b: int) -> Endo:
    """The map sending the down-set of ``c`` to bottom and everything else to ``b``."""
    down = set(L.down(c))
    return Endo(L, [L.bottom if x in down else b for x in range(L.n)], validated=True)


def to_ji_relation(L: Lattice, f: MapLike) -> JIRelation:
    """{(a, b) in J(L)^2 | a <= f(b)}."""
    require_distributive(L)
    v = _values(f)
    return JIRelation(frozenset((a, b) for a in L.ji for b in L.ji if L.le(a, v[b])))


def from_ji_relation(L: Lattice, R: JIRelation) -> Endo:
    """F_R(c) = join of every a with (a, b) in R and b <= c."""
    require_distributive(L)
    values = [L.join_all(a for a, b in R.pairs if L.le(b, c)) for c in range(L.n)]
    return Endo(L, values, validated=True)


def ji_endos(L: Lattice) -> List[Endo]:
    """All f_ab with a, b join-irreducible, deduplicated by map."""
    require_distributive(L)
    seen = set()
    out = []
    for a in L.ji:
        for b in L.ji:
            f = f_ab(L, a, b)
            if f.map not in seen:
                seen.add(f.map)
                out.append(f)
    return out


def random_endo(L: Lattice, rng: np.random.Generator, k: Optional[int] = None) -> Endo:
    """
    Pointwise join of ``k`` maps f_ab with a uniform in J(L) and b uniform in L.

    ``k`` defaults to |J(L)|. On a non-distributive lattice the f_ab need not
    preserve joins, so the terms are the maps of :func:`f_outside` with c
    uniform below top instead.
    """
    ji = L.ji
    if k is None:
        k = len(ji)
    log.debug("random_endo: %d terms on n=%d, distributive=%s", k, L.n, L.is_distributive)
    values = [L.bottom] * L.n
    if not ji:
        return Endo(L, values, validated=True)
    if L.is_distributive:
        for _ in range(k):
            a = ji[int(rng.integers(len(ji)))]
            b = int(rng.integers(L.n))
            for x in L.up(a):
                values[x] = L._join(values[x], b)
    else:
        others = [x for x in range(L.n) if x != L.top]
        for _ in range(k):
            c = others[int(rng.integers(len(others)))]
            b = int(rng.integers(L.n))
            below_c = set(L.down(c))
            for x in range(L.n):
                if x not in below_c:
                    values[x] = L._join(values[x], b)
    return Endo(L, values, validated=True)


def candidate_space(L: Lattice, bound: Sequence[int]) -> int:
    """Number of raw assignments on J(L) below ``bound``."""
    size = 1
    for j in L.ji:
        size *= len(L.down(bound[j]))
    return size


def monotone_ji_extensions(L: Lattice, bound: Sequence[int]) -> Iterator[List[int]]:
    """
    Yield every monotone assignment on J(L) with f(j) <= bound[j], extended
    to all of L by f(e) = join of f(j) over j <= e.

    Every join-endomorphism below ``bound`` appears, since each element is
    the join of the join-irreducibles beneath it.
    """
    ji = [j for j in L.topo if j in L.ji_set]
    below_j: Dict[int, List[int]] = {j: [i for i in ji if i != j and L.le(i, j)] for j in ji}
    choices = {j: L.down(bound[j]) for j in ji}
    spans = [L.ji_downset(e) for e in range(L.n)]
    f: Dict[int, int] = {}

    def backtrack(pos: int) -> Iterator[List[int]]:
        if pos == len(ji):
            yield [L.join_all(f[j] for j in spans[e]) for e in range(L.n)]
            return
        j = ji[pos]
        floor = L.join_all(f[i] for i in below_j[j])
        for v in choices[j]:
            if L.le(floor, v):
                f[j] = v
                yield from backtrack(pos + 1)
        f.pop(j, None)

    yield from backtrack(0)


def iter_join_endos(L: Lattice) -> Iterator[Endo]:
    """Exhaustive enumeration of E(L); meant for small lattices."""
    for values in monotone_ji_extensions(L, [L.top] * L.n):
        if find_join_conflict(L, values) is None:
            yield Endo(L, values, validated=True)


def ji_of_endo_lattice(L: Lattice, endos: Sequence[Endo]) -> List[Endo]:
    """
    Join-irreducible members of a family closed under pointwise join.

    f is join-irreducible iff it differs from the join of everything
    strictly below it.
    """
    out = []
    for f in endos:
        acc = [L.bottom] * L.n
        for g in endos:
            if g.map != f.map and below(L, g, f):
                acc = [L._join(x, y) for x, y in zip(acc, g.map)]
        if tuple(acc) != f.map:
            out.append(f)
    return out
