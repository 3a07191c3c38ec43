"""
Meets of join-endomorphisms and the greatest join-endomorphism below a map.

The distributive algorithms ``dmeet`` and ``dmeet_plus`` combine two
join-endomorphisms directly. The general algorithms repair an arbitrary map
by lowering values until every pair preserves joins. Every join and meet an
algorithm evaluates goes through the counters it is handed; order tests and
subtraction are free.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .endo import (
    Endo,
    MapLike,
    _values,
    candidate_space,
    find_join_conflict,
    monotone_ji_extensions,
    pointwise_meet,
    require_distributive,
)
from .errors import InstanceTooLarge, LatticeError, MissingTwoCovers, NotDistributive
from .lattice import Lattice, OpCounters

log = logging.getLogger(__name__)

DEFAULT_ENUM_BUDGET = 10_000_000


@dataclass
class MeetResult:
    result: Endo
    counters: OpCounters = field(default_factory=OpCounters)
    iterations: int = 0


def subtract(L: Lattice, c: int, a: int) -> int:
    """Least e with a v e >= c. Defined on distributive lattices only."""
    require_distributive(L)
    return L.subtract(c, a)


def dmeet(L: Lattice, f: MapLike, g: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """
    h(c) = meet over a <= c of f(a) v g(c - a).

    Each term costs one join and folding it into the running meet (seeded
    with top) costs one meet.
    """
    require_distributive(L)
    counters = counters if counters is not None else OpCounters()
    fv, gv = _values(f), _values(g)
    values = []
    for c in range(L.n):
        acc = L.top
        for a in L.down(c):
            term = L.join(fv[a], gv[L.subtract(c, a)], counters)
            acc = L.meet(acc, term, counters)
        values.append(acc)
    return MeetResult(Endo(L, values, validated=True), counters, 1)


def dmeet_plus(L: Lattice, f: MapLike, g: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """
    Bottom-up meet: f(a) ^ g(a) on join-irreducibles, the join of the
    values at the first two lower covers everywhere else.

    Costs exactly |J(L)| meets and n - |J(L)| - 1 joins.
    """
    require_distributive(L)
    counters = counters if counters is not None else OpCounters()
    fv, gv = _values(f), _values(g)
    ji = L.ji_set
    h = [L.bottom] * L.n
    for a in L.topo:
        if a == L.bottom:
            continue
        if a in ji:
            h[a] = L.meet(fv[a], gv[a], counters)
            continue
        covers = L.lower_covers(a)
        if len(covers) < 2:
            raise MissingTwoCovers(f"Element {a} has {len(covers)} lower cover(s)")
        b, c = covers[0], covers[1]
        h[a] = L.join(h[b], h[c], counters)
    return MeetResult(Endo(L, h, validated=True), counters, 1)


def _clamped(L: Lattice, h0: MapLike) -> List[int]:
    h = list(_values(h0))
    h[L.bottom] = L.bottom
    return h


def _fix_conflict(L: Lattice, h: List[int], a: int, b: int, ab: int, c: int, counters: OpCounters) -> None:
    hab = h[ab]
    if L.le(c, hab):
        h[ab] = c
    else:
        h[a] = L.meet(h[a], hab, counters)
        h[b] = L.meet(h[b], hab, counters)


def gmeet(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """
    Greatest join-endomorphism below ``h0``.

    While some pair (a, b) has h(a v b) != h(a) v h(b): lower h(a v b) to
    h(a) v h(b) when it sits strictly above it, otherwise meet h(a) and
    h(b) with h(a v b). The scan restarts after every fix.
    """
    counters = counters if counters is not None else OpCounters()
    h = _clamped(L, h0)
    n = L.n
    iterations = 0
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                ab = L.join(a, b, counters)
                c = L.join(h[a], h[b], counters)
                if h[ab] != c:
                    _fix_conflict(L, h, a, b, ab, c, counters)
                    iterations += 1
                    changed = True
                    break
            if changed:
                break
    log.debug("gmeet fixed %d conflicts on n=%d", iterations, n)
    return MeetResult(Endo(L, h, validated=True), counters, iterations)


def gmeet_star(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """As :func:`gmeet`, but the scan resumes at the current pair after a fix."""
    counters = counters if counters is not None else OpCounters()
    h = _clamped(L, h0)
    pairs = [(a, b) for a in range(L.n) for b in range(a + 1, L.n)]
    iterations = 0
    pos = 0
    clean = 0
    while clean < len(pairs):
        a, b = pairs[pos]
        ab = L.join(a, b, counters)
        c = L.join(h[a], h[b], counters)
        if h[ab] != c:
            _fix_conflict(L, h, a, b, ab, c, counters)
            iterations += 1
            clean = 0
            continue
        clean += 1
        pos = (pos + 1) % len(pairs)
    return MeetResult(Endo(L, h, validated=True), counters, iterations)


def mono_below(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> List[int]:
    """Greatest monotone map below ``h0``: push values down the covers top-down."""
    h = list(_values(h0))
    for b in reversed(L.topo):
        hb = h[b]
        for a in L.lower_covers(b):
            h[a] = L.meet(h[a], hb, counters)
    return h


def _lower_below(L: Lattice, h: List[int], ab: int, c: int, counters: OpCounters) -> None:
    for x in L.down(ab):
        h[x] = L.meet(h[x], c, counters)


def gmeet_mono(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """
    Greatest join-endomorphism below ``h0`` keeping h monotone throughout.

    A conflict at (a, b) lowers every x <= a v b to at most h(a) v h(b).
    """
    counters = counters if counters is not None else OpCounters()
    h = mono_below(L, _clamped(L, h0), counters)
    n = L.n
    iterations = 0
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                ab = L.join(a, b, counters)
                c = L.join(h[a], h[b], counters)
                if h[ab] != c:
                    _lower_below(L, h, ab, c, counters)
                    iterations += 1
                    changed = True
                    break
            if changed:
                break
    log.debug("gmeet_mono fixed %d conflicts on n=%d", iterations, n)
    return MeetResult(Endo(L, h, validated=True), counters, iterations)


def gmeet_mono_star(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    counters = counters if counters is not None else OpCounters()
    h = mono_below(L, _clamped(L, h0), counters)
    pairs = [(a, b) for a in range(L.n) for b in range(a + 1, L.n)]
    iterations = 0
    pos = 0
    clean = 0
    while clean < len(pairs):
        a, b = pairs[pos]
        ab = L.join(a, b, counters)
        c = L.join(h[a], h[b], counters)
        if h[ab] != c:
            _lower_below(L, h, ab, c, counters)
            iterations += 1
            clean = 0
            continue
        clean += 1
        pos = (pos + 1) % len(pairs)
    return MeetResult(Endo(L, h, validated=True), counters, iterations)


def gmeet_mono_lazy(L: Lattice, h0: MapLike, counters: Optional[OpCounters] = None) -> MeetResult:
    """
    Start from the greatest monotone map below ``h0``. Sweep every pair
    lowering h(a v b) to h(a v b) ^ (h(a) v h(b)), then restore
    monotonicity; repeat until a full pass changes nothing.
    """
    counters = counters if counters is not None else OpCounters()
    h = mono_below(L, _clamped(L, h0), counters)
    n = L.n
    passes = 0
    while True:
        before = list(h)
        for a in range(n):
            for b in range(a + 1, n):
                ab = L.join(a, b, counters)
                h[ab] = L.meet(h[ab], L.join(h[a], h[b], counters), counters)
        h = mono_below(L, h, counters)
        passes += 1
        if h == before:
            break
    log.debug("gmeet_mono_lazy converged after %d passes on n=%d", passes, n)
    return MeetResult(Endo(L, h, validated=True), counters, passes)


def max_monotone_below_brute(L: Lattice, h0: MapLike) -> List[int]:
    """Greatest monotone map below ``h0``: h(x) = meet of h0 over the up-set of x."""
    v = _values(h0)
    return [L.meet_all(v[y] for y in L.up(x)) for x in range(L.n)]


def brute_force_max_endo_below(
    L: Lattice, h0: MapLike, budget: int = DEFAULT_ENUM_BUDGET
) -> Endo:
    """
    Pointwise join of every join-endomorphism below ``h0``, by enumeration.

    Values on J(L) are bounded by the greatest monotone map below ``h0`` so
    every extension already stays under ``h0``.

    Raises:
        InstanceTooLarge: the assignment space exceeds ``budget``.
    """
    bound = max_monotone_below_brute(L, h0)
    space = candidate_space(L, bound)
    if space > budget:
        raise InstanceTooLarge(f"{space} candidate assignments exceed the budget of {budget}")
    acc = [L.bottom] * L.n
    survivors = 0
    for values in monotone_ji_extensions(L, bound):
        if find_join_conflict(L, values) is None:
            acc = [L._join(x, y) for x, y in zip(acc, values)]
            survivors += 1
    log.debug("Brute force kept %d of at most %d candidates", survivors, space)
    return Endo(L, acc, validated=True)


PairAlgorithm = Callable[..., MeetResult]

DISTRIBUTIVE_ONLY: Dict[str, PairAlgorithm] = {
    "dmeet": dmeet,
    "dmeet+": dmeet_plus,
}

GENERAL: Dict[str, PairAlgorithm] = {
    "gmeet": gmeet,
    "gmeet*": gmeet_star,
    "gmeet_mono": gmeet_mono,
    "gmeet_mono*": gmeet_mono_star,
    "gmeet_mono_lazy": gmeet_mono_lazy,
}

BRUTE = "brute"

ALGORITHMS: List[str] = [*DISTRIBUTIVE_ONLY, *GENERAL, BRUTE]


def max_endo_below(
    L: Lattice,
    h0: MapLike,
    name: str = "gmeet",
    counters: Optional[OpCounters] = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> MeetResult:
    """Greatest join-endomorphism below an arbitrary map with a general algorithm."""
    counters = counters if counters is not None else OpCounters()
    if name == BRUTE:
        return MeetResult(brute_force_max_endo_below(L, h0, budget), counters, 0)
    if name not in GENERAL:
        raise LatticeError(f"{name!r} does not accept arbitrary maps; choose from {sorted(GENERAL) + [BRUTE]}")
    return GENERAL[name](L, h0, counters)


def meet_endos(L: Lattice, f: MapLike, g: MapLike, name: str, budget: int = DEFAULT_ENUM_BUDGET) -> MeetResult:
    """
    Compute f ^ g in E(L) with the named algorithm.

    General algorithms start from the pointwise meet, whose n meets are
    counted.
    """
    if name not in ALGORITHMS:
        raise LatticeError(f"Unknown algorithm {name!r}; choose from {ALGORITHMS}")
    if name in DISTRIBUTIVE_ONLY:
        if not L.is_distributive:
            raise NotDistributive(f"{name} requires a distributive lattice")
        return DISTRIBUTIVE_ONLY[name](L, f, g)
    counters = OpCounters()
    h0 = pointwise_meet(L, f, g, counters)
    return max_endo_below(L, h0, name, counters, budget)
