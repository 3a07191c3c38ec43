"""
Tests for the meet algorithms and the greatest join-endomorphism below a map.
"""

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from lattice_dk.endo import Endo, below, candidate_space, is_join_endo, iter_join_endos, random_endo
from lattice_dk.errors import InstanceTooLarge, LatticeError, MissingTwoCovers, NotDistributive
from lattice_dk.generators import (
    chain_lattice,
    grid_lattice,
    mn_lattice,
    powerset_lattice,
    random_arbitrary,
    random_distributive,
)
from lattice_dk.lattice import OpCounters, build_from_covers
from lattice_dk.meet import (
    ALGORITHMS,
    BRUTE,
    DISTRIBUTIVE_ONLY,
    GENERAL,
    brute_force_max_endo_below,
    dmeet,
    dmeet_plus,
    gmeet,
    gmeet_mono_lazy,
    max_endo_below,
    max_monotone_below_brute,
    meet_endos,
    mono_below,
    subtract,
)

PENTAGON = [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]

# M_2 with atoms 1, 2: f swaps the atoms, g lifts 1 to top
M2_F = [0, 2, 1, 3]
M2_G = [0, 3, 2, 3]
M2_MEET = [0, 2, 0, 2]

# M_3 with atoms 1, 2, 3: f swaps 2 and 3, g lifts 1 to top
M3_F = [0, 1, 3, 2, 4]
M3_G = [0, 4, 2, 3, 4]


def test_algorithm_names():
    """Test the public algorithm registry."""
    assert ALGORITHMS == ["dmeet", "dmeet+", "gmeet", "gmeet*", "gmeet_mono", "gmeet_mono*", "gmeet_mono_lazy", "brute"]
    assert set(DISTRIBUTIVE_ONLY) == {"dmeet", "dmeet+"}
    assert BRUTE not in GENERAL


@pytest.mark.parametrize("name", ["dmeet", "dmeet+", "gmeet", "gmeet*", "gmeet_mono", "gmeet_mono*", "gmeet_mono_lazy", "brute"])
def test_every_algorithm_on_m2(name):
    """Test the M_2 meet where the pointwise meet fails."""
    L = mn_lattice(2)
    result = meet_endos(L, Endo(L, M2_F), Endo(L, M2_G), name)
    assert result.result == M2_MEET


@pytest.mark.parametrize("name", ["gmeet", "gmeet*", "gmeet_mono", "gmeet_mono*", "gmeet_mono_lazy", "brute"])
def test_general_algorithms_on_m3(name):
    """Test the M_3 meet, which collapses to the constant bottom map."""
    L = mn_lattice(3)
    result = meet_endos(L, Endo(L, M3_F), Endo(L, M3_G), name)
    assert result.result == [0, 0, 0, 0, 0]


def test_m3_pointwise_meet_has_no_extension():
    """Test that no join-endomorphism of M_3 agrees with the pointwise meet on atoms."""
    L = mn_lattice(3)
    pm = [L.meet(a, b) for a, b in zip(M3_F, M3_G)]
    assert pm == [0, 1, 0, 0, 4]
    assert not any(all(f[j] == pm[j] for j in L.ji) for f in iter_join_endos(L))


def test_distributive_only_algorithms_refuse_m3():
    """Test the distributivity guard."""
    L = mn_lattice(3)
    f, g = Endo(L, M3_F), Endo(L, M3_G)
    for name in DISTRIBUTIVE_ONLY:
        with pytest.raises(NotDistributive):
            meet_endos(L, f, g, name)
    with pytest.raises(NotDistributive):
        dmeet(L, f, g)
    with pytest.raises(NotDistributive):
        subtract(L, 4, 1)


def test_unknown_algorithm():
    """Test that unknown names are refused."""
    L = chain_lattice(3)
    with pytest.raises(LatticeError):
        meet_endos(L, [0, 1, 2], [0, 1, 2], "fastest")
    with pytest.raises(LatticeError):
        max_endo_below(L, [0, 1, 2], "dmeet")


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_powerset_operation_counts(k):
    """Test the exact join and meet counts of dmeet and dmeet+ on powersets."""
    L = powerset_lattice(k)
    rng = np.random.default_rng(k)
    f, g = random_endo(L, rng), random_endo(L, rng)
    d = dmeet(L, f, g)
    assert (d.counters.joins, d.counters.meets) == (3**k, 3**k)
    p = dmeet_plus(L, f, g)
    assert (p.counters.joins, p.counters.meets) == (2**k - k - 1, k)
    assert d.result == p.result


def test_dmeet_counts_on_chains():
    """Test that dmeet spends |down(c)| joins per element of a chain."""
    L = chain_lattice(6)
    f = Endo(L, [0, 1, 2, 3, 4, 5])
    g = Endo(L, [0, 0, 1, 1, 2, 5])
    d = dmeet(L, f, g)
    assert d.counters.joins == d.counters.meets == 21


def test_dmeet_plus_needs_two_covers():
    """Test that an element with a single cover that is not join-irreducible is reported."""
    L = chain_lattice(3)
    # hide 2 from J(L) so it looks like a join of fewer than two covers
    L.__dict__["ji"] = [1]
    L.__dict__["ji_set"] = frozenset([1])
    with pytest.raises(MissingTwoCovers):
        dmeet_plus(L, [0, 1, 2], [0, 1, 2])


def test_counters_are_shared_when_given():
    """Test that a caller-supplied counter accumulates across runs."""
    L = mn_lattice(2)
    c = OpCounters()
    dmeet_plus(L, M2_F, M2_G, c)
    dmeet_plus(L, M2_F, M2_G, c)
    assert (c.joins, c.meets) == (2, 4)


def test_general_algorithms_count_pointwise_meet():
    """Test that meet_endos counts the n meets of the starting map."""
    L = chain_lattice(4)
    f = Endo(L, [0, 1, 2, 3])
    result = meet_endos(L, f, f, "gmeet")
    assert result.result == f
    # n pointwise meets, then one scan of the 6 pairs with two joins each
    assert result.counters.meets == 4
    assert result.counters.joins == 12


def test_mono_below():
    """Test the greatest monotone map below a map."""
    L = chain_lattice(3)
    assert mono_below(L, [2, 0, 1]) == [0, 0, 1]
    assert max_monotone_below_brute(L, [2, 0, 1]) == [0, 0, 1]
    for name in GENERAL:
        assert max_endo_below(L, [2, 0, 1], name).result == [0, 0, 1]


def test_general_algorithms_clamp_bottom():
    """Test that a map moving bottom yields a bottom-preserving result."""
    L = mn_lattice(2)
    for name in list(GENERAL) + [BRUTE]:
        h = max_endo_below(L, [3, 3, 3, 3], name).result
        assert h == [0, 3, 3, 3]


def test_brute_force_budget():
    """Test that the brute-force oracle refuses oversized searches."""
    L = powerset_lattice(3)
    with pytest.raises(InstanceTooLarge):
        brute_force_max_endo_below(L, list(range(8)), budget=1)
    assert brute_force_max_endo_below(L, list(range(8)), budget=8) == list(range(8))


def _small_lattice(kind, size, seed):
    if kind == "chain":
        return chain_lattice(size)
    if kind == "mn":
        return mn_lattice(size)
    if kind == "pentagon":
        return build_from_covers(5, PENTAGON)
    if kind == "powerset":
        return powerset_lattice(min(size, 3))
    if kind == "grid":
        return grid_lattice(2, min(size, 3))
    return random_arbitrary(min(size + 3, 7), np.random.default_rng(seed))


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    kind=st.sampled_from(["chain", "mn", "pentagon", "powerset", "grid", "arb"]),
    size=st.integers(min_value=1, max_value=5),
    seed=st.integers(min_value=0, max_value=2**16),
    data=st.data(),
)
def test_general_algorithms_match_brute_force(kind, size, seed, data):
    """Test that every general algorithm finds the greatest join-endomorphism below a map."""
    L = _small_lattice(kind, size, seed)
    h0 = data.draw(st.lists(st.integers(min_value=0, max_value=L.n - 1), min_size=L.n, max_size=L.n))
    assume(candidate_space(L, max_monotone_below_brute(L, h0)) <= 20_000)
    expected = brute_force_max_endo_below(L, h0)
    assert is_join_endo(L, expected)
    clamped = list(h0)
    clamped[L.bottom] = L.bottom
    assert below(L, expected, clamped)
    for name in GENERAL:
        result = max_endo_below(L, h0, name)
        assert result.result == expected, name


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), k=st.integers(min_value=2, max_value=6))
def test_meet_recursion_on_random_distributive_lattices(seed, k):
    """Test that the meet is f ^ g on join-irreducibles and the cover join elsewhere."""
    rng = np.random.default_rng(seed)
    L = random_distributive(k, rng)
    f, g = random_endo(L, rng), random_endo(L, rng)
    h = dmeet_plus(L, f, g).result
    for a in range(L.n):
        if a == L.bottom:
            assert h[a] == L.bottom
        elif a in L.ji_set:
            assert h[a] == L.meet(f[a], g[a])
        else:
            b, c = L.lower_covers(a)[:2]
            assert h[a] == L.join(h[b], h[c])
    assert dmeet(L, f, g).result == h
    if L.n <= 16:
        assert gmeet(L, [L.meet(x, y) for x, y in zip(f, g)]).result == h


def test_lazy_variant_starts_from_the_monotone_bound():
    """Test counts and passes of the lazy variant on a 3-chain."""
    L = chain_lattice(3)
    result = gmeet_mono_lazy(L, [0, 2, 1])
    assert result.result == [0, 1, 1]
    # two meets to make the map monotone, one pass of three pairs, two meets to recheck
    assert result.iterations == 1
    assert result.counters.joins == 6
    assert result.counters.meets == 7


@pytest.mark.parametrize("L", [chain_lattice(4), chain_lattice(5), mn_lattice(3), powerset_lattice(2), build_from_covers(5, PENTAGON)])
def test_mono_below_matches_up_set_meet_on_every_map(L):
    """Test the top-down sweep against the meet over up-sets for all maps of a small lattice."""
    for h0 in itertools.product(range(L.n), repeat=L.n):
        h = mono_below(L, h0)
        assert h == max_monotone_below_brute(L, h0), h0


@pytest.mark.parametrize("L", [chain_lattice(4), mn_lattice(2), mn_lattice(3), powerset_lattice(2), build_from_covers(5, PENTAGON)])
def test_variants_agree_with_gmeet_on_every_pair_of_endos(L):
    """Test that every general variant computes the same meet for all f, g in E(L)."""
    endos = list(iter_join_endos(L))
    for f, g in itertools.product(endos, repeat=2):
        expected = meet_endos(L, f, g, "gmeet").result
        for name in ("gmeet*", "gmeet_mono", "gmeet_mono*", "gmeet_mono_lazy"):
            assert meet_endos(L, f, g, name).result == expected, (name, f.map, g.map)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), k=st.integers(min_value=1, max_value=5))
def test_meet_semilattice_laws(seed, k):
    """Test commutativity, associativity, idempotence and the lower-bound property."""
    rng = np.random.default_rng(seed)
    L = random_distributive(k, rng)
    f, g, e = random_endo(L, rng), random_endo(L, rng), random_endo(L, rng)
    fg = dmeet_plus(L, f, g).result
    assert fg == dmeet_plus(L, g, f).result
    assert dmeet_plus(L, fg, e).result == dmeet_plus(L, f, dmeet_plus(L, g, e).result).result
    assert dmeet_plus(L, f, f).result == f
    assert below(L, fg, f) and below(L, fg, g)
