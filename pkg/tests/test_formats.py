"""
Tests for reading and writing lattices, maps, relations, partitions and
operator files.
"""

import json
import os
import tempfile

import numpy as np
import pytest

from lattice_dk.errors import NotBounded, ParseError
from lattice_dk.formats import (
    KOP_MAGIC,
    dump_endo,
    dump_kop,
    dump_lattice,
    dump_partition,
    dump_relation,
    endo_from_json,
    kop_from_bytes,
    kop_to_bytes,
    lattice_from_json,
    lattice_to_json,
    load_endo,
    load_kop,
    load_lattice,
    load_partition,
    load_relation,
    partition_from_json,
    relation_from_json,
)
from lattice_dk.generators import mn_lattice
from lattice_dk.knowledge import build_kop_array, relation_from_edges
from lattice_dk.lattice import BitsetLattice
from lattice_dk.partitions import Partition


@pytest.fixture
def workdir():
    with tempfile.TemporaryDirectory() as d:
        yield d


def test_lattice_shorthands():
    """Test the powerset, M_n and chain shorthands."""
    assert isinstance(lattice_from_json({"powerset": 3}), BitsetLattice)
    assert lattice_from_json({"powerset": 3}).n == 8
    assert lattice_from_json({"mn": 3}).n == 5
    assert lattice_from_json({"chain": 4}).ji == [1, 2, 3]


def test_lattice_from_covers():
    """Test explicit cover lists."""
    L = lattice_from_json({"n": 4, "covers": [[0, 1], [0, 2], [1, 3], [2, 3]]})
    assert L.join(1, 2) == 3
    with pytest.raises(NotBounded):
        lattice_from_json({"n": 3, "covers": [[0, 1], [0, 2]]})


@pytest.mark.parametrize(
    "data",
    [
        [1, 2],
        {"n": 3},
        {"covers": [[0, 1]]},
        {"n": "3", "covers": []},
        {"n": 2, "covers": [[0]]},
        {"powerset": 2.5},
        {"mn": True},
    ],
)
def test_lattice_parse_errors(data):
    """Test malformed lattice JSON."""
    with pytest.raises(ParseError):
        lattice_from_json(data)


def test_lattice_files(workdir):
    """Test writing and reading lattices."""
    path = os.path.join(workdir, "m3.json")
    dump_lattice(mn_lattice(3), path)
    with open(path) as f:
        data = json.load(f)
    assert data["n"] == 5 and len(data["covers"]) == 6
    assert load_lattice(path).lower_covers(4) == [1, 2, 3]
    assert lattice_to_json(BitsetLattice(4)) == {"powerset": 4}

    bad = os.path.join(workdir, "bad.json")
    with open(bad, "w") as f:
        f.write("{not json")
    with pytest.raises(ParseError):
        load_lattice(bad)
    with pytest.raises(ParseError):
        load_lattice(os.path.join(workdir, "missing.json"))


def test_endo_files(workdir):
    """Test maps as JSON arrays."""
    L = mn_lattice(2)
    path = os.path.join(workdir, "f.json")
    dump_endo([0, 2, 1, 3], path)
    assert load_endo(path, L) == [0, 2, 1, 3]
    with pytest.raises(ParseError):
        endo_from_json({"map": [0]}, L)
    with pytest.raises(ParseError):
        endo_from_json([0, 1, 2], L)
    with pytest.raises(ParseError):
        endo_from_json([0, 1, 2, 9], L)
    with pytest.raises(ParseError):
        endo_from_json([0, 1, "2", 3], L)


def test_relation_files(workdir):
    """Test relations as edge lists."""
    R = relation_from_edges(3, [(0, 1), (2, 2)])
    path = os.path.join(workdir, "r.json")
    dump_relation(R, path)
    with open(path) as f:
        assert json.load(f) == {"n": 3, "edges": [[0, 1], [2, 2]]}
    assert np.array_equal(load_relation(path), R)
    with pytest.raises(ParseError):
        relation_from_json({"n": 2, "edges": [[0, 2]]})
    with pytest.raises(ParseError):
        relation_from_json([[0, 1]])
    with pytest.raises(ParseError):
        relation_from_json({"n": -1, "edges": []})
    assert relation_from_json({"n": 0, "edges": []}).shape == (0, 0)


def test_partition_files(workdir):
    """Test partitions as arrays of blocks."""
    P = Partition.from_blocks([[0, 3], [1], [2]])
    path = os.path.join(workdir, "p.json")
    dump_partition(P, path)
    assert load_partition(path) == P
    with pytest.raises(ParseError):
        partition_from_json([0, 1])
    with pytest.raises(ParseError):
        partition_from_json({"blocks": []})


def test_kop_bytes_layout():
    """Test the header and record width of operator files."""
    K = build_kop_array(np.eye(3, dtype=bool))
    data = kop_to_bytes(K)
    assert data[:8] == KOP_MAGIC
    assert int.from_bytes(data[8:12], "little") == 3
    # one byte per event for up to 8 states
    assert data[12:] == bytes(range(8))
    assert kop_from_bytes(data) == K


def test_kop_wide_records(workdir):
    """Test two-byte records and the file helpers."""
    rng = np.random.default_rng(0)
    K = build_kop_array(rng.random((10, 10)) < 0.3)
    path = os.path.join(workdir, "k.kop")
    dump_kop(K, path)
    assert os.path.getsize(path) == 12 + 2 * 1024
    assert load_kop(path) == K
    with pytest.raises(ParseError):
        load_kop(os.path.join(workdir, "missing.kop"))


def test_kop_bad_files():
    """Test header, length and range checks."""
    good = kop_to_bytes(build_kop_array(np.eye(2, dtype=bool)))
    with pytest.raises(ParseError):
        kop_from_bytes(b"KOP")
    with pytest.raises(ParseError):
        kop_from_bytes(b"NOTAKOP!" + good[8:])
    with pytest.raises(ParseError):
        kop_from_bytes(good[:-1])
    with pytest.raises(ParseError):
        kop_from_bytes(good[:-1] + b"\xff")
