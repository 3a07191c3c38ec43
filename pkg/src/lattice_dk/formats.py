"""
Reading and writing the lattice-dk file formats.

* Lattice JSON: ``{"n": int, "covers": [[lower, upper], ...]}`` or the
  shorthands ``{"powerset": k}``, ``{"mn": n}`` and ``{"chain": n}``.
* Endo JSON: a plain array, position a holding the image of a.
* Relation JSON: ``{"n": int, "edges": [[a, b], ...]}``.
* Partition JSON: an array of arrays of state indices.
* Operator binary: ``b"KOPARRAY"``, a little-endian uint32 n, then 2^n
  little-endian records of ceil(n / 8) bytes each.
"""

import json
import struct
from typing import Any, List, Union

import numpy as np

from .endo import Endo
from .errors import LatticeError, ParseError
from .generators import chain_lattice, mn_lattice, powerset_lattice
from .knowledge import MAX_CODE_BITS, KOpArray, as_relation, relation_edges, relation_from_edges
from .lattice import DEFAULT_TABLE_THRESHOLD, BitsetLattice, Lattice, build_from_covers
from .partitions import Partition

KOP_MAGIC = b"KOPARRAY"
_HEADER = struct.Struct("<8sI")


def _read_json(path: str) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ParseError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from e


def _write_json(data: Any, path: str) -> None:
    with open(path, "w") as f:
        json.dump(data, f)
        f.write("\n")


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}")
    return value


# Lattices


def lattice_from_json(data: Any, table_threshold: int = DEFAULT_TABLE_THRESHOLD) -> Lattice:
    if not isinstance(data, dict):
        raise ParseError("Lattice JSON must be an object")
    if "powerset" in data:
        return powerset_lattice(_int(data["powerset"], "powerset"))
    if "mn" in data:
        return mn_lattice(_int(data["mn"], "mn"))
    if "chain" in data:
        return chain_lattice(_int(data["chain"], "chain"))
    try:
        n = _int(data["n"], "n")
        covers = [(_int(p[0], "cover"), _int(p[1], "cover")) for p in data["covers"]]
    except (KeyError, IndexError, TypeError) as e:
        raise ParseError(f"Lattice JSON needs 'n' and a list of [lower, upper] 'covers': {e}") from e
    return build_from_covers(n, covers, table_threshold)


def lattice_to_json(L: Lattice) -> dict:
    if isinstance(L, BitsetLattice) and not L.dual:
        return {"powerset": L.k}
    return {"n": L.n, "covers": [[a, b] for a, b in L.cover_pairs()]}


def load_lattice(path: str, table_threshold: int = DEFAULT_TABLE_THRESHOLD) -> Lattice:
    return lattice_from_json(_read_json(path), table_threshold)


def dump_lattice(L: Lattice, path: str) -> None:
    _write_json(lattice_to_json(L), path)


# Maps


def endo_from_json(data: Any, L: Lattice) -> Endo:
    if not isinstance(data, list):
        raise ParseError("Map JSON must be an array of element indices")
    values = [_int(v, "map entry") for v in data]
    try:
        return Endo(L, values)
    except LatticeError as e:
        raise ParseError(str(e)) from e


def load_endo(path: str, L: Lattice) -> Endo:
    return endo_from_json(_read_json(path), L)


def dump_endo(f: Union[Endo, List[int]], path: str) -> None:
    _write_json(list(f), path)


# Relations and partitions


def relation_from_json(data: Any) -> np.ndarray:
    try:
        n = _int(data["n"], "n")
        edges = [(_int(e[0], "edge"), _int(e[1], "edge")) for e in data["edges"]]
    except (KeyError, IndexError, TypeError) as e:
        raise ParseError(f"Relation JSON needs 'n' and a list of [a, b] 'edges': {e}") from e
    if n < 0:
        raise ParseError(f"Relation size must be non-negative, got {n}")
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"Edge ({a}, {b}) is out of range for n={n}")
    return relation_from_edges(n, edges)


def relation_to_json(R: np.ndarray) -> dict:
    M = as_relation(R)
    return {"n": int(M.shape[0]), "edges": relation_edges(M)}


def load_relation(path: str) -> np.ndarray:
    return relation_from_json(_read_json(path))


def dump_relation(R: np.ndarray, path: str) -> None:
    _write_json(relation_to_json(R), path)


def partition_from_json(data: Any) -> Partition:
    if not isinstance(data, list) or not all(isinstance(b, list) for b in data):
        raise ParseError("Partition JSON must be an array of arrays")
    return Partition.from_blocks([[_int(x, "state") for x in b] for b in data])


def load_partition(path: str) -> Partition:
    return partition_from_json(_read_json(path))


def dump_partition(P: Partition, path: str) -> None:
    _write_json(P.to_lists(), path)


# Knowledge operator arrays


def kop_to_bytes(K: KOpArray) -> bytes:
    width = (K.n + 7) // 8
    records = K.vk.astype("<u4").view(np.uint8).reshape(-1, 4)[:, :width]
    return _HEADER.pack(KOP_MAGIC, K.n) + records.tobytes()


def kop_from_bytes(data: bytes) -> KOpArray:
    if len(data) < _HEADER.size:
        raise ParseError("Operator file is shorter than its header")
    magic, n = _HEADER.unpack_from(data)
    if magic != KOP_MAGIC:
        raise ParseError(f"Bad operator file header {magic!r}")
    if n > MAX_CODE_BITS:
        raise ParseError(f"Operator over {n} states cannot be stored in 32-bit codes")
    width = (n + 7) // 8
    body = data[_HEADER.size:]
    if len(body) != width * (1 << n):
        raise ParseError(f"Expected {width * (1 << n)} bytes of records, found {len(body)}")
    records = np.zeros((1 << n, 4), dtype=np.uint8)
    if width:
        records[:, :width] = np.frombuffer(body, dtype=np.uint8).reshape(-1, width)
    vk = records.view("<u4").reshape(-1)
    if n < MAX_CODE_BITS and (vk >> n).any():
        raise ParseError(f"Operator file holds codes outside {n} states")
    return KOpArray(n, vk.astype(np.uint32))


def load_kop(path: str) -> KOpArray:
    try:
        with open(path, "rb") as f:
            return kop_from_bytes(f.read())
    except FileNotFoundError as e:
        raise ParseError(f"File not found: {path}") from e


def dump_kop(K: KOpArray, path: str) -> None:
    with open(path, "wb") as f:
        f.write(kop_to_bytes(K))
