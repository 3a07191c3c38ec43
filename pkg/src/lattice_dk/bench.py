"""
Benchmark engine: times meet algorithms and distributed-knowledge checks
and records their operation counts as CSV rows.
"""

import csv
import logging
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .config import Config
from .endo import Endo, random_endo
from .errors import LatticeError
from .generators import GenConfig, lattice_of_kind, random_dk_instance
from .knowledge import (
    build_kop_array,
    decide_dk_operators,
    decide_dk_partitions,
    decide_dk_relations,
    dk_as_endo_meet,
    relation_from_partition,
)
from .lattice import Lattice
from .meet import ALGORITHMS, DISTRIBUTIVE_ONLY, MeetResult, meet_endos

log = logging.getLogger(__name__)

CSV_FIELDS = ["algorithm", "kind", "n", "trial", "joins", "meets", "nanos", "seed"]
DK_VARIANTS = ("cached_operator", "noncached_operator", "relation", "disjoint_set")
# opt-in, capped by knowledge.endo_meet_max_states
ENDO_MEET = "endo_meet"
SUMMARY = "summary"


@dataclass
class BenchRecord:
    """One CSV row; ``trial`` is an index or "summary"."""

    algorithm: str
    kind: str
    n: int
    trial: Union[int, str]
    joins: int
    meets: int
    nanos: int
    seed: int


def write_csv(records: Iterable[BenchRecord], stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(asdict(record))


def read_csv(stream: TextIO) -> List[BenchRecord]:
    out = []
    for row in csv.DictReader(stream):
        trial = row["trial"]
        out.append(
            BenchRecord(
                algorithm=row["algorithm"],
                kind=row["kind"],
                n=int(row["n"]),
                trial=trial if trial == SUMMARY else int(trial),
                joins=int(row["joins"]),
                meets=int(row["meets"]),
                nanos=int(row["nanos"]),
                seed=int(row["seed"]),
            )
        )
    return out


def summarize(records: Sequence[BenchRecord]) -> List[BenchRecord]:
    """One row per (algorithm, kind, n): worst-case counters and mean nanos."""
    groups: Dict[Tuple[str, str, int], List[BenchRecord]] = {}
    for r in records:
        if r.trial != SUMMARY:
            groups.setdefault((r.algorithm, r.kind, r.n), []).append(r)
    out = []
    for (algorithm, kind, n), rows in groups.items():
        out.append(
            BenchRecord(
                algorithm=algorithm,
                kind=kind,
                n=n,
                trial=SUMMARY,
                joins=max(r.joins for r in rows),
                meets=max(r.meets for r in rows),
                nanos=int(np.mean([r.nanos for r in rows])),
                seed=rows[0].seed,
            )
        )
    return out


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)
    return float(slope)


def _timed(fn: Callable, *args):
    start = time.perf_counter_ns()
    out = fn(*args)
    return out, time.perf_counter_ns() - start


class BenchEngine:
    """Runs benchmark campaigns with limits taken from a :class:`Config`."""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.warmup = bool(self.config.get("bench.warmup"))
        self.max_states = self.config.get("knowledge.max_states")
        self.endo_meet_max_states = self.config.get("knowledge.endo_meet_max_states")
        self.budget = self.config.get("meet.enum_budget")

    def run_meet(self, L: Lattice, f: Endo, g: Endo, algorithm: str) -> Tuple[MeetResult, int]:
        """Run one algorithm, timing the call alone."""
        return _timed(meet_endos, L, f, g, algorithm, self.budget)

    def run_suite(
        self,
        kinds: Sequence[str],
        sizes: Sequence[int],
        trials: int,
        algorithms: Sequence[str],
        seed: int = 0,
    ) -> List[BenchRecord]:
        """
        Benchmark ``algorithms`` on every (kind, size) instance.

        Each instance draws ``trials`` random pairs of join-endomorphisms
        from a stream seeded by (seed, kind, size). Distributive-only
        algorithms are skipped on non-distributive lattices.
        """
        for name in algorithms:
            if name not in ALGORITHMS:
                raise LatticeError(f"Unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
        records: List[BenchRecord] = []
        if trials <= 0:
            return records
        gen_config = GenConfig.from_config(self.config, seed)
        for kind_index, kind in enumerate(kinds):
            for size in sizes:
                rng = np.random.default_rng([seed, kind_index, size])
                L = lattice_of_kind(kind, size, rng, gen_config)
                runnable = [a for a in algorithms if a not in DISTRIBUTIVE_ONLY or L.is_distributive]
                for skipped in sorted(set(algorithms) - set(runnable)):
                    log.warning("Skipping %s on non-distributive %s lattice (n=%d)", skipped, kind, L.n)
                pairs = [(random_endo(L, rng), random_endo(L, rng)) for _ in range(trials)]
                if self.warmup:
                    for name in runnable:
                        self.run_meet(L, pairs[0][0], pairs[0][1], name)
                log.info("Benchmarking %s size %d (n=%d), %d trials", kind, size, L.n, trials)
                for trial, (f, g) in enumerate(pairs):
                    for name in runnable:
                        result, nanos = self.run_meet(L, f, g, name)
                        records.append(
                            BenchRecord(name, kind, L.n, trial, result.counters.joins, result.counters.meets, nanos, seed)
                        )
        return records

    def run_dk_suite(
        self,
        sizes: Sequence[int],
        trials: int,
        seed: int = 0,
        variants: Sequence[str] = DK_VARIANTS,
    ) -> List[BenchRecord]:
        """
        Time the distributed-knowledge decision procedures on random Aumann
        triples of each size.

        ``cached_operator`` builds operator arrays before timing;
        ``noncached_operator`` times their construction too. Operator
        variants are skipped above ``knowledge.max_states``. The opt-in
        ``endo_meet`` variant computes the meet with dmeet+ on the dual powerset
        and is skipped above ``knowledge.endo_meet_max_states``.
        """
        records: List[BenchRecord] = []
        if trials <= 0:
            return records
        cache_limit = self.config.get("generators.stirling_cache")
        for n in sizes:
            rng = np.random.default_rng([seed, n])
            instances = [random_dk_instance(n, rng, cache_limit) for _ in range(trials)]
            active = [v for v in variants if n <= self._state_cap(v)]
            for skipped in sorted(set(variants) - set(active)):
                log.warning("Skipping %s for n=%d above its state cap %d", skipped, n, self._state_cap(skipped))
            if self.warmup:
                self._dk_trial(instances[0], active)
            log.info("Benchmarking distributed knowledge n=%d, %d trials", n, trials)
            for trial, inst in enumerate(instances):
                for variant, (answer, nanos) in self._dk_trial(inst, active).items():
                    if answer != inst.expected:
                        log.error("%s answered %s on a %s instance (n=%d)", variant, answer, inst.expected, n)
                    records.append(BenchRecord(variant, "aumann", n, trial, 0, 0, nanos, seed))
        return records

    def _dk_trial(self, inst, variants: Sequence[str]) -> Dict[str, Tuple[bool, int]]:
        out: Dict[str, Tuple[bool, int]] = {}
        parts = (inst.P_i, inst.P_j, inst.P_m)
        if any(v != "disjoint_set" for v in variants):
            mats = [relation_from_partition(P) for P in parts]
        for variant in variants:
            if variant == "cached_operator":
                ops = [build_kop_array(M, self.max_states) for M in mats]
                out[variant] = _timed(decide_dk_operators, *ops)
            elif variant == "noncached_operator":
                out[variant] = _timed(self._noncached, mats)
            elif variant == "relation":
                out[variant] = _timed(decide_dk_relations, *mats)
            elif variant == "disjoint_set":
                out[variant] = _timed(decide_dk_partitions, *parts)
            elif variant == ENDO_MEET:
                out[variant] = _timed(self._endo_meet, mats)
            else:
                raise LatticeError(f"Unknown variant {variant!r}; choose from {DK_VARIANTS + (ENDO_MEET,)}")
        return out

    def _noncached(self, mats: Sequence[np.ndarray]) -> bool:
        return decide_dk_operators(*(build_kop_array(M, self.max_states) for M in mats))

    def _endo_meet(self, mats: Sequence[np.ndarray]) -> bool:
        h = dk_as_endo_meet(mats[0], mats[1], self.endo_meet_max_states)
        return h.to_list() == build_kop_array(mats[2], self.endo_meet_max_states).vk.tolist()

    def _state_cap(self, variant: str) -> float:
        if variant.endswith("operator"):
            return self.max_states
        if variant == ENDO_MEET:
            return self.endo_meet_max_states
        return float("inf")
