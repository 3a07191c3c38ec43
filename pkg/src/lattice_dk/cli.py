"""
Command-line interface for lattice-dk.
"""

import io
import json
import logging
import os
import sys
from dataclasses import asdict
from typing import List, Optional

import click
import numpy as np

from .config import DEFAULTS, Config
from .errors import LatticeError


def _fail(err: LatticeError) -> None:
    click.echo(f"Error: {err}", err=True)
    sys.exit(err.exit_code)


def _settings(ctx, seed: Optional[int], out: Optional[str]):
    """Subcommand --seed/--out win over the ones given to the root group."""
    return (
        seed if seed is not None else ctx.obj["SEED"],
        out if out is not None else ctx.obj["OUT"],
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


def _checked_config(ctx) -> Config:
    config = ctx.obj["CONFIG"]
    if not config.validate():
        click.echo("Invalid configuration. Please check your config/config.yaml file.", err=True)
        sys.exit(3)
    return config


def _parse_sizes(value: str) -> List[int]:
    try:
        if ".." in value:
            lo, hi = value.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected 'a..b' or a comma list of integers, got {value!r}")


def _split(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _records_text(records, fmt: str) -> str:
    from .bench import write_csv

    if fmt == "json":
        return json.dumps([asdict(r) for r in records]) + "\n"
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def output_options(fn):
    fn = click.option("--out", default=None, help="Output file (defaults to the global --out, then stdout)")(fn)
    fn = click.option("--seed", type=int, default=None, help="Random seed (defaults to the global --seed)")(fn)
    return fn


@click.group()
@click.option("--debug/--no-debug", default=False, help="Enable debug logging")
@click.option("--config", default=None, help="Path to config file")
@click.option("--seed", type=int, default=0, help="Seed for every random stream")
@click.option("--out", default=None, help="Write results to this file instead of stdout")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None,
              help="Result format (meet defaults to json, benchmarks to csv)")
@click.pass_context
def cli(ctx, debug, config, seed, out, fmt):
    """lattice-dk - Meets of join-endomorphisms and distributed knowledge."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["DEBUG"] = debug
    ctx.obj["CONFIG"] = Config(config)
    ctx.obj["SEED"] = seed
    ctx.obj["OUT"] = out
    ctx.obj["FORMAT"] = fmt


@cli.command()
@click.option("--config", default=None, help="Path to config file to create")
@click.pass_context
def init(ctx, config):
    """Initialize configuration file with the default limits."""
    config_obj = ctx.obj["CONFIG"]
    if config:
        config_obj.config_path = config

    if os.path.exists(config_obj.config_path):
        if not click.confirm(f"Config file {config_obj.config_path} already exists. Overwrite?"):
            return

    config_obj.reset_to_defaults()
    config_obj.save()
    click.echo(f"Created configuration file at {config_obj.config_path}")
    click.echo(f"Sections: {', '.join(DEFAULTS)}")


# Generation


@cli.group()
def gen():
    """Generate lattices, maps, partitions, relations and operators."""


@gen.command("lattice")
@click.option("-k", "--kind", type=click.Choice(["powerset", "mn", "chain", "dist", "arb"]), required=True,
              help="powerset: rank; mn: atoms; chain: length; dist: poset size; arb: target size")
@click.option("-p", "--param", type=int, required=True, help="Size parameter of the kind")
@output_options
@click.pass_context
def gen_lattice(ctx, kind, param, seed, out):
    """Generate a lattice and print it as JSON."""
    from .formats import lattice_to_json
    from .generators import GenConfig, lattice_of_kind

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    try:
        L = lattice_of_kind(kind, param, np.random.default_rng(seed), GenConfig.from_config(config, seed))
    except LatticeError as e:
        _fail(e)
    _emit(json.dumps(lattice_to_json(L)) + "\n", out)


@gen.command("endo")
@click.argument("lattice", type=click.Path())
@click.option("-t", "--terms", type=int, default=None, help="Number of f_ab terms joined (default |J(L)|)")
@output_options
@click.pass_context
def gen_endo(ctx, lattice, terms, seed, out):
    """Generate a random join-endomorphism of LATTICE."""
    from .endo import random_endo
    from .formats import load_lattice

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    try:
        L = load_lattice(lattice, config.get("lattice.table_threshold"))
        f = random_endo(L, np.random.default_rng(seed), terms)
    except LatticeError as e:
        _fail(e)
    _emit(json.dumps(f.to_list()) + "\n", out)


@gen.command("partition")
@click.option("-n", "--n", "size", type=int, required=True, help="Number of elements")
@output_options
@click.pass_context
def gen_partition(ctx, size, seed, out):
    """Generate a uniformly random partition."""
    from .generators import random_partition

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    try:
        P = random_partition(size, np.random.default_rng(seed), config.get("generators.stirling_cache"))
    except LatticeError as e:
        _fail(e)
    _emit(json.dumps(P.to_lists()) + "\n", out)


@gen.command("relation")
@click.option("-n", "--n", "size", type=int, required=True, help="Number of states")
@click.option("-d", "--density", type=float, default=0.5, help="Edge probability")
@click.option("--equivalence", is_flag=True, help="Generate an equivalence relation instead")
@output_options
@click.pass_context
def gen_relation(ctx, size, density, equivalence, seed, out):
    """Generate a random accessibility relation."""
    from .formats import relation_to_json
    from .generators import random_equivalence, random_relation

    seed, out = _settings(ctx, seed, out)
    _checked_config(ctx)
    rng = np.random.default_rng(seed)
    try:
        R = random_equivalence(size, rng) if equivalence else random_relation(size, rng, density)
    except LatticeError as e:
        _fail(e)
    _emit(json.dumps(relation_to_json(R)) + "\n", out)


@gen.command("operator")
@click.argument("relation", type=click.Path())
@click.option("--out", default=None, help="Binary operator file to write")
@click.pass_context
def gen_operator(ctx, relation, out):
    """Tabulate the knowledge operator of RELATION into a binary file."""
    from .formats import dump_kop, load_relation
    from .knowledge import build_kop_array

    out = out or ctx.obj["OUT"]
    if not out:
        raise click.UsageError("operator files are binary; pass --out")
    config = _checked_config(ctx)
    try:
        K = build_kop_array(load_relation(relation), config.get("knowledge.max_states"))
    except LatticeError as e:
        _fail(e)
    dump_kop(K, out)
    click.echo(f"Wrote operator over {K.n} states to {out}")


@gen.command("dk-instance")
@click.option("-n", "--n", "size", type=int, required=True, help="Number of states")
@click.option("--prefix", required=True, help="Writes PREFIX_i.json, PREFIX_j.json and PREFIX_m.json")
@click.option("--seed", type=int, default=None, help="Random seed (defaults to the global --seed)")
@click.pass_context
def gen_dk_instance(ctx, size, prefix, seed):
    """Generate two partitions and a candidate for their distributed knowledge."""
    from .formats import dump_partition
    from .generators import random_dk_instance

    seed, _ = _settings(ctx, seed, None)
    config = _checked_config(ctx)
    try:
        inst = random_dk_instance(size, np.random.default_rng(seed), config.get("generators.stirling_cache"))
    except LatticeError as e:
        _fail(e)
    for suffix, P in (("i", inst.P_i), ("j", inst.P_j), ("m", inst.P_m)):
        dump_partition(P, f"{prefix}_{suffix}.json")
    click.echo("true" if inst.expected else "false")


# Meets


@cli.command()
@click.argument("lattice", type=click.Path())
@click.argument("f", type=click.Path())
@click.argument("g", type=click.Path())
@click.option("-a", "--algorithm", default="gmeet", help="dmeet, dmeet+, gmeet, gmeet*, gmeet_mono, gmeet_mono*, gmeet_mono_lazy or brute")
@output_options
@click.pass_context
def meet(ctx, lattice, f, g, algorithm, seed, out):
    """Compute the meet of join-endomorphisms F and G of LATTICE."""
    from .bench import BenchEngine, BenchRecord
    from .formats import dump_endo, load_endo, load_lattice
    from .meet import ALGORITHMS

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    if algorithm not in ALGORITHMS:
        raise click.BadParameter(f"choose from {', '.join(ALGORITHMS)}", param_hint="--algorithm")

    try:
        L = load_lattice(lattice, config.get("lattice.table_threshold"))
        fe, ge = load_endo(f, L), load_endo(g, L)
        for path, h in ((f, fe), (g, ge)):
            if not h.validated:
                raise LatticeError(f"{path} is not a join-endomorphism")
        result, nanos = BenchEngine(config).run_meet(L, fe, ge, algorithm)
    except LatticeError as e:
        _fail(e)

    if out:
        dump_endo(result.result, out)
    record = BenchRecord(algorithm, "file", L.n, 0, result.counters.joins, result.counters.meets, nanos, seed)
    if ctx.obj["FORMAT"] == "csv":
        click.echo(_records_text([record], "csv"), nl=False)
    else:
        payload = asdict(record)
        if not out:
            payload["result"] = result.result.to_list()
        click.echo(json.dumps(payload))


# Benchmarks


@cli.command()
@click.option("--kinds", default="powerset", help="Comma list of lattice kinds")
@click.option("--sizes", default="2..10", help="'a..b' or a comma list of size parameters")
@click.option("--trials", type=int, default=100, help="Random pairs per instance")
@click.option("--algorithms", default="dmeet,dmeet+", help="Comma list of algorithm names")
@click.option("--summary/--no-summary", default=True, help="Append one summary row per algorithm and instance")
@output_options
@click.pass_context
def bench(ctx, kinds, sizes, trials, algorithms, summary, seed, out):
    """Benchmark meet algorithms and print one row per trial."""
    from .bench import BenchEngine, summarize
    from .generators import LATTICE_KINDS

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    kind_list = _split(kinds)
    for kind in kind_list:
        if kind not in LATTICE_KINDS:
            raise click.BadParameter(f"unknown kind {kind!r}; choose from {', '.join(LATTICE_KINDS)}", param_hint="--kinds")

    try:
        records = BenchEngine(config).run_suite(kind_list, _parse_sizes(sizes), trials, _split(algorithms), seed)
    except LatticeError as e:
        _fail(e)
    if summary:
        records += summarize(records)
    _emit(_records_text(records, ctx.obj["FORMAT"] or "csv"), out)


# Distributed knowledge


@cli.command()
@click.option("-m", "--mode", type=click.Choice(["operators", "relations", "partitions"]), default="partitions",
              help="Representation of the three inputs")
@click.argument("files", nargs=-1, type=click.Path())
@click.option("--bench", "run_bench", is_flag=True, help="Benchmark the four decision variants instead")
@click.option("--sizes", default="10,20,50", help="'a..b' or a comma list of state counts for --bench")
@click.option("--trials", type=int, default=100, help="Random instances per size for --bench")
@click.option("--variants", default=None,
              help="Comma list for --bench: cached_operator, noncached_operator, relation, disjoint_set, endo_meet")
@output_options
@click.pass_context
def dk(ctx, mode, files, run_bench, sizes, trials, variants, seed, out):
    """
    Decide whether the third input is the distributed knowledge of the
    first two. Prints true or false and exits 0 or 1.
    """
    from .bench import DK_VARIANTS, BenchEngine, summarize

    seed, out = _settings(ctx, seed, out)
    config = _checked_config(ctx)
    if run_bench:
        chosen = _split(variants) if variants else list(DK_VARIANTS)
        try:
            records = BenchEngine(config).run_dk_suite(_parse_sizes(sizes), trials, seed, chosen)
        except LatticeError as e:
            _fail(e)
        records += summarize(records)
        _emit(_records_text(records, ctx.obj["FORMAT"] or "csv"), out)
        return

    if len(files) != 3:
        raise click.UsageError("dk needs exactly three input files: agent i, agent j and the candidate")

    from .formats import load_kop, load_partition, load_relation
    from .knowledge import decide_dk_operators, decide_dk_partitions, decide_dk_relations

    loaders = {
        "operators": (load_kop, decide_dk_operators),
        "relations": (load_relation, decide_dk_relations),
        "partitions": (load_partition, decide_dk_partitions),
    }
    load, decide = loaders[mode]
    try:
        answer = decide(*(load(path) for path in files))
    except LatticeError as e:
        _fail(e)
    click.echo("true" if answer else "false")
    sys.exit(0 if answer else 1)


# Partitions


@cli.group()
def partition():
    """Intersect and compare partitions."""


@partition.command("intersect")
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
@click.option("--check", default=None, type=click.Path(), help="Compare the intersection with this partition")
@click.option("--out", default=None, help="Output file (defaults to the global --out, then stdout)")
@click.pass_context
def partition_intersect(ctx, a, b, check, out):
    """Print the common refinement of partitions A and B."""
    from .formats import load_partition
    from .partitions import equal, intersect_partitions, partition_to_ds

    _, out = _settings(ctx, None, out)
    try:
        q = intersect_partitions(load_partition(a), load_partition(b))
        if check is not None:
            same = equal(partition_to_ds(q), partition_to_ds(load_partition(check)))
    except LatticeError as e:
        _fail(e)

    if check is None:
        _emit(json.dumps(q.to_lists()) + "\n", out)
        return
    if out:
        _emit(json.dumps(q.to_lists()) + "\n", out)
    click.echo("true" if same else "false")
    sys.exit(0 if same else 1)


@partition.command("equal")
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
def partition_equal(a, b):
    """Exit 0 if partitions A and B have the same blocks, 1 otherwise."""
    from .formats import load_partition
    from .partitions import equal, partition_to_ds

    try:
        same = equal(partition_to_ds(load_partition(a)), partition_to_ds(load_partition(b)))
    except LatticeError as e:
        _fail(e)
    click.echo("true" if same else "false")
    sys.exit(0 if same else 1)


def main():
    """Main entry point for the CLI."""
    cli(obj={})


if __name__ == "__main__":
    main()
