import functools
import json
import logging
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from pcog import __version__
from pcog.characterize import cog_ds_core_exists, fractional_ds_value
from pcog.core import (Allocation, ExistenceMethod, bird_allocation, check_emptiness_certificate, core_existence,
                       ir_allocation, verify_core)
from pcog.errors import FormatError, PcogError
from pcog.files import (AllocationFile, CertificateFile, GraphFile, canonical_json, dump_instance,
                        load_instance)
from pcog.game import GameInstance, coalition_optimum, grand_value
from pcog.graph import Edge, format_rational
from pcog.optima import Goal
from pcog.reductions import (EXAMPLES, GeneratedInstance, gen_ds_membership_pdsg_ce, gen_sat_cog_ds_ce,
                             gen_sat_unsat_pdsg_cv, gen_vc_membership_pvcg_ce, parse_cnf, reduce_pvcg_to_pdsg,
                             worked_example)
from pcog.sampling import random_instance

FORMAT_ERRORS = (FormatError, ValidationError, json.JSONDecodeError, UnicodeDecodeError)

InputPath = click.Path(exists=True, dir_okay=False, path_type=Path)
OutputPath = click.Path(dir_okay=False, writable=True, path_type=Path)


# --- Report helpers ---
def _emit(key: str, value):
    if isinstance(value, bool):
        value = "true" if value else "false"
    elif isinstance(value, Fraction):
        value = format_rational(value)
    click.echo(f"{key}={value}")


def _label(element) -> str:
    return element.key if isinstance(element, Edge) else element


def _allocation_json(a: Allocation) -> str:
    return canonical_json(AllocationFile.from_allocation(a), compact=True)


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _load_instance(path: Path) -> GameInstance:
    inst = load_instance(_read(path))
    logging.debug(f"loaded {inst.goal.value} game from {path}: {inst.n_agents} agents, {len(inst.graph)} vertices")
    return inst


def _exit_codes(command):
    """0 when the command ran, 2 for unreadable input, 3 for a broken precondition."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except FORMAT_ERRORS as e:
            click.echo(f"error: {e}", err=True)
            raise click.exceptions.Exit(2)
        except PcogError as e:
            click.echo(f"error: {e}", err=True)
            raise click.exceptions.Exit(3)

    return wrapper


# --- Command group ---
@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log debug messages to standard error.")
@click.version_option(__version__, prog_name="pcog")
def cli(verbose: bool):
    """Partitioned combinatorial optimization games: values, core checks and gadget generators."""
    logging.basicConfig(format="%(levelname)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.WARNING)


@cli.command()
@click.argument("instance", type=InputPath)
@click.option("--coalition", default=None, help="Comma-separated agent ids; the grand coalition when omitted.")
@_exit_codes
def value(instance: Path, coalition: Optional[str]):
    """Value of a coalition together with an optimal witness."""
    inst = _load_instance(instance)
    if coalition is None:
        mask = inst.full_mask
    else:
        mask = inst.mask_of(agent.strip() for agent in coalition.split(",") if agent.strip())
    result = coalition_optimum(inst, mask)
    _emit("coalition", ",".join(inst.members_of(mask)))
    _emit("value", result.value)
    _emit("witness", ",".join(_label(e) for e in result.sorted_witness()))


@cli.command()
@click.argument("instance", type=InputPath)
@click.argument("allocation", type=InputPath)
@click.option("--most-violated", is_flag=True, help="Report the coalition with the largest violation.")
@_exit_codes
def verify(instance: Path, allocation: Path, most_violated: bool):
    """Checks whether an allocation is core-stable."""
    inst = _load_instance(instance)
    a = AllocationFile.model_validate_json(_read(allocation)).to_allocation(inst)
    report = verify_core(inst, a, most_violated)
    _emit("verdict", report.verdict.value)
    _emit("grand_value", report.grand_value)
    _emit("total", report.total)
    if report.blocking is not None:
        _emit("blocking", ",".join(report.blocking.members))
        _emit("blocking_value", report.blocking.value)
        _emit("blocking_payoff", report.blocking.payoff)
        _emit("blocking_witness", ",".join(_label(e) for e in report.blocking.witness))


@cli.command()
@click.argument("instance", type=InputPath)
@click.option("--method", type=click.Choice([m.value for m in ExistenceMethod]), default="full", show_default=True)
@click.option("--most-violated", is_flag=True, help="Cutting plane: add the most violated coalition each round.")
@click.option("--certificate-out", type=OutputPath, default=None, help="Write the emptiness certificate here.")
@_exit_codes
def core(instance: Path, method: str, most_violated: bool, certificate_out: Optional[Path]):
    """Decides whether the core is nonempty; prints an allocation or an emptiness certificate."""
    inst = _load_instance(instance)
    report = core_existence(inst, ExistenceMethod(method), most_violated)
    _emit("verdict", report.verdict.value)
    _emit("method", report.method.value)
    _emit("grand_value", grand_value(inst))
    _emit("constraints", report.constraints)
    _emit("oracle_calls", report.oracle_calls)
    if report.allocation is not None:
        _emit("allocation", _allocation_json(report.allocation))
    if report.certificate is not None:
        cert = CertificateFile.from_certificate(inst, report.certificate)
        _emit("certificate", canonical_json(cert, compact=True))
        if certificate_out is not None:
            certificate_out.write_text(canonical_json(cert), encoding="utf-8")


@cli.command()
@click.argument("instance", type=InputPath)
@_exit_codes
def ir(instance: Path):
    """Individually rational pre-imputation."""
    inst = _load_instance(instance)
    a = ir_allocation(inst)
    _emit("allocation", _allocation_json(a))
    _emit("total", a.total())


@cli.command()
@click.argument("instance", type=InputPath)
@_exit_codes
def bird(instance: Path):
    """Bird's rule for a spanning-tree game."""
    inst = _load_instance(instance)
    a = bird_allocation(inst)
    _emit("allocation", _allocation_json(a))
    _emit("total", a.total())


@cli.command("fractional-ds")
@click.argument("instance", type=InputPath)
@_exit_codes
def fractional_ds(instance: Path):
    """Fractional against integer dominating set of the instance graph."""
    inst = _load_instance(instance)
    report = fractional_ds_value(inst.graph)
    _emit("fractional_value", report.fractional_value)
    _emit("integer_value", report.integer_value)
    _emit("equal", report.equal)
    _emit("lp_point", json.dumps({v: format_rational(y) for v, y in report.lp_point.items()},
                                 sort_keys=True, separators=(",", ":")))
    if inst.goal is Goal.MIN_DOMINATING_SET and all(len(inst.ownership.owned(a)) == 1 for a in inst.agents):
        _emit("core_exists", cog_ds_core_exists(inst))


@cli.command("check-cert")
@click.argument("instance", type=InputPath)
@click.argument("certificate", type=InputPath)
@_exit_codes
def check_cert(instance: Path, certificate: Path):
    """Checks an emptiness certificate against the instance."""
    inst = _load_instance(instance)
    cert = CertificateFile.model_validate_json(_read(certificate)).to_certificate(inst)
    _emit("valid", check_emptiness_certificate(inst, cert))


# --- Generators ---
def _emit_generated(generated: GeneratedInstance, instance_out: Optional[Path], allocation_out: Optional[Path]):
    _emit("expected", generated.expected)
    _emit("provenance", generated.provenance)
    _emit("agents", generated.instance.n_agents)
    _emit("instance", dump_instance(generated.instance, compact=True))
    if generated.allocation is not None:
        _emit("allocation", _allocation_json(generated.allocation))
    if instance_out is not None:
        instance_out.write_text(dump_instance(generated.instance), encoding="utf-8")
    if allocation_out is not None and generated.allocation is not None:
        allocation_out.write_text(canonical_json(AllocationFile.from_allocation(generated.allocation)),
                                  encoding="utf-8")


def _outputs(command):
    command = click.option("-o", "--instance-out", type=OutputPath, default=None,
                           help="Write the canonical instance file here.")(command)
    return click.option("--allocation-out", type=OutputPath, default=None,
                        help="Write the accompanying allocation, if any, here.")(command)


def _member_graph(path: Path):
    graph_file = GraphFile.model_validate_json(_read(path))
    graph_file.reject_reserved_names()
    return graph_file.to_graph()


@cli.group()
def gen():
    """Ground-truth instance generators."""


@gen.command("sat-unsat")
@click.argument("f1", type=InputPath)
@click.argument("f2", type=InputPath)
@_outputs
@_exit_codes
def gen_sat_unsat(f1: Path, f2: Path, instance_out, allocation_out):
    """Single-agent verification instance: stable iff F1 is satisfiable and F2 is not."""
    generated = gen_sat_unsat_pdsg_cv(parse_cnf(_read(f1)), parse_cnf(_read(f2)))
    _emit_generated(generated, instance_out, allocation_out)


@gen.command("sat-cog")
@click.argument("formula", type=InputPath)
@_outputs
@_exit_codes
def gen_sat_cog(formula: Path, instance_out, allocation_out):
    """One-agent-per-vertex dominating set game: core nonempty iff FORMULA is satisfiable."""
    _emit_generated(gen_sat_cog_ds_ce(parse_cnf(_read(formula))), instance_out, allocation_out)


@gen.command("vc-member")
@click.argument("graph", type=InputPath)
@click.argument("vertex")
@_outputs
@_exit_codes
def gen_vc_member(graph: Path, vertex: str, instance_out, allocation_out):
    """Vertex cover game with a nonempty core iff VERTEX is in some minimum vertex cover."""
    _emit_generated(gen_vc_membership_pvcg_ce(_member_graph(graph), vertex), instance_out, allocation_out)


@gen.command("ds-member")
@click.argument("graph", type=InputPath)
@click.argument("vertex")
@click.option("--literal-cross-edges", is_flag=True, help="Also join triangle 1 to the other triangles.")
@_outputs
@_exit_codes
def gen_ds_member(graph: Path, vertex: str, literal_cross_edges: bool, instance_out, allocation_out):
    """Dominating set game with a nonempty core iff VERTEX is in some minimum dominating set."""
    generated = gen_ds_membership_pdsg_ce(_member_graph(graph), vertex, literal_cross_edges)
    _emit_generated(generated, instance_out, allocation_out)


@gen.command("example")
@click.argument("example_id", type=click.Choice(list(EXAMPLES)))
@_outputs
@_exit_codes
def gen_example(example_id: str, instance_out, allocation_out):
    """One of the small reference games."""
    _emit_generated(worked_example(example_id), instance_out, allocation_out)


@gen.command("random")
@click.option("--goal", type=click.Choice([g.value for g in Goal]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--agents", "max_agents", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--vertices", "max_vertices", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--edge-probability", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@click.option("-o", "--instance-out", type=OutputPath, default=None, help="Write the canonical instance file here.")
@_exit_codes
def gen_random(goal: str, seed: int, max_agents: int, max_vertices: int, edge_probability: float,
               instance_out: Optional[Path]):
    """Seeded random instance; the same seed always gives the same file."""
    inst = random_instance(random.Random(seed), Goal(goal), max_agents, max_vertices, edge_probability)
    _emit("agents", inst.n_agents)
    _emit("instance", dump_instance(inst, compact=True))
    if instance_out is not None:
        instance_out.write_text(dump_instance(inst), encoding="utf-8")


# --- Reductions ---
@cli.group()
def reduce():
    """Instance-to-instance reductions."""


@reduce.command("vc-to-ds")
@click.argument("instance", type=InputPath)
@click.option("-o", "--instance-out", type=OutputPath, default=None, help="Write the canonical instance file here.")
@_exit_codes
def reduce_vc_to_ds(instance: Path, instance_out: Optional[Path]):
    """Dominating set game with the same core existence answer as a vertex cover game."""
    reduced = reduce_pvcg_to_pdsg(_load_instance(instance))
    _emit("agents", reduced.n_agents)
    _emit("instance", dump_instance(reduced, compact=True))
    if instance_out is not None:
        instance_out.write_text(dump_instance(reduced), encoding="utf-8")
