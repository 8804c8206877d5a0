"""Command-line interface.

Exit codes: 0 success, 2 unreadable or malformed input, 3 unknown privilege
predicate, 4 validation failure, 5 account does not correspond to the original,
6 infeasible generation spec. Output files are written atomically, so a failing
command never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import sys
import time
from pathlib import Path

import click

from . import __version__
from .errors import SurrogateError, ValidationError
from .evalbench.experiments import ExperimentReport, run_motif_suite, run_sweep, strategy_graph, sweep_specs
from .evalbench.motifs import MotifKind, gen_motif, protected_edge
from .evalbench.report import frontier_csv, plot_report, write_report
from .evalbench.synthetic import SynthSpec, gen_synthetic
from .graph import high_water_set, lint_markings
from .io import dumps, graph_to_dict, load_account, load_graph, load_opacity_config, save_account, write_atomic
from .metrics import OpacityModel, protected_edges, utility_report
from .protection import GenerationConfig, generate_protected_account

METRIC_COLUMNS = ("graph_id", "strategy", "metric", "subject", "value")

input_opt = click.option(
    "--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Graph file (JSON)."
)
output_opt = click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False), help="File to write.")
opacity_opt = click.option(
    "--opacity-config", type=click.Path(exists=True, dir_okay=False), default=None, help="Attacker step functions (JSON)."
)
format_opt = click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
timing_opt = click.option("--timing", is_flag=True, help="Measure generation time (median of 11 runs).")


def _table(rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def _check(ok: bool, label: str) -> bool:
    click.echo(f"{'PASS' if ok else 'FAIL'}  {label}")
    return ok


@click.group()
@click.version_option(__version__, prog_name="surrogate-accounts")
def cli():
    """Protect sensitive graphs with surrogate nodes and edges, and measure the result."""


@cli.command()
@input_opt
def validate(input_path):
    """Parse and validate a graph file."""
    g = load_graph(input_path)
    for warning in lint_markings(g):
        click.echo(f"warning: {warning}", err=True)
    hw = ", ".join(sorted(high_water_set(g)))
    n_surr = sum(len(v) for v in g.surrogates.values())
    click.echo(
        f"ok: {len(g.nodes)} nodes, {len(g.edges)} edges, {len(g.lattice.predicates)} predicates, "
        f"{n_surr} surrogates, high-water set {{{hw}}}"
    )


@cli.command()
@input_opt
@output_opt
@click.option("--predicate", required=True, help="Privilege predicate of the intended consumers.")
@click.option("--auto-null", is_flag=True, help="Stand in a null surrogate for nodes with no usable surrogate.")
def protect(input_path, output_path, predicate, auto_null):
    """Generate the protected account of a graph for one predicate."""
    g = load_graph(input_path)
    t0 = time.perf_counter()
    acct = generate_protected_account(g, predicate, GenerationConfig(auto_null=auto_null))
    elapsed = (time.perf_counter() - t0) * 1000
    save_account(acct, output_path)
    s = acct.summary()
    click.echo(
        f"nodes kept={s['kept']} surrogated={s['surrogated']} omitted={s['omitted']}; "
        f"edges preserved={s['preserved']} surrogate={s['surrogate_edges']}; generated in {elapsed:.2f} ms"
    )


@cli.command()
@input_opt
@click.option("--account", "account_path", required=True, type=click.Path(exists=True, dir_okay=False))
@opacity_opt
@click.option("--scope", type=click.Choice(["all", "protected"]), default="all", show_default=True)
@format_opt
def metrics(input_path, account_path, opacity_config, scope, fmt):
    """Utility and opacity of an account against its original graph."""
    g = load_graph(input_path)
    acct = load_account(account_path, g)
    cfg = load_opacity_config(opacity_config)
    util = utility_report(g, acct)
    edges = list(g.edges) if scope == "all" else protected_edges(g, acct.predicate)
    if not edges:
        raise ValidationError(f"no edges in opacity scope {scope!r}")
    model = OpacityModel(acct, cfg)
    per_edge = [(e, model.edge(e)) for e in edges]
    gid = Path(input_path).stem
    rows = [list(METRIC_COLUMNS)]
    rows.append([gid, "account", "path_utility", "graph", f"{util.path_utility:.6f}"])
    rows.append([gid, "account", "node_utility", "graph", f"{util.node_utility:.6f}"])
    for (a, b), value in per_edge:
        rows.append([gid, "account", "opacity", f"{a}->{b}", f"{value:.6f}"])
    mean = sum(v for _, v in per_edge) / len(per_edge)
    rows.append([gid, "account", "opacity_mean", f"{scope}-edges", f"{mean:.6f}"])
    click.echo(_table(rows, fmt), nl=False)


def _report_checks_motifs(report: ExperimentReport) -> bool:
    deltas = {d.graph_id: d for d in report.deltas()}
    ok = _check(
        all(d.path_utility >= 0 and d.opacity_protected >= 0 for d in deltas.values()),
        "surrogate - hide >= 0 for utility and opacity on every motif",
    )
    positive = ("star", "chain", "diamond", "tree", "inverted-tree")
    ok &= _check(
        all(deltas[k].path_utility > 0 and deltas[k].opacity_protected > 0 for k in positive),
        "strictly positive deltas for " + ", ".join(positive),
    )
    ok &= _check(
        all(deltas[k].path_utility == 0 and deltas[k].opacity_protected == 0 for k in ("bipartite", "lattice")),
        "zero deltas for bipartite and lattice",
    )
    return ok


def _report_checks_synth(report: ExperimentReport) -> bool:
    deltas = report.deltas()
    ok = _check(all(d.opacity_protected >= 0 for d in deltas), "opacity delta >= 0 in every cell")
    ok &= _check(
        sum(d.opacity_protected > 0 for d in deltas) * 2 > len(deltas), "opacity delta > 0 in most cells"
    )
    ok &= _check(all(d.path_utility >= 0 for d in deltas), "path utility delta >= 0 in every cell")
    return ok


@cli.command("bench-motifs")
@output_opt
@opacity_opt
@timing_opt
def bench_motifs(output_path, opacity_config, timing):
    """Surrogate vs hide on the seven motifs."""
    report = run_motif_suite(load_opacity_config(opacity_config), timing=timing)
    write_report(report, output_path)
    _report_checks_motifs(report)


@cli.command("bench-synth")
@output_opt
@opacity_opt
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Master seed of the grid.")
@click.option("--nodes", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--frontier", "frontier_path", type=click.Path(dir_okay=False), default=None, help="Also write the utility frontier table.")
@click.option("--plots", "plot_dir", type=click.Path(file_okay=False), default=None, help="Also write PNG plots here.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@timing_opt
def bench_synth(output_path, opacity_config, seed, nodes, frontier_path, plot_dir, workers, timing):
    """Surrogate vs hide over the 5 x 10 synthetic grid."""
    report = run_sweep(sweep_specs(seed, nodes), load_opacity_config(opacity_config), timing=timing, workers=workers)
    write_report(report, output_path)
    if frontier_path:
        write_atomic(frontier_path, frontier_csv(report))
    if plot_dir:
        plot_report(report, plot_dir)
    _report_checks_synth(report)


strategy_opt = click.option(
    "--strategy",
    type=click.Choice(["surrogate", "hide", "none"]),
    default="surrogate",
    show_default=True,
    help="How the protected edges are marked in the written graph.",
)


def _marked(g, protected, strategy):
    return g if strategy == "none" else strategy_graph(g, protected, strategy)


@cli.command("gen-motif")
@click.option("--kind", type=click.Choice([k.value for k in MotifKind]), required=True)
@output_opt
@strategy_opt
def gen_motif_cmd(kind, output_path, strategy):
    """Write a motif graph."""
    g = _marked(gen_motif(kind), [protected_edge(kind)], strategy)
    write_atomic(output_path, dumps(graph_to_dict(g)))
    click.echo(f"{kind}: {len(g.nodes)} nodes, {len(g.edges)} edges, protected {'->'.join(protected_edge(kind))}")


@cli.command("gen-synth")
@output_opt
@click.option("--nodes", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--connected-pairs", type=click.FloatRange(min=0), default=30.0, show_default=True)
@click.option("--protected-fraction", type=click.FloatRange(0, 1), default=0.1, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@strategy_opt
def gen_synth_cmd(output_path, nodes, connected_pairs, protected_fraction, seed, strategy):
    """Write a synthetic graph."""
    sg = gen_synthetic(SynthSpec(nodes, connected_pairs, protected_fraction, seed))
    g = _marked(sg.graph, sg.protected, strategy)
    write_atomic(output_path, dumps(graph_to_dict(g)))
    click.echo(
        f"{len(g.nodes)} nodes, {len(g.edges)} edges, {sg.connected_pairs:.2f} connected pairs per node, "
        f"{len(sg.protected)} protected edges"
    )


def main(argv: list[str] | None = None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="surrogate-accounts", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except SurrogateError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
