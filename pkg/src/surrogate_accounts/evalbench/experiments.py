"""Surrogating versus hiding the same edges, on motifs and on synthetic sweeps.

Both strategies protect a set of edges of an all-Public graph through markings
at ``Public``:

* hide marks both incidences of a protected edge Hide;
* surrogate marks the source incidence Visible and the target incidence
  Surrogate, so the source may be linked to whatever lies past the target.

Marking both incidences Surrogate would forbid every surrogate edge that uses
the protected edge first, which leaves nothing to compare.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from collections.abc import Callable, Iterable, Sequence
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from ..errors import ValidationError
from ..graph import Edge, Mark, SensitiveGraph
from ..lattice import PUBLIC
from ..metrics import OpacityConfig, graph_opacity, utility_report
from ..protection import ProtectedAccount, generate_hide_only, generate_protected_account
from .motifs import MotifKind, gen_motif, protected_edge
from .synthetic import SynthSpec, gen_synthetic, mean_connected_pairs

STRATEGIES = ("surrogate", "hide")
PROTECTION_LEVELS = (0.1, 0.3, 0.5, 0.7, 0.9)
CONNECTEDNESS_LEVELS = tuple(float(x) for x in np.linspace(30, 100, 10))

WARMUPS = 2
REPEATS = 11


@dataclass(frozen=True)
class ReportRow:
    graph_id: str
    nodes: int
    connected_pairs: float
    protected_fraction: float
    strategy: str
    path_utility: float
    node_utility: float
    opacity_protected: float
    opacity_all: float
    gen_time_us: float | None = None
    seed: int | None = None


COLUMNS = tuple(f.name for f in fields(ReportRow))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


@dataclass
class ExperimentReport:
    rows: list[ReportRow]

    def for_strategy(self, strategy: str) -> list[ReportRow]:
        return [r for r in self.rows if r.strategy == strategy]

    def graph_ids(self) -> list[str]:
        return list(dict.fromkeys(r.graph_id for r in self.rows))

    def row(self, graph_id: str, strategy: str) -> ReportRow:
        for r in self.rows:
            if r.graph_id == graph_id and r.strategy == strategy:
                return r
        raise KeyError((graph_id, strategy))

    def deltas(self) -> list[ReportRow]:
        """One row per graph holding surrogate minus hide for each measure."""
        out = []
        for gid in self.graph_ids():
            s, h = self.row(gid, "surrogate"), self.row(gid, "hide")
            out.append(
                replace(
                    s,
                    strategy="delta",
                    path_utility=s.path_utility - h.path_utility,
                    node_utility=s.node_utility - h.node_utility,
                    opacity_protected=s.opacity_protected - h.opacity_protected,
                    opacity_all=s.opacity_all - h.opacity_all,
                    gen_time_us=None
                    if s.gen_time_us is None or h.gen_time_us is None
                    else s.gen_time_us - h.gen_time_us,
                )
            )
        return out

    def to_csv(self, include_deltas: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        rows = self.rows + (self.deltas() if include_deltas else [])
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()

    def to_dicts(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


def strategy_graph(g: SensitiveGraph, protected: Iterable[Edge], strategy: str) -> SensitiveGraph:
    """``g`` with every protected edge marked for ``strategy`` at Public."""
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}")
    src_mark, dst_mark = (Mark.VISIBLE, Mark.SURROGATE) if strategy == "surrogate" else (Mark.HIDE, Mark.HIDE)
    markings = dict(g.markings.entries)
    for e in protected:
        e = tuple(e)
        if not g.has_edge(*e):
            raise ValidationError(f"protected edge {e[0]}->{e[1]} is not in the graph")
        markings[(e[0], e, PUBLIC)] = src_mark
        markings[(e[1], e, PUBLIC)] = dst_mark
    return g.replace(markings=markings)


def median_time_us(fn: Callable[[], object], warmups: int = WARMUPS, repeats: int = REPEATS) -> float:
    for _ in range(warmups):
        fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return statistics.median(samples) / 1000.0


def _generators(g: SensitiveGraph, protected: Sequence[Edge]) -> dict[str, Callable[[], ProtectedAccount]]:
    marked = strategy_graph(g, protected, "surrogate")
    return {
        "surrogate": lambda: generate_protected_account(marked, PUBLIC),
        # with every other incidence Visible this is exactly what the full
        # algorithm produces on the Hide-marked graph, minus the walk search
        "hide": lambda: generate_hide_only(g, PUBLIC, protected),
    }


def run_protection_experiment(
    g: SensitiveGraph,
    protected: Sequence[Edge],
    cfg: OpacityConfig | None = None,
    *,
    graph_id: str = "graph",
    connected_pairs: float = math.nan,
    seed: int | None = None,
    timing: bool = False,
) -> tuple[ReportRow, ReportRow]:
    """Protect ``protected`` both ways and measure the two accounts.

    Returns the (surrogate, hide) rows. Opacity is averaged over the protected
    edges and, separately, over all edges of ``g``.
    """
    protected = [tuple(e) for e in protected]
    if not protected:
        raise ValidationError("no protected edges given")
    gens = _generators(g, protected)
    fraction = len(set(protected)) / len(g.edges)
    rows = []
    for strategy in STRATEGIES:
        acct = gens[strategy]()
        util = utility_report(g, acct)
        rows.append(
            ReportRow(
                graph_id=graph_id,
                nodes=len(g.nodes),
                connected_pairs=connected_pairs,
                protected_fraction=fraction,
                strategy=strategy,
                path_utility=util.path_utility,
                node_utility=util.node_utility,
                opacity_protected=graph_opacity(g, acct, cfg, edges=protected),
                opacity_all=graph_opacity(g, acct, cfg, scope="all-edges"),
                gen_time_us=median_time_us(gens[strategy]) if timing else None,
                seed=seed,
            )
        )
    return rows[0], rows[1]


def run_motif_suite(cfg: OpacityConfig | None = None, timing: bool = False) -> ExperimentReport:
    rows = []
    for kind in MotifKind:
        g = gen_motif(kind)
        rows.extend(
            run_protection_experiment(
                g,
                [protected_edge(kind)],
                cfg,
                graph_id=kind.value,
                connected_pairs=mean_connected_pairs(g),
                timing=timing,
            )
        )
    return ExperimentReport(rows)


def sweep_specs(
    master_seed: int = 0,
    node_count: int = 200,
    protection: Sequence[float] = PROTECTION_LEVELS,
    connectedness: Sequence[float] = CONNECTEDNESS_LEVELS,
) -> list[SynthSpec]:
    """The protection x connectedness grid.

    Each connectedness band draws its seed from ``(master_seed, band)``, so all
    protection levels of a band share one graph and nested protected sets.
    """
    specs = []
    for band, target in enumerate(connectedness):
        seed = int(np.random.SeedSequence([master_seed, band]).generate_state(1)[0])
        for frac in protection:
            specs.append(SynthSpec(node_count, float(target), float(frac), seed))
    return specs


def _cell(spec: SynthSpec, cfg: OpacityConfig | None, timing: bool) -> tuple[ReportRow, ReportRow]:
    sg = gen_synthetic(spec)
    gid = f"c{spec.connected_pairs:05.1f}-p{spec.protected_fraction:.2f}"
    return run_protection_experiment(
        sg.graph,
        sg.protected,
        cfg,
        graph_id=gid,
        connected_pairs=sg.connected_pairs,
        seed=spec.seed,
        timing=timing,
    )


def run_sweep(
    specs: Sequence[SynthSpec] | None = None,
    cfg: OpacityConfig | None = None,
    *,
    timing: bool = False,
    workers: int = 1,
) -> ExperimentReport:
    """Run every cell; ``workers > 1`` spreads cells over processes with the same result."""
    specs = list(specs) if specs is not None else sweep_specs()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            pairs = list(pool.map(_cell, specs, [cfg] * len(specs), [timing] * len(specs)))
    else:
        pairs = [_cell(s, cfg, timing) for s in specs]
    return ExperimentReport([r for pair in pairs for r in pair])


def utility_frontier(report: ExperimentReport, levels: Sequence[float] | None = None) -> list[dict]:
    """Best path utility reached by each strategy at or above each level of whole-graph opacity.

    Whole-graph opacity is the tradeoff quantity here: over the protected edges
    alone it stays close to 1 for both strategies.
    """
    levels = levels if levels is not None else [round(x, 1) for x in np.linspace(0.0, 1.0, 11)]
    out = []
    for level in levels:
        entry = {"opacity_level": float(level)}
        for strategy in STRATEGIES:
            ok = [r.path_utility for r in report.for_strategy(strategy) if r.opacity_all >= level - 1e-12]
            entry[strategy] = max(ok) if ok else None
        out.append(entry)
    return out
