"""Experiment harness: motifs, synthetic graphs, surrogate-vs-hide runs and reports."""

from .experiments import (
    ExperimentReport,
    ReportRow,
    run_motif_suite,
    run_protection_experiment,
    run_sweep,
    strategy_graph,
    sweep_specs,
    utility_frontier,
)
from .motifs import MotifKind, gen_motif, protected_edge
from .synthetic import SynthSpec, gen_synthetic, mean_connected_pairs

__all__ = [
    "ExperimentReport",
    "MotifKind",
    "ReportRow",
    "SynthSpec",
    "gen_motif",
    "gen_synthetic",
    "mean_connected_pairs",
    "protected_edge",
    "run_motif_suite",
    "run_protection_experiment",
    "run_sweep",
    "strategy_graph",
    "sweep_specs",
    "utility_frontier",
]
