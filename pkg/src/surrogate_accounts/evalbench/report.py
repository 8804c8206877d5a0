"""Tabular and plotted views of experiment reports."""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

import numpy as np

from ..io import write_atomic
from .experiments import STRATEGIES, ExperimentReport, utility_frontier


def write_report(report: ExperimentReport, path: str | os.PathLike) -> None:
    write_atomic(path, report.to_csv())


def frontier_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["opacity_level", *(f"max_path_utility_{s}" for s in STRATEGIES)])
    for entry in utility_frontier(report):
        w.writerow([f"{entry['opacity_level']:.1f}", *("" if entry[s] is None else f"{entry[s]:.6f}" for s in STRATEGIES)])
    return buf.getvalue()


def delta_grid(report: ExperimentReport, measure: str) -> tuple[list[float], list[float], np.ndarray]:
    """Surrogate-minus-hide ``measure`` as a (connectedness band x protection level) grid.

    Cells are keyed by the ``cXXX.X-pY.YY`` graph ids that :func:`run_sweep` assigns.
    """
    cells = {}
    for d in report.deltas():
        band, level = d.graph_id.split("-p")
        cells[(float(band[1:]), float(level))] = getattr(d, measure)
    conn = sorted({c for c, _ in cells})
    prot = sorted({p for _, p in cells})
    grid = np.array([[cells.get((c, p), np.nan) for p in prot] for c in conn])
    return conn, prot, grid


def plot_report(report: ExperimentReport, outdir: str | os.PathLike) -> list[Path]:
    """Delta heatmaps (opacity, path utility) and the utility frontier as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for measure, title in (("opacity_protected", "opacity"), ("path_utility", "path utility")):
        conn, prot, grid = delta_grid(report, measure)
        fig, ax = plt.subplots(figsize=(5, 4))
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
        ax.set_xticks(range(len(prot)), [f"{p:.0%}" for p in prot])
        ax.set_yticks(range(len(conn)), [f"{c:.0f}" for c in conn])
        ax.set_xlabel("protected edges")
        ax.set_ylabel("connected pairs per node (target)")
        ax.set_title(f"surrogate - hide: {title}")
        fig.colorbar(im, ax=ax)
        path = out / f"delta_{measure}.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    frontier = utility_frontier(report)
    fig, ax = plt.subplots(figsize=(5, 4))
    for strategy in STRATEGIES:
        xs = [e["opacity_level"] for e in frontier if e[strategy] is not None]
        ys = [e[strategy] for e in frontier if e[strategy] is not None]
        ax.step(xs, ys, where="post", label=strategy)
    ax.set_xlabel("opacity at least")
    ax.set_ylabel("maximum path utility")
    ax.legend()
    path = out / "frontier.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written
