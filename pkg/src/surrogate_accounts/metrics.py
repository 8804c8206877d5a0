"""Utility and opacity measures for protected accounts."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import Edge, Mark, SensitiveGraph
from .protection import ProtectedAccount


@dataclass(frozen=True)
class OpacityConfig:
    """Attacker model: step functions for focus probability and edge-inference probability.

    Each step is ``(max_value, probability)``; the final step's bound is ``inf``.
    ``fp_steps`` are evaluated on a node's distinct-neighbour count, ``pc_steps``
    on a candidate endpoint's in+out degree.
    """

    fp_steps: tuple[tuple[float, float], ...] = ((1, 0.8), (math.inf, 0.2))
    pc_steps: tuple[tuple[float, float], ...] = ((1, 0.8), (math.inf, 0.2))

    def __post_init__(self):
        for name in ("fp_steps", "pc_steps"):
            steps = tuple((float(t), float(pr)) for t, pr in getattr(self, name))
            if not steps:
                raise ValidationError(f"{name} is empty")
            bounds = [t for t, _ in steps]
            if any(b <= a for a, b in zip(bounds, bounds[1:])):
                raise ValidationError(f"{name} thresholds must be strictly increasing")
            if not math.isinf(bounds[-1]):
                raise ValidationError(f"{name} must end with an unbounded step")
            if any(not 0.0 < pr <= 1.0 for _, pr in steps):
                raise ValidationError(f"{name} probabilities must lie in (0, 1]")
            object.__setattr__(self, name, steps)

    @staticmethod
    def _step(steps, values: np.ndarray) -> np.ndarray:
        bounds = np.array([t for t, _ in steps])
        probs = np.array([pr for _, pr in steps])
        return probs[np.searchsorted(bounds, values, side="left")]

    def fp(self, neighbours: np.ndarray) -> np.ndarray:
        return self._step(self.fp_steps, np.asarray(neighbours, dtype=float))

    def pc(self, degree: np.ndarray) -> np.ndarray:
        return self._step(self.pc_steps, np.asarray(degree, dtype=float))


@dataclass
class UtilityReport:
    path_utility: float
    node_utility: float
    path_percentages: dict[str, float] = field(default_factory=dict)


def _component_sizes(n: int, src, dst) -> np.ndarray:
    labels = _kernels.component_labels(n, src, dst)
    counts = np.bincount(labels, minlength=n)
    return counts[labels]


def _account_arrays(acct: ProtectedAccount):
    ids = list(acct.nodes)
    pos = {nid: i for i, nid in enumerate(ids)}
    src = np.array([pos[a] for a, _ in acct.edges], dtype=np.int64)
    dst = np.array([pos[b] for _, b in acct.edges], dtype=np.int64)
    return ids, pos, src, dst


def path_percentages(g: SensitiveGraph, acct: ProtectedAccount) -> dict[str, float]:
    """%P for every account node: share of the original's (undirected) connections retained."""
    ids, _, src, dst = _account_arrays(acct)
    acct_sizes = _component_sizes(len(ids), src, dst) - 1
    g_sizes = _component_sizes(len(g.nodes), g.edge_src, g.edge_dst) - 1
    out = {}
    for i, nid in enumerate(ids):
        num = int(acct_sizes[i])
        den = int(g_sizes[g.index[acct.nodes[nid].origin]])
        if den == 0:
            # isolated original: untouched isolation counts as full preservation
            out[nid] = 1.0 if num == 0 else float(num)
        else:
            out[nid] = num / den
    return out


def path_percentage(g: SensitiveGraph, acct: ProtectedAccount, node: str) -> float:
    if node not in acct.nodes:
        raise ValidationError(f"{node!r} is not an account node")
    return path_percentages(g, acct)[node]


def path_utility(g: SensitiveGraph, acct: ProtectedAccount) -> float:
    if not g.nodes:
        raise ValidationError("path utility of an empty graph is undefined")
    return sum(path_percentages(g, acct).values()) / len(g.nodes)


def node_utility(g: SensitiveGraph, acct: ProtectedAccount) -> float:
    if not g.nodes:
        raise ValidationError("node utility of an empty graph is undefined")
    return sum(node.info_score for node in acct.nodes.values()) / len(g.nodes)


def utility_report(g: SensitiveGraph, acct: ProtectedAccount) -> UtilityReport:
    pct = path_percentages(g, acct)
    return UtilityReport(sum(pct.values()) / len(g.nodes), node_utility(g, acct), pct)


class OpacityModel:
    """Precomputed account statistics so many edges can be scored cheaply."""

    def __init__(self, acct: ProtectedAccount, cfg: OpacityConfig | None = None):
        self.acct = acct
        self.cfg = cfg or OpacityConfig()
        ids, pos, src, dst = _account_arrays(acct)
        n = len(ids)
        self.pos = pos
        degree = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
        nbr = np.zeros((n, n), dtype=bool)
        nbr[src, dst] = True
        nbr |= nbr.T
        self.fp = self.cfg.fp(nbr.sum(axis=1))
        self.pc = self.cfg.pc(degree)
        total = self.pc.sum()
        # sum of p_c over every other node, minus those already joined in that direction
        self.out_sum = total - self.pc - np.bincount(src, weights=self.pc[dst], minlength=n)
        self.in_sum = total - self.pc - np.bincount(dst, weights=self.pc[src], minlength=n)

    def edge(self, e: Edge) -> float:
        g = self.acct.source
        if not g.has_edge(*e):
            raise ValidationError(f"{e[0]}->{e[1]} is not an edge of the original graph")
        a, b = self.acct.account_id(e[0]), self.acct.account_id(e[1])
        if a is None or b is None:
            return 1.0
        if (a, b) in self.acct.edges:
            return 0.0
        i, j = self.pos[a], self.pos[b]
        theta = 0.5 * (self.fp[i] * self.pc[j] / self.out_sum[i] + self.fp[j] * self.pc[i] / self.in_sum[j])
        return float(1.0 - theta)


def edge_opacity(g: SensitiveGraph, acct: ProtectedAccount, e: Edge, cfg: OpacityConfig | None = None) -> float:
    if acct.source is not g and acct.source != g:
        raise ValidationError("account was not generated from this graph")
    return OpacityModel(acct, cfg).edge(tuple(e))


def protected_edges(g: SensitiveGraph, p: str) -> list[Edge]:
    """Edges with any non-Visible incidence at ``p``."""
    src_m, dst_m = g.incidence_marks(p)
    return [e for e, a, b in zip(g.edges, src_m, dst_m) if a != Mark.VISIBLE or b != Mark.VISIBLE]


def graph_opacity(
    g: SensitiveGraph,
    acct: ProtectedAccount,
    cfg: OpacityConfig | None = None,
    scope: str = "all-edges",
    edges: Sequence[Edge] | None = None,
) -> float:
    """Mean edge opacity over ``scope`` ("all-edges" or "protected-edges"), or over ``edges`` if given."""
    if edges is None:
        if scope in ("all-edges", "all"):
            edges = g.edges
        elif scope in ("protected-edges", "protected"):
            edges = protected_edges(g, acct.predicate)
        else:
            raise ValidationError(f"unknown opacity scope {scope!r}")
    if not edges:
        raise ValidationError(f"no edges in opacity scope {scope!r}")
    model = OpacityModel(acct, cfg)
    return float(np.mean([model.edge(tuple(e)) for e in edges]))
