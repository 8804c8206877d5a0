"""Seeded synthetic graphs with a tunable number of connected pairs.

A graph starts as a random spanning arborescence over a random node order,
which keeps it weakly connected, and then gains random directed edges until
the mean number of other nodes reachable from a node lands within 5% of the
target. Reachability follows edge direction: ignoring direction, every node of
a weakly connected graph is connected to every other one, so that count could
not be tuned at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleSpecError, ValidationError
from ..graph import Edge, NodeRecord, SensitiveGraph
from ..lattice import PUBLIC
from .motifs import EXPERIMENT_LATTICE

TOLERANCE = 0.05


@dataclass(frozen=True)
class SynthSpec:
    node_count: int = 200
    connected_pairs: float = 30.0
    protected_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.node_count < 2:
            raise ValidationError("node_count must be at least 2")
        if not 0.0 <= self.protected_fraction <= 1.0:
            raise ValidationError("protected_fraction must lie in [0, 1]")
        if self.connected_pairs < 0:
            raise ValidationError("connected_pairs must be non-negative")
        if self.seed < 0:
            raise ValidationError("seed must be an unsigned integer")


@dataclass(frozen=True)
class SynthGraph:
    spec: SynthSpec
    graph: SensitiveGraph
    protected: tuple[Edge, ...]
    connected_pairs: float


def mean_connected_pairs(g: SensitiveGraph) -> float:
    """Mean number of nodes reachable from a node along directed edges."""
    from .._kernels import reachability

    reach = reachability(len(g.nodes), g.edge_src, g.edge_dst)
    np.fill_diagonal(reach, False)
    return float(reach.sum() / len(g.nodes))


def _grow(n: int, target: float, rng: np.random.Generator, max_attempts: int) -> tuple[list[tuple[int, int]], float]:
    # positions in the random order; tree edges point from lower to higher rank
    edges = []
    reach = np.zeros((n, n), dtype=bool)
    for child in range(1, n):
        parent = int(rng.integers(child))
        edges.append((parent, child))
        # the child is a fresh leaf, so only the parent and its ancestors gain it
        anc = reach[:, parent].copy()
        anc[parent] = True
        reach[anc, child] = True
    present = np.zeros((n, n), dtype=bool)
    present[tuple(np.array(edges).T)] = True

    lo, hi = target * (1 - TOLERANCE), target * (1 + TOLERANCE)
    total = int(reach.sum())
    attempts = 0
    while total < lo * n:
        attempts += 1
        if attempts > max_attempts:
            break
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if present[u, v] or reach[u, v]:
            continue  # already reachable: the edge would not change the count
        anc = reach[:, u].copy()
        anc[u] = True
        gain = reach[v].copy()
        gain[v] = True
        new = np.logical_and.outer(anc, gain) & ~reach
        np.fill_diagonal(new, False)  # closing a cycle makes no node its own pair
        added = int(new.sum())
        if total + added > hi * n:
            continue
        reach |= new
        total += added
        present[u, v] = True
        edges.append((u, v))
    return edges, total / n


def gen_synthetic(spec: SynthSpec, max_attempts: int = 200_000) -> SynthGraph:
    """Build the graph for ``spec`` and sample its protected edges uniformly without replacement."""
    n = spec.node_count
    if spec.connected_pairs > n - 1:
        raise InfeasibleSpecError(f"{spec}: at most {n - 1} connected pairs per node are possible")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    edges, measured = _grow(n, spec.connected_pairs, rng, max_attempts)
    if abs(measured - spec.connected_pairs) > TOLERANCE * spec.connected_pairs:
        raise InfeasibleSpecError(f"{spec}: reached {measured:.2f} connected pairs per node after {max_attempts} attempts")

    ids = [f"v{i:03d}" for i in range(n)]
    name = [ids[i] for i in order]
    nodes = [NodeRecord(nid, {"label": nid}, PUBLIC) for nid in ids]
    edge_ids = sorted((name[u], name[v]) for u, v in edges)
    g = SensitiveGraph(EXPERIMENT_LATTICE, nodes, edge_ids)

    # a prefix of one permutation: specs differing only in the fraction share the
    # graph and get nested protected sets
    k = int(round(spec.protected_fraction * len(edge_ids)))
    pick = np.sort(rng.permutation(len(edge_ids))[:k])
    protected = tuple(edge_ids[i] for i in pick)
    return SynthGraph(spec, g, protected, measured)
