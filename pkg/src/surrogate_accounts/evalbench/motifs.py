"""The seven classic motifs used to compare surrogating against hiding.

Every motif is a small all-Public graph with one designated protected edge,
listed first. The lattice is the two-level experiment lattice
so the runner can protect that edge through markings alone.
"""

from __future__ import annotations

import enum

from ..graph import Edge, NodeRecord, SensitiveGraph
from ..lattice import PUBLIC, PrivilegeLattice

SECRET = "Secret"
EXPERIMENT_LATTICE = PrivilegeLattice([PUBLIC, SECRET], [(SECRET, PUBLIC)])


class MotifKind(str, enum.Enum):
    STAR = "star"
    CHAIN = "chain"
    LATTICE = "lattice"
    DIAMOND = "diamond"
    TREE = "tree"
    INVERTED_TREE = "inverted-tree"
    BIPARTITE = "bipartite"


_EDGES: dict[MotifKind, tuple[Edge, ...]] = {
    # protected edge first; the rest in reading order
    MotifKind.STAR: (("l1", "hub"), ("l2", "hub"), ("hub", "l3"), ("hub", "l4")),
    MotifKind.CHAIN: (("b", "c"), ("a", "b"), ("c", "d"), ("d", "e")),
    # a reaches d both through b and directly, so losing a->b costs nothing
    MotifKind.LATTICE: (("a", "b"), ("a", "c"), ("a", "d"), ("b", "d"), ("c", "d")),
    MotifKind.DIAMOND: (("t", "a"), ("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")),
    MotifKind.TREE: (("r", "x"), ("r", "y"), ("x", "x1"), ("y", "y1")),
    MotifKind.INVERTED_TREE: (("a", "x"), ("b", "x"), ("x", "r"), ("c", "a")),
    # two levels only: nothing lies past v1 for a surrogate edge to reach
    MotifKind.BIPARTITE: (("u1", "v1"), ("u1", "v2"), ("u2", "v1"), ("u2", "v2")),
}


def motif_edges(kind: MotifKind | str) -> tuple[Edge, ...]:
    return _EDGES[MotifKind(kind)]


def protected_edge(kind: MotifKind | str) -> Edge:
    return _EDGES[MotifKind(kind)][0]


def gen_motif(kind: MotifKind | str) -> SensitiveGraph:
    """The motif as an unmarked graph; the experiment runner applies the protection."""
    edges = motif_edges(kind)
    ids = list(dict.fromkeys(n for e in edges for n in e))
    nodes = [NodeRecord(nid, {"label": nid}, PUBLIC) for nid in ids]
    return SensitiveGraph(EXPERIMENT_LATTICE, nodes, edges)
