"""Small random sensitive graphs for property testing and fuzzing.

Everything is drawn from a caller-supplied ``numpy.random.Generator`` so a
failing case can be replayed from its seed.
"""

from __future__ import annotations

import numpy as np

from ..graph import Mark, NodeRecord, SensitiveGraph, SurrogateSpec
from ..lattice import PUBLIC, PrivilegeLattice


def random_lattice(rng: np.random.Generator, extra: int = 3, link_prob: float = 0.5) -> PrivilegeLattice:
    """Public plus ``extra`` predicates; ``P{i}`` may dominate ``P{j}`` only for ``i > j``."""
    names = [f"P{i}" for i in range(1, extra + 1)]
    pairs = [(names[i], names[j]) for i in range(extra) for j in range(i) if rng.random() < link_prob]
    return PrivilegeLattice([PUBLIC, *names], pairs)


def random_sensitive_graph(
    rng: np.random.Generator,
    n_nodes: int,
    *,
    edge_prob: float = 0.3,
    lattice: PrivilegeLattice | None = None,
    max_surrogates: int = 2,
    mark_probs: tuple[float, float, float] = (0.6, 0.25, 0.15),
    public_share: float = 0.4,
) -> SensitiveGraph:
    """Random directed graph with random lowest predicates, surrogates and markings.

    ``mark_probs`` weights Visible, Surrogate and Hide for every explicit
    (incidence, predicate) entry. Surrogate infoScores grow with the number of
    predicates below the surrogate's lowest, so the monotonicity rule holds.
    """
    lat = lattice or random_lattice(rng)
    preds = list(lat.predicates)
    secret = [p for p in preds if p != PUBLIC]
    ids = [f"n{i}" for i in range(n_nodes)]

    nodes = []
    for nid in ids:
        if not secret or rng.random() < public_share:
            low = PUBLIC
        else:
            low = secret[rng.integers(len(secret))]
        nodes.append(NodeRecord(nid, {"label": nid}, low))

    edges = [(a, b) for a in ids for b in ids if a != b and rng.random() < edge_prob]

    probs = np.asarray(mark_probs, dtype=float)
    probs = probs / probs.sum()
    codes = (Mark.VISIBLE, Mark.SURROGATE, Mark.HIDE)
    markings = {}
    for e in edges:
        for node in e:
            for p in preds:
                mark = codes[rng.choice(3, p=probs)]
                if mark != Mark.VISIBLE:
                    markings[(node, e, p)] = mark

    scale = len(preds) + 1
    surrogates = {}
    for rec in nodes:
        if rec.lowest == PUBLIC or max_surrogates == 0:
            continue
        allowed = [p for p in preds if not lat.dominates(p, rec.lowest)]
        count = int(rng.integers(0, max_surrogates + 1))
        specs = []
        for k in range(count):
            low = allowed[rng.integers(len(allowed))]
            score = (len(lat.dominated_by(low)) - 1 + 0.5 * rng.random()) / scale
            specs.append(SurrogateSpec(f"{rec.id}'{k}", {"label": f"{rec.id} (redacted)"}, low, round(score, 6)))
        if specs:
            surrogates[rec.id] = specs
    return SensitiveGraph(lat, nodes, edges, markings, surrogates)
