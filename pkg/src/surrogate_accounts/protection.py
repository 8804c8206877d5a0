"""Protected-account generation and the oracles that check it."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import Edge, Mark, SensitiveGraph, SurrogateSpec, default_info_score, null_surrogate

PRESERVED = "preserved"
SURROGATE = "surrogate"
ORIGINAL = "original"


@dataclass(frozen=True)
class AccountNode:
    id: str
    origin: str
    kind: str  # ORIGINAL or SURROGATE
    features: Mapping[str, str]
    lowest: str
    info_score: float = 1.0
    is_null: bool = False

    def __post_init__(self):
        object.__setattr__(self, "features", MappingProxyType(dict(self.features)))


@dataclass(frozen=True)
class ProtectedAccount:
    nodes: Mapping[str, AccountNode]
    edges: Mapping[Edge, str]
    predicate: str
    source: SensitiveGraph = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        object.__setattr__(self, "edges", MappingProxyType(dict(self.edges)))
        by_origin: dict[str, str] = {}
        for nid, node in self.nodes.items():
            by_origin.setdefault(node.origin, nid)
        object.__setattr__(self, "by_origin", MappingProxyType(by_origin))

    def account_id(self, origin: str) -> str | None:
        return self.by_origin.get(origin)

    def edges_of_kind(self, kind: str) -> list[Edge]:
        return [e for e, k in self.edges.items() if k == kind]

    def summary(self) -> dict[str, int]:
        kinds = [n.kind for n in self.nodes.values()]
        return {
            "kept": kinds.count(ORIGINAL),
            "surrogated": kinds.count(SURROGATE),
            "omitted": len(self.source.nodes) - len(self.nodes),
            "preserved": len(self.edges_of_kind(PRESERVED)),
            "surrogate_edges": len(self.edges_of_kind(SURROGATE)),
        }


@dataclass(frozen=True)
class GenerationConfig:
    auto_null: bool = False


@dataclass(frozen=True)
class PotentialEdge:
    edge: Edge
    classification: Mark  # VISIBLE or SURROGATE


def mark_edges(g: SensitiveGraph, p: str) -> list[PotentialEdge]:
    src_m, dst_m = g.incidence_marks(p)
    out = []
    for e, a, b in zip(g.edges, src_m, dst_m):
        if a == Mark.VISIBLE and b == Mark.VISIBLE:
            out.append(PotentialEdge(e, Mark.VISIBLE))
        elif a != Mark.HIDE and b != Mark.HIDE:
            out.append(PotentialEdge(e, Mark.SURROGATE))
    return out


def choose_surrogate(g: SensitiveGraph, node: str, p: str) -> SurrogateSpec | None:
    """Registered surrogate visible via ``p`` with the most dominant lowest predicate.

    Incomparable candidates are ranked by infoScore, then by surrogate id.
    """
    lat = g.lattice
    rec = g.nodes[node]
    visible = [s for s in g.surrogates.get(node, ()) if lat.dominates(p, s.lowest)]
    if not visible:
        return None
    top = [s for s in visible if not any(lat.strictly_dominates(t.lowest, s.lowest) for t in visible)]
    return min(top, key=lambda s: (-default_info_score(rec, s), s.id))


def _account_nodes(g: SensitiveGraph, p: str, cfg: GenerationConfig) -> dict[str, AccountNode]:
    nodes: dict[str, AccountNode] = {}
    for nid, rec in g.nodes.items():
        if g.visible_via(nid, p):
            nodes[nid] = AccountNode(nid, nid, ORIGINAL, rec.features, rec.lowest, 1.0)
            continue
        spec = choose_surrogate(g, nid, p)
        if spec is None and cfg.auto_null:
            spec = null_surrogate(nid)
        if spec is None:
            continue
        nodes[spec.id] = AccountNode(
            spec.id, nid, SURROGATE, spec.features, spec.lowest, default_info_score(rec, spec), spec.is_null
        )
    return nodes


def generate_protected_account(
    g: SensitiveGraph, p: str, cfg: GenerationConfig | None = None, backend: str | None = None
) -> ProtectedAccount:
    """Most informative account of ``g`` for consumers holding ``p``.

    Nodes visible via ``p`` are kept as they are, others are replaced by their most
    dominant visible surrogate (or dropped). Visible/Visible edges between kept
    nodes are preserved. Surrogate edges then summarise walks that carry no Hide
    incidence, leave the source through a Visible incidence and enter the target
    through a Visible incidence. Pairs already joined by an original edge that is
    not Visible at both ends are never joined.
    """
    cfg = cfg or GenerationConfig()
    g.lattice.check(p)
    nodes = _account_nodes(g, p, cfg)
    by_origin = {node.origin: nid for nid, node in nodes.items()}

    n = len(g.nodes)
    ids = list(g.nodes)
    present = np.array([nid in by_origin for nid in ids], dtype=bool)
    src_m, dst_m = g.incidence_marks(p)
    src, dst = g.edge_src, g.edge_dst

    visible = (src_m == Mark.VISIBLE) & (dst_m == Mark.VISIBLE)
    usable = (src_m != Mark.HIDE) & (dst_m != Mark.HIDE)
    keep = visible & present[src] & present[dst]

    adj = np.zeros((n, n), dtype=bool)
    adj[src[keep], dst[keep]] = True
    # a pair whose direct edge is protected in any way gets no surrogate edge:
    # the account would otherwise show the protected edge itself
    blocked = np.zeros((n, n), dtype=bool)
    blocked[src[~visible], dst[~visible]] = True

    pairs = _kernels.surrogate_edges(
        n,
        src[usable],
        dst[usable],
        (src_m == Mark.VISIBLE)[usable],
        (dst_m == Mark.VISIBLE)[usable],
        present,
        blocked,
        adj,
        backend=backend,
    )

    edges: dict[Edge, str] = {}
    for i in np.flatnonzero(keep):
        edges[(by_origin[ids[src[i]]], by_origin[ids[dst[i]]])] = PRESERVED
    for a, b in pairs:
        edges[(by_origin[ids[a]], by_origin[ids[b]])] = SURROGATE
    return ProtectedAccount(nodes, edges, p, g)


def generate_hide_only(g: SensitiveGraph, p: str, protected_edges: Iterable[Edge] = ()) -> ProtectedAccount:
    """Naive baseline: visible nodes only, Visible/Visible edges only, no surrogates.

    ``protected_edges`` are dropped as if both incidences were marked Hide.
    """
    g.lattice.check(p)
    dropped = np.zeros(len(g.edges), dtype=bool)
    for e in protected_edges:
        e = tuple(e)
        if e not in g.edge_index:
            raise ValidationError(f"protected edge {e[0]}->{e[1]} is not in the graph")
        dropped[g.edge_index[e]] = True
    nodes = {
        nid: AccountNode(nid, nid, ORIGINAL, rec.features, rec.lowest, 1.0)
        for nid, rec in g.nodes.items()
        if g.visible_via(nid, p)
    }
    ids = list(g.nodes)
    present = np.array([nid in nodes for nid in ids], dtype=bool)
    src_m, dst_m = g.incidence_marks(p)
    src, dst = g.edge_src, g.edge_dst
    keep = (src_m == Mark.VISIBLE) & (dst_m == Mark.VISIBLE) & present[src] & present[dst] & ~dropped
    edges = {(ids[src[i]], ids[dst[i]]): PRESERVED for i in np.flatnonzero(keep)}
    return ProtectedAccount(nodes, edges, p, g)


# --------------------------------------------------------------------------
# oracles


def _marks_at(g: SensitiveGraph, node: str, edge: Edge, hw: Iterable[str]) -> set[Mark]:
    return {g.markings.get(node, edge, h) for h in hw}


def is_hw_permitted_path(g: SensitiveGraph, path: Sequence[str], hw: Iterable[str]) -> bool:
    """Whether ``path`` may be summarised for a consumer holding the high-water set ``hw``.

    Markings are read at the members of ``hw``: no incidence on the path may be
    Hide, both end incidences must be Visible, and a direct edge between the
    ends (if any) must be Visible at both incidences.
    """
    hw = [g.lattice.check(h) for h in hw]
    if len(path) < 2:
        raise ValidationError("a path needs at least one edge")
    edges = list(zip(path, path[1:]))
    for e in edges:
        if not g.has_edge(*e):
            raise ValidationError(f"{e[0]}->{e[1]} is not an edge of the graph")
    for e in edges:
        if Mark.HIDE in _marks_at(g, e[0], e, hw) or Mark.HIDE in _marks_at(g, e[1], e, hw):
            return False
    first, last = edges[0], edges[-1]
    if Mark.VISIBLE not in _marks_at(g, path[0], first, hw):
        return False
    if Mark.VISIBLE not in _marks_at(g, path[-1], last, hw):
        return False
    direct = (path[0], path[-1])
    if len(edges) > 1 and g.has_edge(*direct):
        if Mark.VISIBLE not in _marks_at(g, direct[0], direct, hw):
            return False
        if Mark.VISIBLE not in _marks_at(g, direct[1], direct, hw):
            return False
    return True


def _account_reach(acct: ProtectedAccount) -> tuple[list[str], np.ndarray]:
    ids = list(acct.nodes)
    pos = {nid: i for i, nid in enumerate(ids)}
    src = [pos[a] for a, _ in acct.edges]
    dst = [pos[b] for _, b in acct.edges]
    return ids, _kernels.reachability(len(ids), src, dst)


@dataclass
class SoundnessReport:
    correspondence: list[str] = field(default_factory=list)
    path_violations: list[Edge] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.correspondence and not self.path_violations


def verify_protected_account(acct: ProtectedAccount) -> SoundnessReport:
    """Check the account's node correspondence and that every account path exists in the source."""
    g = acct.source
    report = SoundnessReport()
    seen: dict[str, str] = {}
    for nid, node in acct.nodes.items():
        if node.origin not in g.nodes:
            report.correspondence.append(f"{nid}: origin {node.origin!r} is not in the source graph")
            continue
        if node.origin in seen:
            report.correspondence.append(f"{nid}: origin {node.origin!r} already represented by {seen[node.origin]}")
        seen[node.origin] = nid
        if node.kind == ORIGINAL:
            if dict(node.features) != dict(g.nodes[node.origin].features):
                report.correspondence.append(f"{nid}: features differ from original {node.origin!r}")
        elif not node.is_null and nid not in {s.id for s in g.surrogates.get(node.origin, ())}:
            report.correspondence.append(f"{nid}: not a registered surrogate of {node.origin!r}")
    for a, b in acct.edges:
        for end in (a, b):
            if end not in acct.nodes:
                report.correspondence.append(f"edge {a}->{b} references missing account node {end!r}")
    if report.correspondence:
        return report

    ids, reach = _account_reach(acct)
    g_reach = _kernels.reachability(len(g.nodes), g.edge_src, g.edge_dst)
    origin_idx = [g.index[acct.nodes[nid].origin] for nid in ids]
    for i, j in zip(*np.nonzero(reach)):
        if i != j and not g_reach[origin_idx[i], origin_idx[j]]:
            report.path_violations.append((ids[i], ids[j]))
    report.path_violations.sort()
    return report


@dataclass
class MaximalityReport:
    node_visibility: list[str] = field(default_factory=list)
    dominant_surrogacy: list[str] = field(default_factory=list)
    connectivity: list[Edge] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)
    connectivity_checked: bool = False

    @property
    def ok(self) -> bool:
        return not (self.node_visibility or self.dominant_surrogacy or self.connectivity)


def permitted_pairs(g: SensitiveGraph, hw: Iterable[str]) -> set[Edge]:
    """All ordered node pairs joined by at least one HW-permitted simple path (brute force)."""
    hw = list(hw)
    out: dict[str, list[str]] = {nid: [] for nid in g.nodes}
    for a, b in g.edges:
        out[a].append(b)

    def hidden(e: Edge) -> bool:
        return Mark.HIDE in _marks_at(g, e[0], e, hw) or Mark.HIDE in _marks_at(g, e[1], e, hw)

    def direct_ok(a: str, b: str) -> bool:
        e = (a, b)
        if not g.has_edge(a, b):
            return True
        return Mark.VISIBLE in _marks_at(g, a, e, hw) and Mark.VISIBLE in _marks_at(g, b, e, hw)

    found: set[Edge] = set()
    for start in g.nodes:
        path = [start]
        on_path = {start}

        def walk(u: str) -> None:
            for w in out[u]:
                e = (u, w)
                if w in on_path or hidden(e):
                    continue
                if len(path) == 1 and Mark.VISIBLE not in _marks_at(g, start, e, hw):
                    continue
                if (start, w) not in found and Mark.VISIBLE in _marks_at(g, w, e, hw):
                    if len(path) == 1 or direct_ok(start, w):
                        found.add((start, w))
                path.append(w)
                on_path.add(w)
                walk(w)
                path.pop()
                on_path.discard(w)

        walk(start)
    return found


def verify_maximally_informative(
    acct: ProtectedAccount, hw: Iterable[str] | None = None, max_nodes: int = 12
) -> MaximalityReport:
    g = acct.source
    lat = g.lattice
    hw = sorted(hw) if hw is not None else [acct.predicate]
    report = MaximalityReport()

    for nid, rec in g.nodes.items():
        if any(lat.dominates(h, rec.lowest) for h in hw):
            node = acct.nodes.get(nid)
            if node is None or node.kind != ORIGINAL or dict(node.features) != dict(rec.features):
                report.node_visibility.append(nid)
            continue
        aid = acct.account_id(nid)
        if aid is None:
            continue
        chosen = acct.nodes[aid]
        for s in g.surrogates.get(nid, ()):
            if any(lat.dominates(h, s.lowest) for h in hw) and lat.strictly_dominates(s.lowest, chosen.lowest):
                report.dominant_surrogacy.append(f"{aid} for {nid}: {s.id} ({s.lowest}) dominates {chosen.lowest}")

    if len(g.nodes) > max_nodes:
        report.notices.append(
            f"connectivity check skipped: {len(g.nodes)} nodes exceeds the enumeration bound of {max_nodes}"
        )
        return report
    report.connectivity_checked = True
    ids, reach = _account_reach(acct)
    pos = {nid: i for i, nid in enumerate(ids)}
    for a, b in sorted(permitted_pairs(g, hw)):
        ia, ib = acct.account_id(a), acct.account_id(b)
        if ia is None or ib is None:
            continue
        if not reach[pos[ia], pos[ib]]:
            report.connectivity.append((a, b))
    return report
