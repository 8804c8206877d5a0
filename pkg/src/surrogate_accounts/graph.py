"""Sensitive graphs: nodes with lowest predicates, surrogates and incidence markings."""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import UnknownPredicateError, ValidationError
from .lattice import PUBLIC, PrivilegeLattice

log = logging.getLogger(__name__)

Edge = tuple[str, str]


class Mark(enum.IntEnum):
    # integer codes are what the kernels see
    VISIBLE = 0
    SURROGATE = 1
    HIDE = 2

    @classmethod
    def parse(cls, text: str | Mark) -> Mark:
        if isinstance(text, Mark):
            return text
        try:
            return {"visible": cls.VISIBLE, "surrogate": cls.SURROGATE, "hide": cls.HIDE}[text.lower()]
        except (KeyError, AttributeError):
            raise ValidationError(f"unknown marking {text!r}") from None

    @property
    def label(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class NodeRecord:
    id: str
    features: Mapping[str, str]
    lowest: str = PUBLIC

    def __post_init__(self):
        object.__setattr__(self, "features", MappingProxyType(dict(self.features)))


@dataclass(frozen=True)
class SurrogateSpec:
    id: str
    features: Mapping[str, str]
    lowest: str = PUBLIC
    info_score: float | None = None
    is_null: bool = False

    def __post_init__(self):
        object.__setattr__(self, "features", MappingProxyType(dict(self.features)))
        if self.is_null:
            if self.features:
                raise ValidationError(f"null surrogate {self.id!r} must not carry features")
            if self.info_score not in (None, 0.0):
                raise ValidationError(f"null surrogate {self.id!r} has infoScore 0 by definition")
        if self.info_score is not None and not 0.0 <= self.info_score <= 1.0:
            raise ValidationError(f"infoScore of {self.id!r} outside [0, 1]")


def null_surrogate(original: str) -> SurrogateSpec:
    return SurrogateSpec(id=f"{original}~null", features={}, lowest=PUBLIC, info_score=0.0, is_null=True)


def default_info_score(original: NodeRecord, surrogate: SurrogateSpec) -> float:
    """Explicit score if assigned, else the share of the original's features kept verbatim."""
    if surrogate.info_score is not None:
        return float(surrogate.info_score)
    if surrogate.is_null:
        return 0.0
    orig = original.features
    if not orig:
        return 1.0 if not surrogate.features else 0.0
    same = sum(1 for k, v in surrogate.features.items() if orig.get(k) == v)
    return same / len(orig)


@dataclass(frozen=True)
class MarkingTable:
    entries: Mapping[tuple[str, Edge, str], Mark] = field(default_factory=dict)
    default: Mark = Mark.VISIBLE

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def get(self, node: str, edge: Edge, predicate: str) -> Mark:
        return self.entries.get((node, edge, predicate), self.default)


class SensitiveGraph:
    """A directed graph plus everything needed to protect it.

    Values are validated on construction and never mutated afterwards; use
    :meth:`replace` to derive a variant.
    """

    def __init__(
        self,
        lattice: PrivilegeLattice,
        nodes: Iterable[NodeRecord],
        edges: Iterable[Edge],
        markings: Mapping[tuple[str, Edge, str], Mark | str] | None = None,
        surrogates: Mapping[str, Iterable[SurrogateSpec]] | None = None,
        default_marking: Mark | str = Mark.VISIBLE,
    ):
        self.lattice = lattice
        node_map: dict[str, NodeRecord] = {}
        for rec in nodes:
            if rec.id in node_map:
                raise ValidationError(f"duplicate node id {rec.id!r}")
            lattice.check(rec.lowest, f"lowest of node {rec.id!r}")
            node_map[rec.id] = rec
        self.nodes: Mapping[str, NodeRecord] = MappingProxyType(node_map)

        edge_list: list[Edge] = []
        seen: set[Edge] = set()
        for src, dst in edges:
            e = (src, dst)
            for end in e:
                if end not in node_map:
                    raise ValidationError(f"edge {src}->{dst} references undeclared node {end!r}")
            if src == dst:
                raise ValidationError(f"self-loop on {src!r}")
            if e in seen:
                raise ValidationError(f"duplicate edge {src}->{dst}")
            seen.add(e)
            edge_list.append(e)
        self.edges: tuple[Edge, ...] = tuple(edge_list)
        self._edge_set = frozenset(seen)
        self.edge_index: Mapping[Edge, int] = MappingProxyType({e: i for i, e in enumerate(edge_list)})

        table: dict[tuple[str, Edge, str], Mark] = {}
        for (node, edge, pred), mark in (markings or {}).items():
            edge = tuple(edge)
            lattice.check(pred, f"marking on {node!r}")
            if edge not in self._edge_set:
                raise ValidationError(f"marking references missing edge {edge[0]}->{edge[1]}")
            if node not in edge:
                raise ValidationError(f"marking node {node!r} is not an endpoint of {edge[0]}->{edge[1]}")
            table[(node, edge, pred)] = Mark.parse(mark)
        self.markings = MarkingTable(table, Mark.parse(default_marking))

        registry: dict[str, tuple[SurrogateSpec, ...]] = {}
        taken = set(node_map)
        for original, specs in (surrogates or {}).items():
            if original not in node_map:
                raise ValidationError(f"surrogate registered for undeclared node {original!r}")
            specs = tuple(specs)
            for s in specs:
                lattice.check(s.lowest, f"surrogate {s.id!r}")
                if s.id in taken:
                    raise ValidationError(f"surrogate id {s.id!r} collides with another id")
                taken.add(s.id)
            registry[original] = specs
        self.surrogates: Mapping[str, tuple[SurrogateSpec, ...]] = MappingProxyType(registry)
        self._check_surrogates()

        self.index = {nid: i for i, nid in enumerate(node_map)}
        src = np.fromiter((self.index[s] for s, _ in self.edges), dtype=np.int64, count=len(self.edges))
        dst = np.fromiter((self.index[d] for _, d in self.edges), dtype=np.int64, count=len(self.edges))
        self.edge_src, self.edge_dst = src, dst
        self._mark_cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def _check_surrogates(self) -> None:
        lat = self.lattice
        for original, specs in self.surrogates.items():
            rec = self.nodes[original]
            for s in specs:
                if lat.dominates(s.lowest, rec.lowest):
                    raise ValidationError(
                        f"surrogate {s.id!r} has lowest {s.lowest!r} dominating the original's {rec.lowest!r}"
                    )
            for a in specs:
                for b in specs:
                    if lat.strictly_dominates(a.lowest, b.lowest):
                        if default_info_score(rec, a) < default_info_score(rec, b):
                            raise ValidationError(
                                f"infoScore of {a.id!r} is below that of {b.id!r} although its lowest dominates"
                            )

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.nodes)

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self._edge_set

    def visible_via(self, node: str, p: str) -> bool:
        return self.lattice.dominates(p, self.nodes[node].lowest)

    def mark_of(self, node: str, edge: Edge, p: str) -> Mark:
        edge = tuple(edge)
        if node not in edge:
            raise ValidationError(f"{node!r} is not an endpoint of {edge[0]}->{edge[1]}")
        if edge not in self._edge_set:
            raise ValidationError(f"no edge {edge[0]}->{edge[1]}")
        self.lattice.check(p)
        return self.markings.get(node, edge, p)

    def incidence_marks(self, p: str) -> tuple[np.ndarray, np.ndarray]:
        """Per-edge (source-side, target-side) mark codes at ``p``, aligned with ``self.edges``."""
        if p not in self._mark_cache:
            self.lattice.check(p)
            table = self.markings
            src = np.full(len(self.edges), int(table.default), dtype=np.int8)
            dst = src.copy()
            for (node, edge, pred), mark in table.entries.items():
                if pred != p:
                    continue
                i = self.edge_index[edge]
                if node == edge[0]:
                    src[i] = mark
                else:
                    dst[i] = mark
            src.flags.writeable = False
            dst.flags.writeable = False
            self._mark_cache[p] = (src, dst)
        return self._mark_cache[p]

    def replace(self, **changes) -> SensitiveGraph:
        kw = dict(
            lattice=self.lattice,
            nodes=self.nodes.values(),
            edges=self.edges,
            markings=self.markings.entries,
            surrogates=self.surrogates,
            default_marking=self.markings.default,
        )
        kw.update(changes)
        return SensitiveGraph(**kw)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SensitiveGraph):
            return NotImplemented
        return (
            self.lattice == other.lattice
            and dict(self.nodes) == dict(other.nodes)
            and set(self.edges) == set(other.edges)
            and dict(self.markings.entries) == dict(other.markings.entries)
            and self.markings.default == other.markings.default
            and _registry_key(self.surrogates) == _registry_key(other.surrogates)
        )

    def __repr__(self) -> str:
        return f"SensitiveGraph(nodes={len(self.nodes)}, edges={len(self.edges)})"


def _registry_key(registry: Mapping[str, tuple[SurrogateSpec, ...]]) -> dict:
    return {k: sorted(v, key=lambda s: s.id) for k, v in registry.items() if v}


def mark_of(g: SensitiveGraph, node: str, edge: Edge, p: str) -> Mark:
    return g.mark_of(node, edge, p)


def high_water_set(g: SensitiveGraph) -> frozenset[str]:
    """Lowest predicates of all nodes, minus any dominated by another of them."""
    return frozenset(g.lattice.maximal(rec.lowest for rec in g.nodes.values()))


def is_high_water_set(g: SensitiveGraph, hw: Iterable[str]) -> bool:
    hw = set(hw)
    lat = g.lattice
    lowests = {rec.lowest for rec in g.nodes.values()}
    antichain = not any(lat.strictly_dominates(a, b) for a in hw for b in hw)
    covers = all(any(lat.dominates(h, low) for h in hw) for low in lowests)
    return antichain and covers and hw <= lowests


def lint_markings(g: SensitiveGraph) -> list[str]:
    """Warn where a predicate sees Visible while a predicate dominating it sees Hide."""
    lat = g.lattice
    warnings = []
    by_incidence: dict[tuple[str, Edge], dict[str, Mark]] = {}
    for (node, edge, pred), mark in g.markings.entries.items():
        by_incidence.setdefault((node, edge), {})[pred] = mark
    for (node, edge), per_pred in sorted(by_incidence.items()):
        for weak in lat.predicates:
            if g.markings.get(node, edge, weak) != Mark.VISIBLE:
                continue
            for strong, mark in per_pred.items():
                if mark == Mark.HIDE and lat.strictly_dominates(strong, weak):
                    msg = (
                        f"{node} on {edge[0]}->{edge[1]}: Visible at {weak!r} "
                        f"but Hide at dominating {strong!r}"
                    )
                    warnings.append(msg)
                    log.debug(msg)
    return warnings


__all__ = [
    "Edge",
    "Mark",
    "MarkingTable",
    "NodeRecord",
    "SensitiveGraph",
    "SurrogateSpec",
    "UnknownPredicateError",
    "default_info_score",
    "high_water_set",
    "is_high_water_set",
    "lint_markings",
    "mark_of",
    "null_surrogate",
]
