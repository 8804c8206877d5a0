"""JSON interchange format for sensitive graphs, protected accounts and opacity configs.

Graph file::

    {
      "format_version": 1,
      "lattice":   {"predicates": [...], "dominance": [["stronger", "weaker"], ...]},
      "nodes":     [{"id": "a", "features": {"k": "v"}, "lowest": "Public"}, ...],
      "edges":     [{"src": "a", "dst": "b"}, ...],
      "markings":  [{"node": "a", "edge": ["a", "b"], "predicate": "P", "mark": "Hide"}, ...],
      "surrogates":[{"original": "a", "id": "a'", "features": {}, "lowest": "Public",
                     "info_score": 0.5, "null": false}, ...],
      "defaults":  {"default_marking": "Visible"}
    }

An account file adds ``"predicate"`` and ``"correspondence"`` (``id``, ``origin``,
``kind``) sections and a ``kind`` on each edge. Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

from .errors import CorrespondenceError, FormatError, SurrogateError, ValidationError
from .graph import Mark, NodeRecord, SensitiveGraph, SurrogateSpec, default_info_score
from .lattice import PrivilegeLattice
from .metrics import OpacityConfig
from .protection import ORIGINAL, PRESERVED, SURROGATE, AccountNode, ProtectedAccount, verify_protected_account

FORMAT_VERSION = 1

_GRAPH_KEYS = {"format_version", "lattice", "nodes", "edges", "markings", "surrogates", "defaults"}
_ACCOUNT_KEYS = _GRAPH_KEYS | {"predicate", "correspondence"}


def _obj(value: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(value, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = set(value) - required - set(optional)
    if unknown:
        raise FormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(value)
    if missing:
        raise FormatError(f"{where}: missing field(s) {sorted(missing)}")
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list")
    return value


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise FormatError(f"{where}: expected a string")
    return value


def _features(value: Any, where: str) -> dict[str, str]:
    if not isinstance(value, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in value.items()):
        raise FormatError(f"{where}: features must map strings to strings")
    return value


def _mark(value: Any, where: str) -> Mark:
    try:
        return Mark.parse(_str(value, where))
    except ValidationError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _read_json(path: str | os.PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None


def graph_from_dict(doc: Any, *, account: bool = False) -> SensitiveGraph:
    keys = _ACCOUNT_KEYS if account else _GRAPH_KEYS
    doc = _obj(doc, "document", {"format_version", "lattice", "nodes", "edges"}, keys)
    if doc["format_version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc['format_version']!r}")

    lat = _obj(doc["lattice"], "lattice", {"predicates"}, {"dominance"})
    preds = [_str(p, "lattice.predicates[]") for p in _list(lat["predicates"], "lattice.predicates")]
    pairs = []
    for i, pair in enumerate(_list(lat.get("dominance", []), "lattice.dominance")):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FormatError(f"lattice.dominance[{i}]: expected [stronger, weaker]")
        pairs.append((_str(pair[0], "dominance"), _str(pair[1], "dominance")))
    lattice = PrivilegeLattice(preds, pairs)

    nodes = []
    for i, item in enumerate(_list(doc["nodes"], "nodes")):
        item = _obj(item, f"nodes[{i}]", {"id"}, {"features", "lowest"})
        nodes.append(
            NodeRecord(
                _str(item["id"], f"nodes[{i}].id"),
                _features(item.get("features", {}), f"nodes[{i}].features"),
                _str(item.get("lowest", "Public"), f"nodes[{i}].lowest"),
            )
        )

    edge_keys = {"kind"} if account else set()
    edges = []
    for i, item in enumerate(_list(doc["edges"], "edges")):
        item = _obj(item, f"edges[{i}]", {"src", "dst"}, edge_keys)
        edges.append((_str(item["src"], f"edges[{i}].src"), _str(item["dst"], f"edges[{i}].dst")))

    markings = {}
    for i, item in enumerate(_list(doc.get("markings", []), "markings")):
        item = _obj(item, f"markings[{i}]", {"node", "edge", "predicate", "mark"})
        edge = item["edge"]
        if not (isinstance(edge, list) and len(edge) == 2):
            raise FormatError(f"markings[{i}].edge: expected [src, dst]")
        key = (_str(item["node"], "node"), (_str(edge[0], "edge"), _str(edge[1], "edge")), _str(item["predicate"], "predicate"))
        if key in markings:
            raise FormatError(f"markings[{i}]: duplicate entry for {key}")
        markings[key] = _mark(item["mark"], f"markings[{i}].mark")

    surrogates: dict[str, list[SurrogateSpec]] = {}
    for i, item in enumerate(_list(doc.get("surrogates", []), "surrogates")):
        item = _obj(item, f"surrogates[{i}]", {"original", "id"}, {"features", "lowest", "info_score", "null"})
        score = item.get("info_score")
        if score is not None and not isinstance(score, (int, float)):
            raise FormatError(f"surrogates[{i}].info_score: expected a number")
        is_null = item.get("null", False)
        if not isinstance(is_null, bool):
            raise FormatError(f"surrogates[{i}].null: expected true/false")
        spec = SurrogateSpec(
            _str(item["id"], f"surrogates[{i}].id"),
            _features(item.get("features", {}), f"surrogates[{i}].features"),
            _str(item.get("lowest", "Public"), f"surrogates[{i}].lowest"),
            None if score is None else float(score),
            is_null,
        )
        surrogates.setdefault(_str(item["original"], f"surrogates[{i}].original"), []).append(spec)

    defaults = _obj(doc.get("defaults", {}), "defaults", set(), {"default_marking"})
    default_mark = _mark(defaults.get("default_marking", "Visible"), "defaults.default_marking")
    return SensitiveGraph(lattice, nodes, edges, markings, surrogates, default_mark)


def graph_to_dict(g: SensitiveGraph) -> dict:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "lattice": {
            "predicates": list(g.lattice.predicates),
            "dominance": [list(pair) for pair in g.lattice.dominance],
        },
        "nodes": [{"id": r.id, "features": dict(r.features), "lowest": r.lowest} for r in g.nodes.values()],
        "edges": [{"src": a, "dst": b} for a, b in g.edges],
    }
    if g.markings.entries:
        doc["markings"] = [
            {"node": node, "edge": list(edge), "predicate": pred, "mark": mark.label}
            for (node, edge, pred), mark in g.markings.entries.items()
        ]
    specs = []
    for original, items in g.surrogates.items():
        for s in items:
            entry: dict[str, Any] = {"original": original, "id": s.id, "features": dict(s.features), "lowest": s.lowest}
            if s.info_score is not None:
                entry["info_score"] = s.info_score
            if s.is_null:
                entry["null"] = True
            specs.append(entry)
    if specs:
        doc["surrogates"] = specs
    if g.markings.default != Mark.VISIBLE:
        doc["defaults"] = {"default_marking": g.markings.default.label}
    return doc


def load_graph(path: str | os.PathLike) -> SensitiveGraph:
    return graph_from_dict(_read_json(path))


def account_to_dict(acct: ProtectedAccount) -> dict:
    lat = acct.source.lattice
    return {
        "format_version": FORMAT_VERSION,
        "predicate": acct.predicate,
        "lattice": {"predicates": list(lat.predicates), "dominance": [list(p) for p in lat.dominance]},
        "nodes": [
            {"id": n.id, "features": dict(n.features), "lowest": n.lowest} for n in acct.nodes.values()
        ],
        "edges": [{"src": a, "dst": b, "kind": kind} for (a, b), kind in acct.edges.items()],
        "correspondence": [
            {"id": n.id, "origin": n.origin, "kind": "null" if n.is_null else n.kind} for n in acct.nodes.values()
        ],
    }


def account_from_dict(doc: Any, source: SensitiveGraph) -> ProtectedAccount:
    """Rebuild an account against its original graph; correspondence problems raise CorrespondenceError."""
    if not isinstance(doc, dict) or "predicate" not in doc or "correspondence" not in doc:
        raise FormatError("account file needs 'predicate' and 'correspondence' sections")
    shape = graph_from_dict(doc, account=True)
    predicate = _str(doc["predicate"], "predicate")
    source.lattice.check(predicate, "account predicate")
    if shape.lattice != source.lattice:
        raise CorrespondenceError("account lattice differs from the original graph's lattice")

    corr = {}
    for i, item in enumerate(_list(doc["correspondence"], "correspondence")):
        item = _obj(item, f"correspondence[{i}]", {"id", "origin", "kind"})
        corr[_str(item["id"], "id")] = (_str(item["origin"], "origin"), _str(item["kind"], "kind"))
    if set(corr) != set(shape.nodes):
        raise CorrespondenceError("correspondence section does not cover exactly the account's nodes")

    nodes = {}
    for nid, rec in shape.nodes.items():
        origin, kind = corr[nid]
        if origin not in source.nodes:
            raise CorrespondenceError(f"{nid}: origin {origin!r} is not in the original graph")
        orig = source.nodes[origin]
        if kind == ORIGINAL:
            if nid != origin or dict(rec.features) != dict(orig.features):
                raise CorrespondenceError(f"{nid}: does not match original node {origin!r}")
            nodes[nid] = AccountNode(nid, origin, ORIGINAL, rec.features, rec.lowest, 1.0)
        elif kind in (SURROGATE, "null"):
            spec = next((s for s in source.surrogates.get(origin, ()) if s.id == nid), None)
            if spec is None and kind == "null":
                spec = SurrogateSpec(nid, {}, rec.lowest, 0.0, True)
            if spec is None:
                raise CorrespondenceError(f"{nid}: not a registered surrogate of {origin!r}")
            nodes[nid] = AccountNode(
                nid, origin, SURROGATE, spec.features, spec.lowest, default_info_score(orig, spec), spec.is_null
            )
        else:
            raise FormatError(f"correspondence for {nid}: unknown kind {kind!r}")
    origins = [n.origin for n in nodes.values()]
    if len(set(origins)) != len(origins):
        raise CorrespondenceError("two account nodes correspond to the same original node")

    edges = {}
    for i, item in enumerate(doc["edges"]):
        kind = item.get("kind", PRESERVED)
        if kind not in (PRESERVED, SURROGATE):
            raise FormatError(f"edges[{i}].kind: unknown kind {kind!r}")
        edges[(item["src"], item["dst"])] = kind
    acct = ProtectedAccount(nodes, edges, predicate, source)
    report = verify_protected_account(acct)
    if not report.ok:
        problems = report.correspondence + [f"{a}->{b} has no backing path" for a, b in report.path_violations]
        raise CorrespondenceError("account is not a protected account of this graph: " + "; ".join(problems[:5]))
    return acct


def load_account(path: str | os.PathLike, source: SensitiveGraph) -> ProtectedAccount:
    return account_from_dict(_read_json(path), source)


def opacity_config_from_dict(doc: Any) -> OpacityConfig:
    doc = _obj(doc, "opacity config", set(), {"fp_steps", "pc_steps"})

    def steps(key):
        raw = _list(doc.get(key, [[1, 0.8], [None, 0.2]]), key)
        out = []
        for item in raw:
            if not (isinstance(item, list) and len(item) == 2):
                raise FormatError(f"{key}: each step is [max_value or null, probability]")
            bound = math.inf if item[0] is None else item[0]
            out.append((bound, item[1]))
        return tuple(out)

    try:
        return OpacityConfig(steps("fp_steps"), steps("pc_steps"))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"opacity config: {exc}") from None


def opacity_config_to_dict(cfg: OpacityConfig) -> dict:
    def enc(steps):
        return [[None if math.isinf(t) else t, pr] for t, pr in steps]

    return {"fp_steps": enc(cfg.fp_steps), "pc_steps": enc(cfg.pc_steps)}


def load_opacity_config(path: str | os.PathLike | None) -> OpacityConfig:
    if path is None:
        return OpacityConfig()
    return opacity_config_from_dict(_read_json(path))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory so failures never leave partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sample_path(name: str) -> Path:
    """Path of a bundled sample graph, e.g. ``sample_path("fig1a.json")``."""
    path = Path(__file__).parent / "data" / name
    if not path.is_file():
        raise FormatError(f"no bundled sample named {name!r}")
    return path


def save_graph(g: SensitiveGraph, path: str | os.PathLike) -> None:
    write_atomic(path, dumps(graph_to_dict(g)))


def save_account(acct: ProtectedAccount, path: str | os.PathLike) -> None:
    write_atomic(path, dumps(account_to_dict(acct)))


__all__ = [
    "FORMAT_VERSION",
    "SurrogateError",
    "account_from_dict",
    "account_to_dict",
    "graph_from_dict",
    "graph_to_dict",
    "load_account",
    "load_graph",
    "load_opacity_config",
    "opacity_config_from_dict",
    "opacity_config_to_dict",
    "sample_path",
    "save_account",
    "save_graph",
    "write_atomic",
]
