import logging

import numpy as np
import pytest

from surrogate_accounts import (
    PUBLIC,
    Mark,
    NodeRecord,
    PrivilegeLattice,
    SensitiveGraph,
    SurrogateSpec,
    UnknownPredicateError,
    ValidationError,
    dominates,
    high_water_set,
    is_high_water_set,
    lint_markings,
    mark_of,
    null_surrogate,
)
from surrogate_accounts.evalbench.random_graphs import random_lattice, random_sensitive_graph
from surrogate_accounts.graph import default_info_score

FIG1B = PrivilegeLattice(
    [PUBLIC, "Low-1", "Low-2", "High-1", "High-2"],
    [("High-1", "Low-1"), ("High-2", "Low-2"), ("Low-1", PUBLIC), ("Low-2", PUBLIC)],
)


def _graph(lowests, edges=(), lattice=FIG1B, **kw):
    nodes = [NodeRecord(nid, {"name": nid}, low) for nid, low in lowests.items()]
    return SensitiveGraph(lattice, nodes, edges, **kw)


# -- lattice -----------------------------------------------------------------


def test_dominates_examples():
    assert dominates(FIG1B, "High-2", "Low-2")
    assert dominates(FIG1B, PUBLIC, PUBLIC)
    assert not dominates(FIG1B, "High-1", "High-2")
    assert dominates(FIG1B, "High-1", PUBLIC)  # transitive
    assert not dominates(FIG1B, PUBLIC, "Low-1")


def test_unknown_predicate_is_named():
    with pytest.raises(UnknownPredicateError, match="Nope"):
        dominates(FIG1B, "Nope", PUBLIC)


def test_public_is_implicit_bottom():
    lat = PrivilegeLattice(["A", "B"])
    assert lat.predicates[0] == PUBLIC
    assert lat.dominates("A", PUBLIC) and lat.dominates("B", PUBLIC)
    assert not lat.dominates("A", "B")


def test_dominance_cycle_rejected():
    with pytest.raises(ValidationError, match="cycle"):
        PrivilegeLattice(["A", "B"], [("A", "B"), ("B", "A")])


def test_dominance_pair_with_unknown_name():
    with pytest.raises(UnknownPredicateError):
        PrivilegeLattice(["A"], [("A", "Z")])


@pytest.mark.parametrize("seed", range(20))
def test_random_lattices_reflexive_transitive(seed):
    lat = random_lattice(np.random.default_rng(seed), extra=5)
    preds = lat.predicates
    for p in preds:
        assert lat.dominates(p, p)
        for q in preds:
            for r in preds:
                if lat.dominates(p, q) and lat.dominates(q, r):
                    assert lat.dominates(p, r)
            if p != q:
                assert not (lat.dominates(p, q) and lat.dominates(q, p))


# -- high-water set ----------------------------------------------------------


def test_high_water_set_fig1a(samples):
    assert high_water_set(samples["fig1a"]) == {"High-1", "High-2"}


def test_high_water_set_all_public():
    g = _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")])
    assert high_water_set(g) == {PUBLIC}


def test_high_water_set_drops_dominated():
    g = _graph({"a": PUBLIC, "b": "Low-1", "c": "High-1"})
    assert high_water_set(g) == {"High-1"}


def test_is_high_water_set_rejects_bad_candidates(samples):
    g = samples["fig1a"]
    assert is_high_water_set(g, {"High-1", "High-2"})
    assert not is_high_water_set(g, {"High-1"})  # does not cover h
    assert not is_high_water_set(g, {"High-1", "High-2", "Low-1"})  # not an antichain


@pytest.mark.parametrize("seed", range(50))
def test_high_water_set_conditions_random(seed):
    g = random_sensitive_graph(np.random.default_rng(seed), 8)
    assert is_high_water_set(g, high_water_set(g))


# -- markings ----------------------------------------------------------------


def test_mark_of_examples(samples):
    g = samples["fig2b"]
    assert mark_of(g, "f", ("c", "f"), "High-2") == Mark.SURROGATE
    assert mark_of(g, "c", ("c", "f"), "High-2") == Mark.VISIBLE
    assert mark_of(g, "d", ("a", "d"), "High-2") == Mark.HIDE


def test_mark_of_requires_endpoint(samples):
    with pytest.raises(ValidationError, match="endpoint"):
        mark_of(samples["fig2b"], "g", ("c", "f"), "High-2")


def test_default_marking_configurable():
    g = _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")], default_marking="Hide")
    assert mark_of(g, "a", ("a", "b"), PUBLIC) == Mark.HIDE


def test_incidence_marks_align_with_edges(samples):
    g = samples["fig2b"]
    src, dst = g.incidence_marks("High-2")
    i = g.edge_index[("c", "f")]
    assert src[i] == Mark.VISIBLE and dst[i] == Mark.SURROGATE
    assert not src.flags.writeable


def test_lint_flags_visible_below_hide():
    g = _graph(
        {"a": PUBLIC, "b": PUBLIC},
        [("a", "b")],
        markings={("a", ("a", "b"), "High-1"): "Hide"},
    )
    warnings = lint_markings(g)
    assert len(warnings) == 2  # Low-1 and Public both see Visible
    assert all("Hide at dominating 'High-1'" in w for w in warnings)


def test_lint_logs_at_debug_only(caplog):
    g = _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")], markings={("a", ("a", "b"), "High-1"): "Hide"})
    with caplog.at_level(logging.WARNING):
        lint_markings(g)
    assert not caplog.records


# -- validation --------------------------------------------------------------


@pytest.mark.parametrize(
    "edges, message",
    [
        ([("a", "a")], "self-loop"),
        ([("a", "b"), ("a", "b")], "duplicate edge"),
        ([("a", "z")], "undeclared node"),
    ],
)
def test_edge_validation(edges, message):
    with pytest.raises(ValidationError, match=message):
        _graph({"a": PUBLIC, "b": PUBLIC}, edges)


def test_duplicate_node_rejected():
    with pytest.raises(ValidationError, match="duplicate node"):
        SensitiveGraph(FIG1B, [NodeRecord("a", {}), NodeRecord("a", {})], [])


def test_unknown_lowest_rejected():
    with pytest.raises(UnknownPredicateError, match="Top"):
        _graph({"a": "Top"})


def test_marking_must_reference_endpoint():
    with pytest.raises(ValidationError, match="not an endpoint"):
        _graph({"a": PUBLIC, "b": PUBLIC, "c": PUBLIC}, [("a", "b")], markings={("c", ("a", "b"), PUBLIC): "Hide"})


def test_marking_with_unknown_predicate():
    with pytest.raises(UnknownPredicateError, match="Ghost"):
        _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")], markings={("a", ("a", "b"), "Ghost"): "Hide"})


def test_surrogate_may_not_dominate_original():
    with pytest.raises(ValidationError, match="dominating"):
        _graph({"a": "Low-1"}, surrogates={"a": [SurrogateSpec("a'", {}, "High-1")]})


def test_surrogate_info_score_monotone():
    specs = [SurrogateSpec("a1", {}, "Low-1", 0.2), SurrogateSpec("a2", {}, PUBLIC, 0.5)]
    with pytest.raises(ValidationError, match="infoScore"):
        _graph({"a": "High-1"}, surrogates={"a": specs})


def test_surrogate_id_collision():
    with pytest.raises(ValidationError, match="collides"):
        _graph({"a": "High-1", "b": PUBLIC}, surrogates={"a": [SurrogateSpec("b", {}, PUBLIC)]})


def test_graph_is_immutable():
    g = _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")])
    with pytest.raises(TypeError):
        g.nodes["c"] = NodeRecord("c", {})
    with pytest.raises(TypeError):
        g.nodes["a"].features["x"] = "y"


def test_replace_revalidates():
    g = _graph({"a": PUBLIC, "b": PUBLIC}, [("a", "b")])
    with pytest.raises(ValidationError):
        g.replace(edges=[("a", "b"), ("b", "b")])
    assert g.replace() == g


# -- infoScore defaults ------------------------------------------------------


def test_default_info_score_examples():
    orig = NodeRecord("d", {"phone": "123-456-7890", "name": "Joe"})
    assert default_info_score(orig, SurrogateSpec("d'", {"name": "Joe"})) == 0.5
    assert default_info_score(orig, null_surrogate("d")) == 0.0
    assert default_info_score(orig, SurrogateSpec("d''", dict(orig.features))) == 1.0


def test_default_info_score_edge_cases():
    bare = NodeRecord("x", {})
    assert default_info_score(bare, SurrogateSpec("x'", {})) == 1.0
    assert default_info_score(bare, SurrogateSpec("x'", {"k": "v"})) == 0.0
    orig = NodeRecord("y", {"name": "Joe"})
    assert default_info_score(orig, SurrogateSpec("y'", {"name": "Jo"})) == 0.0  # value must match too
    assert default_info_score(orig, SurrogateSpec("y'", {}, info_score=0.7)) == 0.7


def test_info_score_range_enforced():
    with pytest.raises(ValidationError):
        SurrogateSpec("s", {}, info_score=1.5)
    with pytest.raises(ValidationError):
        SurrogateSpec("s", {"k": "v"}, is_null=True)
