"""Hypothesis-driven invariants over small random sensitive graphs."""

import json

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from surrogate_accounts import (
    PUBLIC,
    Mark,
    NodeRecord,
    PrivilegeLattice,
    SensitiveGraph,
    SurrogateSpec,
    edge_opacity,
    generate_hide_only,
    generate_protected_account,
    path_utility,
    utility_report,
    verify_maximally_informative,
    verify_protected_account,
)
from surrogate_accounts.io import graph_from_dict, graph_to_dict
from surrogate_accounts.protection import PRESERVED, SURROGATE, ProtectedAccount

LATTICE = PrivilegeLattice(
    [PUBLIC, "Low-1", "Low-2", "High-1", "High-2"],
    [("High-1", "Low-1"), ("High-2", "Low-2"), ("Low-1", PUBLIC), ("Low-2", PUBLIC)],
)
PREDS = list(LATTICE.predicates)
MARKS = [Mark.VISIBLE, Mark.VISIBLE, Mark.SURROGATE, Mark.HIDE]

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, max_nodes=8, public_only=False, unmarked=False):
    n = draw(st.integers(2, max_nodes))
    ids = [f"n{i}" for i in range(n)]
    lowest = {nid: PUBLIC if public_only else draw(st.sampled_from(PREDS)) for nid in ids}
    pairs = [(a, b) for a in ids for b in ids if a != b]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 3 * n)))
    markings = {}
    if not unmarked:
        for e in edges:
            for node in e:
                for p in draw(st.lists(st.sampled_from(PREDS), unique=True, max_size=2)):
                    markings[(node, e, p)] = draw(st.sampled_from(MARKS))
    surrogates = {}
    for nid in ids:
        low = lowest[nid]
        if low == PUBLIC or not draw(st.booleans()):
            continue
        weaker = sorted(q for q in LATTICE.dominated_by(low) if q != low)
        specs = []
        for k, q in enumerate(draw(st.lists(st.sampled_from(weaker), unique=True, min_size=1, max_size=3))):
            # a higher lowest keeps at least as much, which satisfies the monotonicity rule
            score = len(LATTICE.dominated_by(q)) / 4
            specs.append(SurrogateSpec(f"{nid}'{k}", {"name": f"{nid}?"}, q, score))
        surrogates[nid] = specs
    nodes = [NodeRecord(nid, {"name": nid}, lowest[nid]) for nid in ids]
    return SensitiveGraph(LATTICE, nodes, edges, markings, surrogates)


predicates = st.sampled_from(PREDS)


@SETTINGS
@given(graphs(), predicates)
def test_generated_accounts_are_sound_and_maximal(g, p):
    acct = generate_protected_account(g, p)
    assert verify_protected_account(acct).ok
    assert verify_maximally_informative(acct).ok


@SETTINGS
@given(graphs(), predicates)
def test_backends_agree(g, p):
    a = generate_protected_account(g, p, backend="numba")
    b = generate_protected_account(g, p, backend="numpy")
    assert dict(a.edges) == dict(b.edges)
    assert a.nodes == b.nodes


@SETTINGS
@given(graphs(), predicates)
def test_surrogate_edges_respect_direct_edges(g, p):
    acct = generate_protected_account(g, p)
    src_m, dst_m = g.incidence_marks(p)
    for (a, b), kind in acct.edges.items():
        oa, ob = acct.nodes[a].origin, acct.nodes[b].origin
        if kind == SURROGATE and g.has_edge(oa, ob):
            i = g.edge_index[(oa, ob)]
            # a protected direct edge never comes back as a surrogate edge
            assert src_m[i] == Mark.VISIBLE and dst_m[i] == Mark.VISIBLE
    assert not set(acct.edges_of_kind(PRESERVED)) & set(acct.edges_of_kind(SURROGATE))


@SETTINGS
@given(graphs(public_only=True, unmarked=True))
def test_identity_fixpoint(g):
    acct = generate_protected_account(g, PUBLIC)
    assert set(acct.nodes) == set(g.nodes)
    assert dict(acct.edges) == {e: PRESERVED for e in g.edges}
    rep = utility_report(g, acct)
    assert rep.path_utility == 1.0 and rep.node_utility == 1.0
    assert all(edge_opacity(g, acct, e) == 0.0 for e in g.edges)


@SETTINGS
@given(graphs(), predicates)
def test_metric_ranges(g, p):
    for acct in (generate_protected_account(g, p), generate_hide_only(g, p)):
        rep = utility_report(g, acct)
        assert 0.0 <= rep.path_utility <= 1.0 and 0.0 <= rep.node_utility <= 1.0
        assert all(0.0 <= edge_opacity(g, acct, e) <= 1.0 for e in g.edges)


@SETTINGS
@given(graphs(), predicates)
def test_dropping_surrogate_edges_never_helps_utility(g, p):
    acct = generate_protected_account(g, p)
    full = path_utility(g, acct)
    for e in acct.edges_of_kind(SURROGATE):
        edges = {k: v for k, v in acct.edges.items() if k != e}
        assert path_utility(g, ProtectedAccount(acct.nodes, edges, p, g)) <= full + 1e-12


@SETTINGS
@given(graphs(), predicates)
def test_surrogate_never_below_hide_only(g, p):
    full = generate_protected_account(g, p)
    naive = generate_hide_only(g, p)
    assert path_utility(g, full) >= path_utility(g, naive) - 1e-12
    assert utility_report(g, full).node_utility >= utility_report(g, naive).node_utility


@SETTINGS
@given(graphs())
def test_serialisation_round_trip(g):
    assert graph_from_dict(json.loads(json.dumps(graph_to_dict(g)))) == g
