import math

import numpy as np
import pytest

from surrogate_accounts import (
    PUBLIC,
    GenerationConfig,
    NodeRecord,
    OpacityConfig,
    PrivilegeLattice,
    ProtectedAccount,
    SensitiveGraph,
    ValidationError,
    edge_opacity,
    generate_hide_only,
    generate_protected_account,
    graph_opacity,
    node_utility,
    path_percentage,
    path_utility,
    utility_report,
)
from surrogate_accounts.evalbench.random_graphs import random_sensitive_graph
from surrogate_accounts.metrics import protected_edges

LAT = PrivilegeLattice([PUBLIC, "Secret"], [("Secret", PUBLIC)])
UTIL_TOL = 0.005
OPACITY_TOL = 0.01


def _public(edges, extra_nodes=()):
    ids = list(dict.fromkeys([n for e in edges for n in e] + list(extra_nodes)))
    return SensitiveGraph(LAT, [NodeRecord(n, {"name": n}) for n in ids], edges)


# -- utility -------------------------------------------------------------------


def test_path_percentages_of_naive_account(samples):
    g = samples["fig1a"]
    acct = generate_hide_only(g, "High-2")
    assert path_percentage(g, acct, "b") == pytest.approx(1 / 10)
    assert path_percentage(g, acct, "h") == pytest.approx(3 / 10)
    with pytest.raises(ValidationError):
        path_percentage(g, acct, "a")


def test_naive_account_utilities(samples):
    g = samples["fig1a"]
    acct = generate_hide_only(g, "High-2")
    assert path_utility(g, acct) == pytest.approx((0.1 + 0.1 + 4 * 0.3) / 11)
    assert abs(path_utility(g, acct) - 0.13) <= UTIL_TOL
    assert node_utility(g, acct) == pytest.approx(6 / 11)


@pytest.mark.parametrize("fig, expected", [("fig2a", 0.38), ("fig2b", 0.27), ("fig2c", 0.13), ("fig2d", 0.27)])
def test_fig2_path_utilities(samples, fig, expected):
    g = samples[fig]
    assert abs(path_utility(g, generate_protected_account(g, "High-2")) - expected) <= UTIL_TOL


def test_empty_account_has_zero_utility(samples):
    g = samples["fig1a"]
    empty = ProtectedAccount({}, {}, "High-2", g)
    assert path_utility(g, empty) == 0.0 and node_utility(g, empty) == 0.0


def test_identity_utilities(samples):
    g = _public([("a", "b"), ("b", "c")])
    rep = utility_report(g, generate_protected_account(g, PUBLIC))
    assert rep.path_utility == 1.0 and rep.node_utility == 1.0
    assert set(rep.path_percentages.values()) == {1.0}


def test_node_utility_with_null_surrogate():
    g = SensitiveGraph(LAT, [NodeRecord("a", {}), NodeRecord("b", {}), NodeRecord("c", {}, "Secret")], [("a", "b")])
    acct = generate_protected_account(g, PUBLIC, GenerationConfig(auto_null=True))
    assert node_utility(g, acct) == pytest.approx(2 / 3)


def test_isolated_original_counts_as_preserved():
    g = _public([("a", "b")], extra_nodes=["z"])
    acct = generate_protected_account(g, PUBLIC)
    assert path_percentage(g, acct, "z") == 1.0


def test_empty_graph_rejected():
    g = SensitiveGraph(LAT, [], [])
    empty = ProtectedAccount({}, {}, PUBLIC, g)
    with pytest.raises(ValidationError):
        path_utility(g, empty)
    with pytest.raises(ValidationError):
        node_utility(g, empty)


# -- opacity -------------------------------------------------------------------


def test_opacity_hand_computed():
    # a->b hidden from a 3-node chain: every node is a loner, every degree <= 1
    g = _public([("a", "b"), ("b", "c")])
    acct = generate_hide_only(g, PUBLIC, [("a", "b")])
    # each side: 0.8 * 0.8 / (0.8 + 0.8) = 0.4
    assert edge_opacity(g, acct, ("a", "b")) == pytest.approx(0.6)
    assert edge_opacity(g, acct, ("b", "c")) == 0.0


def test_opacity_table_values(samples):
    values = {
        fig: edge_opacity(samples[fig], generate_protected_account(samples[fig], "High-2"), ("f", "g"))
        for fig in ("fig2a", "fig2b", "fig2c", "fig2d")
    }
    assert values["fig2a"] == 0.0
    assert values["fig2b"] == 1.0
    assert abs(values["fig2c"] - 0.882) <= OPACITY_TOL
    assert abs(values["fig2d"] - 0.948) <= OPACITY_TOL
    # the surrogate edge c->g raises both opacity and path utility
    assert values["fig2c"] < values["fig2d"]


def test_custom_config_changes_opacity():
    g = _public([("a", "b"), ("b", "c")])
    acct = generate_hide_only(g, PUBLIC, [("a", "b")])
    flat = OpacityConfig(fp_steps=((math.inf, 1.0),), pc_steps=((math.inf, 1.0),))
    # every probability 1: each side is 1 / 2 candidates
    assert edge_opacity(g, acct, ("a", "b"), flat) == pytest.approx(0.5)


def test_graph_opacity_scopes(samples):
    g = _public([("a", "b"), ("b", "c")])
    ident = generate_protected_account(g, PUBLIC)
    assert graph_opacity(g, ident) == 0.0
    with pytest.raises(ValidationError, match="no edges"):
        graph_opacity(g, ident, scope="protected-edges")
    with pytest.raises(ValidationError, match="unknown opacity scope"):
        graph_opacity(g, ident, scope="some")

    g2b = samples["fig2b"]
    acct = generate_protected_account(g2b, "High-2")
    assert graph_opacity(g2b, acct, edges=[("c", "f"), ("f", "g")]) == 1.0
    scoped = graph_opacity(g2b, acct, scope="protected-edges")
    expected = np.mean([edge_opacity(g2b, acct, e) for e in protected_edges(g2b, "High-2")])
    assert scoped == pytest.approx(expected)


def test_single_protected_edge_scope():
    g = SensitiveGraph(
        LAT,
        [NodeRecord(n, {}) for n in "abc"],
        [("a", "b"), ("b", "c")],
        {("b", ("a", "b"), PUBLIC): "Hide"},
    )
    acct = generate_protected_account(g, PUBLIC)
    assert graph_opacity(g, acct, scope="protected-edges") == edge_opacity(g, acct, ("a", "b"))


def test_opacity_rejects_foreign_edge(samples):
    g = samples["fig2a"]
    acct = generate_protected_account(g, "High-2")
    with pytest.raises(ValidationError, match="not an edge"):
        edge_opacity(g, acct, ("a", "b"))
    with pytest.raises(ValidationError, match="not generated from this graph"):
        edge_opacity(samples["fig1a"].replace(edges=[("a", "b")], markings={}), acct, ("a", "b"))


@pytest.mark.parametrize(
    "steps",
    [
        (),
        ((2, 0.5), (1, 0.3), (math.inf, 0.2)),
        ((1, 0.5), (5, 0.2)),
        ((1, 0.0), (math.inf, 0.2)),
        ((1, 1.5), (math.inf, 0.2)),
    ],
)
def test_opacity_config_validation(steps):
    with pytest.raises(ValidationError):
        OpacityConfig(fp_steps=steps)


def test_opacity_config_step_lookup():
    cfg = OpacityConfig()
    assert list(cfg.fp(np.array([0, 1, 2, 7]))) == [0.8, 0.8, 0.2, 0.2]


# -- randomized invariants -------------------------------------------------------


@pytest.mark.parametrize("seed", range(60))
def test_metric_invariants_random(seed):
    rng = np.random.default_rng(seed)
    g = random_sensitive_graph(rng, int(rng.integers(2, 12)), edge_prob=float(rng.uniform(0.1, 0.5)))
    for p in g.lattice.predicates:
        for acct in (generate_protected_account(g, p), generate_hide_only(g, p)):
            rep = utility_report(g, acct)
            assert 0.0 <= rep.path_utility <= 1.0
            assert 0.0 <= rep.node_utility <= 1.0
            for e in g.edges:
                value = edge_opacity(g, acct, e)
                assert 0.0 <= value <= 1.0
                a, b = acct.account_id(e[0]), acct.account_id(e[1])
                assert (value == 0.0) == (a is not None and b is not None and (a, b) in acct.edges)
        naive = generate_hide_only(g, p)
        assert node_utility(g, naive) == pytest.approx(len(naive.nodes) / len(g.nodes))
