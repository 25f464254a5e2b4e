"""Core digraph invariants, rewrites, classification, and reachability."""

import pytest

from stc import Digraph, InputError, PhyloKind, RewriteError, classify, reaches
from stc.digraph import canonical_tree_form, tree_leaf_isomorphic


def test_construction_sorts_and_deduplicates():
    d = Digraph([("b", "c"), ("a", "b"), ("b", "c")])
    assert d.vertices == ("a", "b", "c")
    assert d.arcs == (("a", "b"), ("b", "c"))


def test_self_loop_rejected():
    with pytest.raises(InputError):
        Digraph([("a", "a")])


def test_label_on_internal_vertex_rejected():
    with pytest.raises(InputError):
        Digraph([("a", "b")], {"a": "x"})


def test_duplicate_taxa_rejected():
    with pytest.raises(InputError):
        Digraph([("a", "b"), ("a", "c")], {"b": "x", "c": "x"})


def test_degrees_and_leaves(net_a):
    assert net_a.in_degree("r") == 2
    assert net_a.out_degree("r") == 1
    assert set(net_a.leaves) == {"a", "b", "c", "d"}
    assert net_a.root() == "rho"
    assert net_a.taxa == frozenset("abcd")


def test_topological_order_is_deterministic(net_a):
    order = net_a.topological_order()
    pos = {v: i for i, v in enumerate(order)}
    for (u, v) in net_a.arcs:
        assert pos[u] < pos[v]
    assert order == net_a.topological_order()


def test_descendants(net_a):
    assert net_a.descendants("t") == frozenset({"r", "c", "d"})
    assert net_a.descendants("a") == frozenset()


def test_cycle_detected():
    d = Digraph([("a", "b"), ("b", "c"), ("c", "a"), ("x", "a")])
    assert not d.is_acyclic()
    with pytest.raises(InputError):
        d.topological_order()


def test_fresh_ids_never_collide():
    d = Digraph([("g3", "g7"), ("g3", "x")])
    assert d.fresh_ids(2) == ("g8", "g9")


def test_subdivide_and_suppress_invert():
    d = Digraph([("a", "b"), ("a", "c")])
    d2 = d.subdivide(("a", "b"), "m")
    assert d2.has_arc("a", "m") and d2.has_arc("m", "b")
    assert d2.suppress("m") == d


def test_suppress_requires_degree_one():
    d = Digraph([("a", "b"), ("a", "c")])
    with pytest.raises(RewriteError):
        d.suppress("a")


def test_contract_collapses_parallel_arcs():
    d = Digraph([("a", "b"), ("a", "c"), ("b", "c")])
    d2 = d.contract(("a", "b"))
    assert d2.arcs == (("a", "c"),)
    assert "b" not in d2


def test_out_split_and_in_split():
    d = Digraph([("v", "a"), ("v", "b"), ("v", "c")])
    d2 = d.out_split("v", ("a", "b"), "w")
    assert set(d2.children("v")) == {"c", "w"}
    assert set(d2.children("w")) == {"a", "b"}

    e = Digraph([("a", "v"), ("b", "v"), ("c", "v"), ("v", "x")])
    e2 = e.in_split("v", ("a", "b"), "w")
    assert set(e2.parents("v")) == {"c", "w"}
    assert set(e2.parents("w")) == {"a", "b"}


def test_classify_network_tree_and_near_misses(net_a, tree_b):
    assert classify(net_a).kind is PhyloKind.NETWORK
    assert classify(tree_b).kind is PhyloKind.TREE

    deg1 = Digraph([("g", "rho")] + list(net_a.arcs), net_a.labels)
    assert classify(deg1).kind is PhyloKind.ROOTED_DAG_DEG1_ROOT

    chain = Digraph([("r", "m"), ("m", "a"), ("r", "b")], {"a": "a", "b": "b"})
    bad = classify(chain)
    assert bad.kind is PhyloKind.INVALID
    assert "m" in bad.reason

    unlabeled = Digraph([("r", "a"), ("r", "b")], {"a": "a"})
    assert "unlabeled" in classify(unlabeled).reason


def test_reaches_vertices_and_arcs(net_a):
    assert reaches(net_a, "s", "c")
    assert not reaches(net_a, "s", "s")          # strict on vertices
    assert reaches(net_a, ("rho", "s"), ("s", "r"))
    assert reaches(net_a, ("t", "r"), "c")
    assert reaches(net_a, "rho", ("r", "c"))
    assert not reaches(net_a, ("p", "a"), ("p", "b"))
    with pytest.raises(InputError):
        reaches(net_a, ("a", "b"), "c")


def test_canonical_form_ignores_child_order():
    t1 = Digraph([("r", "x"), ("x", "a"), ("x", "b"), ("r", "c")],
                 {"a": "a", "b": "b", "c": "c"})
    t2 = Digraph([("R", "C"), ("R", "X"), ("X", "B"), ("X", "A")],
                 {"A": "a", "B": "b", "C": "c"})
    assert canonical_tree_form(t1) == canonical_tree_form(t2)
    assert tree_leaf_isomorphic(t1, t2)


def test_isomorphism_respects_leaves():
    t1 = Digraph([("r", "x"), ("x", "a"), ("x", "b"), ("r", "c")],
                 {"a": "a", "b": "b", "c": "c"})
    t3 = Digraph([("r", "x"), ("x", "a"), ("x", "c"), ("r", "b")],
                 {"a": "a", "b": "b", "c": "c"})
    assert not tree_leaf_isomorphic(t1, t3)
    t4 = Digraph([("r", "a"), ("r", "b")], {"a": "a", "b": "z"})
    assert not tree_leaf_isomorphic(t1, t4)
