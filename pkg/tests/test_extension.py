"""Tree extensions: validity, scan cuts, canonical form, and maintenance."""

import pytest

from stc import (
    CUT_ABOVE,
    CUT_BELOW,
    Digraph,
    InputError,
    TreeExtension,
    canonicalize,
    default_extension,
    update_extension,
)
from stc.extension import AttachRootStep, InSplitStep, RestrictStep


@pytest.fixture()
def ext_a(net_a):
    """A width-2 extension of net_a, written down by hand."""
    gamma = Digraph([("rho", "s"), ("s", "p"), ("s", "t"), ("p", "a"),
                     ("p", "b"), ("t", "r"), ("t", "d"), ("r", "c")])
    return TreeExtension(net_a, gamma)


def test_hand_extension_is_valid(ext_a):
    assert ext_a.is_valid()
    ext_a.require_valid()


def test_missing_vertex_is_reported(net_a):
    gamma = Digraph([("rho", "s"), ("s", "p"), ("s", "t"), ("p", "a"),
                     ("p", "b"), ("t", "r"), ("t", "c")])
    problems = TreeExtension(net_a, gamma).violations()
    assert any("missing d" in p for p in problems)


def test_arc_outside_ancestor_relation_is_reported(net_a):
    gamma = Digraph([("rho", "t"), ("t", "d"), ("t", "s"), ("s", "r"),
                     ("r", "c"), ("s", "p"), ("p", "a"), ("p", "b")])
    ok = TreeExtension(net_a, gamma)
    assert ok.is_valid()
    # swap r below p instead: (s, r) and (t, r) no longer point downward
    gamma2 = Digraph([("rho", "t"), ("t", "d"), ("t", "s"), ("s", "p"),
                      ("p", "a"), ("p", "b"), ("p", "r"), ("r", "c")])
    problems = TreeExtension(net_a, gamma2).violations()
    assert problems == []  # r is still below s and t here

    gamma3 = Digraph([("rho", "r"), ("r", "c"), ("rho", "t"), ("t", "d"),
                      ("t", "s"), ("s", "p"), ("p", "a"), ("p", "b")])
    problems = TreeExtension(net_a, gamma3).violations()
    assert any("(s, r)" in p for p in problems)


def test_scan_cuts_on_the_hand_extension(ext_a):
    assert set(ext_a.scan_cut("r", CUT_ABOVE)) == {("s", "r"), ("t", "r")}
    assert set(ext_a.scan_cut("r", CUT_BELOW)) == {("r", "c")}
    assert set(ext_a.scan_cut("p", CUT_ABOVE)) == {("s", "p")}
    assert ext_a.width() == 2


def test_cut_identity_above_equals_below_shifted(ext_a):
    """Above-cut = below-cut minus own out-arcs plus own in-arcs."""
    n = ext_a.host
    for v in n.vertices:
        above = set(ext_a.scan_cut(v, CUT_ABOVE))
        below = set(ext_a.scan_cut(v, CUT_BELOW))
        assert above == (below - set(n.out_arcs(v))) | set(n.in_arcs(v))


def test_unknown_vertex_and_kind_rejected(ext_a):
    with pytest.raises(InputError):
        ext_a.scan_cut("nope")
    with pytest.raises(InputError):
        ext_a.scan_cut("r", "sideways")


def test_default_extension_is_canonical(net_a):
    ext = default_extension(net_a)
    assert ext.is_valid()
    assert ext.is_canonical()


def test_canonicalize_never_increases_width(net_a):
    # a chain extension along a topological order is valid but wide
    order = net_a.topological_order()
    gamma = Digraph(list(zip(order, order[1:])))
    chain = TreeExtension(net_a, gamma)
    assert chain.is_valid()
    out = canonicalize(chain)
    assert out.is_canonical()
    assert out.width() <= chain.width()


def test_canonicalize_rejects_invalid_input(net_a):
    gamma = Digraph([("rho", "s")], vertices=net_a.vertices)
    with pytest.raises(InputError):
        canonicalize(TreeExtension(net_a, gamma))


def test_attach_root_step(ext_a):
    out = update_extension(ext_a, AttachRootStep("g0"))
    assert out.host.root() == "g0"
    assert out.gamma.root() == "g0"
    assert out.is_valid()
    assert out.width() == ext_a.width()


def test_in_split_step():
    host = Digraph([("r", "a"), ("r", "b"), ("r", "c"), ("a", "v"),
                    ("b", "v"), ("c", "v"), ("v", "x"), ("r", "x2")],
                   {"x": "x", "x2": "y"})
    ext = default_extension(host)
    out = update_extension(ext, InSplitStep("v", ("a", "b"), "m"))
    assert out.is_valid()
    assert out.host.in_degree("v") == 2
    assert set(out.host.parents("m")) == {"a", "b"}


def test_restrict_step(net_a):
    from stc import prune_to_leafset

    ext = default_extension(net_a)
    pruned, step = prune_to_leafset(net_a, {"a", "b", "c"})
    out = update_extension(ext, step)
    assert out.host == pruned
    assert out.is_valid()
    assert set(out.gamma.vertices) == set(pruned.vertices)
