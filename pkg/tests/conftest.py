"""Shared fixtures: the hand-built four-taxon instances and a seeded suite."""

import pytest

from stc import Digraph, GeneratorParams, generate, prune_to_leafset

TAXA = {"a": "a", "b": "b", "c": "c", "d": "d"}


@pytest.fixture(scope="session")
def net_a():
    """A network on {a, b, c, d} with one reticulation below two tree paths."""
    return Digraph(
        [("rho", "s"), ("rho", "t"), ("s", "p"), ("s", "r"), ("p", "a"),
         ("p", "b"), ("r", "c"), ("t", "r"), ("t", "d")],
        TAXA)


@pytest.fixture(scope="session")
def tree_b():
    """((a,b),c),d — firmly displayed by net_a."""
    return Digraph(
        [("x", "y"), ("y", "z"), ("z", "a"), ("z", "b"), ("y", "c"),
         ("x", "d")],
        TAXA)


@pytest.fixture(scope="session")
def tree_c():
    """(a,(b,c)),d — not even softly displayed by net_a."""
    return Digraph(
        [("x", "y"), ("y", "a"), ("y", "z"), ("z", "b"), ("z", "c"),
         ("x", "d")],
        TAXA)


@pytest.fixture(scope="session")
def tree_d():
    """(a,b,c),d — softly but not firmly displayed by net_a."""
    return Digraph(
        [("x", "y"), ("y", "a"), ("y", "b"), ("y", "c"), ("x", "d")],
        TAXA)


_SUITE_CONFIGS = (
    (3, 1, 0.0, "unlabeled"),
    (4, 1, 0.0, "yes-biased"),
    (4, 2, 0.0, "unlabeled"),
    (5, 1, 0.0, "unlabeled"),
    (3, 2, 0.3, "yes-biased"),
    (4, 1, 0.3, "unlabeled"),
    (5, 1, 0.25, "yes-biased"),
    (4, 0, 0.4, "unlabeled"),
)


@pytest.fixture(scope="session")
def suite():
    """300+ small seeded instances; every third tree is pruned to a subset."""
    out = []
    for seed in range(40):
        for leaves, retics, rate, target in _SUITE_CONFIGS:
            params = GeneratorParams(leaves, retics, rate, seed, target)
            inst = generate(params)
            if len(inst.network.arcs) > 12:
                continue
            tree = inst.tree
            if len(out) % 3 == 2 and len(tree.taxa) > 2:
                keep = sorted(tree.taxa)[:-1]
                tree, _ = prune_to_leafset(tree, keep)
            name = f"s{seed}-l{leaves}-r{retics}-p{int(rate * 100)}-{target}"
            out.append((name, inst.network, tree, inst.extension))
    assert len(out) >= 300
    return out
