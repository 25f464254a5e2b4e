"""Seeded random instance generator for tests and benchmarks.

Instances are built constructively: grow a random binary tree, add cross
arcs to create reticulations, extract a displayed tree, and optionally
contract arcs on either side to create polytomies.  Output is byte-stable
for a fixed parameter set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .digraph import Digraph, PhyloKind, classify
from .errors import InputError, SemanticError
from .extension import TreeExtension, default_extension
from .formats import serialize_edgelist, serialize_extension
from .reduction import tidy

_TARGETS = ("yes-biased", "unlabeled")


@dataclass(frozen=True)
class GeneratorParams:
    leaves: int
    reticulations: int = 0
    polytomy_rate: float = 0.0
    seed: int = 0
    target_answer: str = "yes-biased"

    def __post_init__(self):
        if self.leaves < 2:
            raise InputError("need at least 2 leaves")
        if self.reticulations < 0:
            raise InputError("reticulation count must be nonnegative")
        if not 0.0 <= self.polytomy_rate <= 1.0:
            raise InputError("polytomy rate must lie in [0, 1]")
        if self.target_answer not in _TARGETS:
            raise InputError(f"target answer must be one of {_TARGETS}")


@dataclass(frozen=True)
class GeneratedInstance:
    network: Digraph
    tree: Digraph
    extension: TreeExtension
    network_doc: str
    tree_doc: str
    extension_doc: str


def _random_binary_tree(rng, leaves, counter):
    def fresh():
        counter[0] += 1
        return f"v{counter[0] - 1}"

    root = fresh()
    arcs = [(root, fresh()), (root, fresh())]
    for _ in range(leaves - 2):
        (u, v) = rng.choice(sorted(arcs))
        mid, leaf = fresh(), fresh()
        arcs.remove((u, v))
        arcs += [(u, mid), (mid, v), (mid, leaf)]
    return arcs


def _valid_shape(g: Digraph) -> bool:
    """Network degree conditions, ignoring labels."""
    if len(g.roots) != 1 or not g.is_acyclic():
        return False
    root = g.roots[0]
    if g.out_degree(root) < 2:
        return False
    for v in g.vertices:
        if v == root:
            continue
        din, dout = g.in_degree(v), g.out_degree(v)
        if din == 1 and dout == 1:
            return False
        if din >= 2 and dout != 1:
            return False
    return True


def _add_reticulation(rng, arcs, counter) -> list | None:
    """One attempt at adding a cross arc; None when the result is invalid."""
    pool = sorted(arcs)
    trial = list(arcs)
    graph = Digraph(trial)
    retics = sorted(v for v in graph.vertices if graph.in_degree(v) >= 2)
    if retics and rng.random() < 0.3:
        # aim at an existing reticulation, raising its in-degree
        r = rng.choice(retics)
        (a, b) = rng.choice(pool)
        if b == r or a == r or graph.reachable(r, a):
            return None
        mid = f"v{counter[0]}"
        counter[0] += 1
        trial.remove((a, b))
        trial += [(a, mid), (mid, b), (mid, r)]
    else:
        (a, b) = rng.choice(pool)
        (c, d) = rng.choice(pool)
        if (a, b) == (c, d):
            return None
        x, y = f"v{counter[0]}", f"v{counter[0] + 1}"
        counter[0] += 2
        trial.remove((a, b))
        trial.remove((c, d))
        trial += [(a, x), (x, b), (c, y), (y, d), (x, y)]
    if not _valid_shape(Digraph(trial)):
        return None
    return trial


def _contract_marked(work: Digraph, marked) -> Digraph:
    merged: dict = {}

    def find(v):
        while v in merged:
            v = merged[v]
        return v

    for (u, v) in marked:
        tail = find(u)
        if v not in work or not work.has_arc(tail, v):
            continue
        if set(work.children(tail)) & set(work.children(v)):
            continue  # would delete a parallel arc and derail a reticulation
        candidate = work.contract((tail, v))
        if not classify(candidate):
            continue
        work = candidate
        merged[v] = tail
    return work


def generate(params: GeneratorParams) -> GeneratedInstance:
    """Build one (network, tree, extension) instance from the parameters."""
    rng = random.Random(params.seed)
    counter = [0]
    arcs = _random_binary_tree(rng, params.leaves, counter)
    added = 0
    attempts = 0
    while added < params.reticulations:
        attempts += 1
        if attempts > 200 * params.reticulations + 200:
            raise SemanticError(
                f"could not place {params.reticulations} reticulations "
                f"on {params.leaves} leaves")
        trial = _add_reticulation(rng, arcs, counter)
        if trial is None:
            continue
        arcs = trial
        added += 1

    leaf_ids = sorted(v for v in Digraph(arcs).leaves)
    labels = {v: f"t{i + 1}" for i, v in enumerate(leaf_ids)}
    network = Digraph(arcs, labels)
    if classify(network).kind not in (PhyloKind.NETWORK, PhyloKind.TREE):
        raise SemanticError("generator produced an invalid network")

    # extract a displayed tree by keeping one in-arc per reticulation
    kept = list(network.arcs)
    for r in sorted(v for v in network.vertices if network.in_degree(v) >= 2):
        keep = rng.choice(sorted(network.parents(r)))
        kept = [a for a in kept if a[1] != r or a[0] == keep]
    tree = tidy(Digraph(kept, labels), network.taxa)

    if params.polytomy_rate > 0:
        t_marks = [(u, v) for (u, v) in sorted(tree.arcs)
                   if tree.children(v) and rng.random() < params.polytomy_rate]
        tree = _contract_marked(tree, t_marks)
        n_marks = [(u, v) for (u, v) in sorted(network.arcs)
                   if network.children(v) and network.in_degree(v) == 1
                   and network.in_degree(u) <= 1
                   and rng.random() < params.polytomy_rate]
        network = _contract_marked(network, n_marks)

    if params.target_answer == "unlabeled":
        taxa = sorted(tree.taxa)
        image = rng.sample(taxa, len(taxa))
        relabel = dict(zip(taxa, image))
        tree = Digraph(tree.arcs,
                       {v: relabel[t] for v, t in tree.labels.items()})

    ext = default_extension(network)
    return GeneratedInstance(
        network=network,
        tree=tree,
        extension=ext,
        network_doc=serialize_edgelist(network, f"gen-{params.seed}"),
        tree_doc=serialize_edgelist(tree, f"gen-{params.seed}-tree"),
        extension_doc=serialize_extension(ext),
    )
