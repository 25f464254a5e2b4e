"""Immutable directed graphs with leaf labels, plus the rewriting toolbox.

Vertices are opaque string ids.  A graph is a value: every rewrite returns a
fresh graph and never mutates its input, so graphs can be shared freely
between threads.  Iteration order is sorted everywhere to keep downstream
output reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .errors import InputError, RewriteError

Arc = tuple[str, str]

_FRESH_ID_RE = re.compile(r"^g(\d+)$")


class Digraph:
    """A finite digraph with an optional taxon label on each sink vertex.

    Invariants enforced at construction: no self-loops (arc pairs have
    distinct endpoints), labels sit only on vertices of out-degree 0, and
    labels are pairwise distinct.
    """

    def __init__(self, arcs, labels=None, vertices=()):
        arcset = set()
        verts = set(vertices)
        for (u, v) in arcs:
            if u == v:
                raise InputError(f"self-loop on {u!r}")
            arcset.add((u, v))
            verts.add(u)
            verts.add(v)
        if not verts:
            raise InputError("a digraph needs at least one vertex")
        self._vertices = tuple(sorted(verts))
        self._arcs = tuple(sorted(arcset))
        parents = {v: [] for v in self._vertices}
        children = {v: [] for v in self._vertices}
        for (u, v) in self._arcs:
            children[u].append(v)
            parents[v].append(u)
        self._parents = {v: tuple(ps) for v, ps in parents.items()}
        self._children = {v: tuple(cs) for v, cs in children.items()}
        labels = dict(labels or {})
        for v, taxon in labels.items():
            if v not in parents:
                raise InputError(f"label on unknown vertex {v!r}")
            if children[v]:
                raise InputError(f"label {taxon!r} on non-leaf vertex {v!r}")
        if len(set(labels.values())) != len(labels):
            raise InputError("duplicate taxon labels")
        self._labels = dict(sorted(labels.items()))

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self._arcs

    @property
    def labels(self) -> dict[str, str]:
        return dict(self._labels)

    def __contains__(self, v) -> bool:
        return v in self._parents

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return (self._vertices == other._vertices
                and self._arcs == other._arcs
                and self._labels == other._labels)

    def __hash__(self) -> int:
        return hash((self._vertices, self._arcs, tuple(self._labels.items())))

    def __repr__(self) -> str:
        return f"Digraph({len(self._vertices)} vertices, {len(self._arcs)} arcs)"

    def _require(self, v) -> None:
        if v not in self._parents:
            raise InputError(f"unknown vertex {v!r}")

    def has_arc(self, u, v) -> bool:
        return v in self._children.get(u, ())

    def parents(self, v) -> tuple[str, ...]:
        self._require(v)
        return self._parents[v]

    def children(self, v) -> tuple[str, ...]:
        self._require(v)
        return self._children[v]

    def in_arcs(self, v) -> tuple[Arc, ...]:
        return tuple((u, v) for u in self.parents(v))

    def out_arcs(self, v) -> tuple[Arc, ...]:
        return tuple((v, w) for w in self.children(v))

    def in_degree(self, v) -> int:
        return len(self.parents(v))

    def out_degree(self, v) -> int:
        return len(self.children(v))

    @cached_property
    def max_out_degree(self) -> int:
        return max(len(cs) for cs in self._children.values())

    @cached_property
    def max_in_degree(self) -> int:
        return max(len(ps) for ps in self._parents.values())

    def is_binary(self) -> bool:
        return self.max_in_degree <= 2 and self.max_out_degree <= 2

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v in self._vertices if not self._children[v])

    @cached_property
    def roots(self) -> tuple[str, ...]:
        return tuple(v for v in self._vertices if not self._parents[v])

    def root(self) -> str:
        if len(self.roots) != 1:
            raise InputError(f"graph has {len(self.roots)} roots, expected 1")
        return self.roots[0]

    def label_of(self, v) -> str | None:
        self._require(v)
        return self._labels.get(v)

    @cached_property
    def taxa(self) -> frozenset[str]:
        """The set of taxon labels present on leaves."""
        return frozenset(self._labels.values())

    @cached_property
    def leaf_by_taxon(self) -> dict[str, str]:
        return {taxon: v for v, taxon in self._labels.items()}

    # -- reachability ------------------------------------------------------

    @cached_property
    def _topo_order(self) -> tuple[str, ...] | None:
        """A sorted-tie-break topological order, or None if cyclic."""
        import heapq
        indeg = {v: len(self._parents[v]) for v in self._vertices}
        heap = [v for v in self._vertices if not indeg[v]]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for w in self._children[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) != len(self._vertices):
            return None
        return tuple(order)

    def is_acyclic(self) -> bool:
        return self._topo_order is not None

    def topological_order(self) -> tuple[str, ...]:
        if self._topo_order is None:
            raise InputError("graph is not acyclic")
        return self._topo_order

    @cached_property
    def _descendants(self) -> dict[str, frozenset[str]]:
        """Strict descendants of every vertex (requires acyclicity)."""
        order = self.topological_order()
        desc: dict[str, frozenset[str]] = {}
        for v in reversed(order):
            acc: set[str] = set()
            for w in self._children[v]:
                acc.add(w)
                acc.update(desc[w])
            desc[v] = frozenset(acc)
        return desc

    def descendants(self, v) -> frozenset[str]:
        self._require(v)
        return self._descendants[v]

    def reachable(self, u, v) -> bool:
        """Vertex-to-vertex reachability, length 0 allowed."""
        self._require(u)
        self._require(v)
        return u == v or v in self._descendants[u]

    # -- rewriting ---------------------------------------------------------

    @cached_property
    def _fresh_counter(self) -> int:
        best = 0
        for v in self._vertices:
            m = _FRESH_ID_RE.match(v)
            if m:
                best = max(best, int(m.group(1)) + 1)
        return best

    def fresh_ids(self, count) -> tuple[str, ...]:
        """`count` ids of the form g<n> that do not collide with existing ones."""
        start = self._fresh_counter
        return tuple(f"g{start + i}" for i in range(count))

    def _replace(self, arcs, labels, vertices=()) -> "Digraph":
        return Digraph(arcs, labels, vertices)

    def subdivide(self, arc, new_id) -> "Digraph":
        (u, v) = arc
        if not self.has_arc(u, v):
            raise RewriteError(f"cannot subdivide missing arc ({u!r}, {v!r})")
        if new_id in self:
            raise RewriteError(f"subdivision vertex {new_id!r} already exists")
        arcs = [a for a in self._arcs if a != (u, v)]
        arcs += [(u, new_id), (new_id, v)]
        return self._replace(arcs, self._labels)

    def suppress(self, v) -> "Digraph":
        self._require(v)
        if self.in_degree(v) != 1 or self.out_degree(v) != 1:
            raise RewriteError(f"cannot suppress {v!r}: needs in-degree 1 and out-degree 1")
        (u,) = self.parents(v)
        (w,) = self.children(v)
        arcs = [a for a in self._arcs if v not in a]
        if u != w:
            arcs.append((u, w))
        labels = {x: t for x, t in self._labels.items() if x != v}
        return self._replace(arcs, labels)

    def contract(self, arc) -> "Digraph":
        """Contract (u, v): v's neighbors move to u, v disappears.

        Duplicate arcs collapse by set semantics.
        """
        (u, v) = arc
        if not self.has_arc(u, v):
            raise RewriteError(f"cannot contract missing arc ({u!r}, {v!r})")
        arcs = []
        for (a, b) in self._arcs:
            if (a, b) == (u, v):
                continue
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                arcs.append((a2, b2))
        labels = {x: t for x, t in self._labels.items() if x != v}
        vertices = [x for x in self._vertices if x != v]
        return self._replace(arcs, labels, vertices)

    def out_split(self, v, pair, new_id) -> "Digraph":
        """Move two children of a high-out-degree vertex below a fresh vertex."""
        c1, c2 = pair
        if self.out_degree(v) < 3:
            raise RewriteError(f"out-split needs out-degree >= 3 at {v!r}")
        if c1 == c2 or c1 not in self.children(v) or c2 not in self.children(v):
            raise RewriteError(f"out-split needs two distinct children of {v!r}")
        if new_id in self:
            raise RewriteError(f"split vertex {new_id!r} already exists")
        arcs = [a for a in self._arcs if a not in ((v, c1), (v, c2))]
        arcs += [(v, new_id), (new_id, c1), (new_id, c2)]
        return self._replace(arcs, self._labels)

    def in_split(self, v, pair, new_id) -> "Digraph":
        """Move two parents of a high-in-degree vertex above a fresh vertex."""
        p1, p2 = pair
        if self.in_degree(v) < 3:
            raise RewriteError(f"in-split needs in-degree >= 3 at {v!r}")
        if p1 == p2 or p1 not in self.parents(v) or p2 not in self.parents(v):
            raise RewriteError(f"in-split needs two distinct parents of {v!r}")
        if new_id in self:
            raise RewriteError(f"split vertex {new_id!r} already exists")
        arcs = [a for a in self._arcs if a not in ((p1, v), (p2, v))]
        arcs += [(p1, new_id), (p2, new_id), (new_id, v)]
        return self._replace(arcs, self._labels)

    def without_arcs(self, drop) -> "Digraph":
        drop = set(drop)
        arcs = [a for a in self._arcs if a not in drop]
        return self._replace(arcs, self._labels, self._vertices)

    def without_vertices(self, drop) -> "Digraph":
        drop = set(drop)
        arcs = [(u, v) for (u, v) in self._arcs if u not in drop and v not in drop]
        labels = {v: t for v, t in self._labels.items() if v not in drop}
        vertices = [v for v in self._vertices if v not in drop]
        return self._replace(arcs, labels, vertices)

    def with_arcs(self, extra) -> "Digraph":
        return self._replace(list(self._arcs) + list(extra), self._labels, self._vertices)


# -- classification --------------------------------------------------------


class PhyloKind(Enum):
    NETWORK = "network"
    TREE = "tree"
    ROOTED_DAG_DEG1_ROOT = "rooted-dag-with-degree-1-root"
    INVALID = "invalid"


@dataclass(frozen=True)
class PhyloClass:
    kind: PhyloKind
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.kind is not PhyloKind.INVALID


def _invalid(reason: str) -> PhyloClass:
    return PhyloClass(PhyloKind.INVALID, reason)


def classify(d: Digraph) -> PhyloClass:
    """Classify a digraph as a phylogenetic network, tree, or near-miss.

    Rules are checked in a fixed order so the reported violation is
    deterministic: multiple roots, cycle, root degree, degree pattern,
    label placement, leaf count.
    """
    if len(d.roots) == 0:
        return _invalid("no root")
    if len(d.roots) > 1:
        return _invalid(f"multiple roots: {', '.join(d.roots)}")
    if not d.is_acyclic():
        return _invalid("contains a directed cycle")
    root = d.roots[0]
    root_out = d.out_degree(root)
    if root_out == 0:
        return _invalid("root out-degree 0")
    degree_one_root = root_out == 1
    reticulations = 0
    for v in d.vertices:
        if v == root:
            continue
        din, dout = d.in_degree(v), d.out_degree(v)
        if din == 1 and dout == 1:
            return _invalid(f"vertex {v!r} has in-degree 1 and out-degree 1")
        if din >= 2:
            if dout != 1:
                return _invalid(f"vertex {v!r} has in-degree {din} and out-degree {dout}")
            reticulations += 1
    for v in d.leaves:
        if d.label_of(v) is None:
            return _invalid(f"unlabeled leaf {v!r}")
    if len(d.leaves) < 2:
        return _invalid("fewer than 2 leaves")
    if degree_one_root:
        return PhyloClass(PhyloKind.ROOTED_DAG_DEG1_ROOT)
    if reticulations == 0:
        return PhyloClass(PhyloKind.TREE)
    return PhyloClass(PhyloKind.NETWORK)


# -- extended reachability -------------------------------------------------


def _is_arc(x) -> bool:
    return isinstance(x, tuple)


def reaches(d: Digraph, a, b) -> bool:
    """Strict reachability extended to arcs.

    Vertex-to-vertex is ordinary strict reachability.  An arc relates
    through its head: (w, x) reaches whatever x weakly reaches, and a
    vertex reaches an arc if it weakly reaches the arc's tail.
    """
    arcset = set(d.arcs)
    for x in (a, b):
        if _is_arc(x):
            if x not in arcset:
                raise InputError(f"unknown arc {x!r}")
        else:
            if x not in d:
                raise InputError(f"unknown vertex {x!r}")
    if _is_arc(a):
        if _is_arc(b):
            return d.reachable(a[1], b[0])
        return d.reachable(a[1], b)
    if _is_arc(b):
        return d.reachable(a, b[0])
    return a != b and d.reachable(a, b)


# -- leaf-respecting tree isomorphism --------------------------------------


def _canonical_subtree(t: Digraph, v: str):
    if not t.children(v):
        taxon = t.label_of(v)
        if taxon is None:
            raise InputError(f"leaf {v!r} has no taxon label")
        return ("L", taxon)
    return ("I", tuple(sorted(_canonical_subtree(t, c) for c in t.children(v))))


def canonical_tree_form(t: Digraph):
    """A hashable canonical encoding of a leaf-labeled out-tree.

    Two out-trees admit a leaf-respecting isomorphism iff their encodings
    are equal.
    """
    if any(t.in_degree(v) > 1 for v in t.vertices):
        raise InputError("not an out-tree: vertex with in-degree > 1")
    return _canonical_subtree(t, t.root())


def tree_leaf_isomorphic(t1: Digraph, t2: Digraph) -> bool:
    """Whether two leaf-labeled out-trees are isomorphic respecting leaves."""
    if t1.taxa != t2.taxa:
        return False
    return canonical_tree_form(t1) == canonical_tree_form(t2)
