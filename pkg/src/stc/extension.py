"""Tree extensions of rooted DAGs: validation, scan cuts, width, canonical form.

A tree extension of a DAG is an out-tree over the same vertex set whose
strict ancestor relation contains every arc of the DAG.  The scan cut just
above a vertex collects the DAG arcs that cross a horizontal line drawn
there; the maximum cut size is the width driving the dynamic program.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .digraph import Arc, Digraph
from .errors import InputError, InternalError

CUT_ABOVE = "above"
CUT_BELOW = "below"


class TreeExtension:
    """An out-tree `gamma` over the vertices of a host DAG."""

    def __init__(self, host: Digraph, gamma: Digraph):
        self.host = host
        self.gamma = gamma

    def __eq__(self, other):
        if not isinstance(other, TreeExtension):
            return NotImplemented
        return self.host == other.host and self.gamma == other.gamma

    def __repr__(self):
        return f"TreeExtension({len(self.gamma)} vertices)"

    def violations(self) -> list[str]:
        """Every violated extension clause, each with a witness."""
        out = []
        hv, gv = set(self.host.vertices), set(self.gamma.vertices)
        if hv != gv:
            missing = sorted(hv - gv)
            extra = sorted(gv - hv)
            if missing:
                out.append(f"vertex-set mismatch: missing {', '.join(missing)}")
            if extra:
                out.append(f"vertex-set mismatch: extra {', '.join(extra)}")
        if len(self.gamma.roots) != 1:
            out.append(f"not an out-tree: {len(self.gamma.roots)} roots")
        else:
            bad = sorted(v for v in self.gamma.vertices if self.gamma.in_degree(v) > 1)
            if bad:
                out.append(f"not an out-tree: in-degree > 1 at {bad[0]}")
            elif not self.gamma.is_acyclic():
                out.append("not an out-tree: cyclic")
        if out:
            return out
        for (u, v) in self.host.arcs:
            if v not in self.gamma.descendants(u):
                out.append(f"arc ({u}, {v}) not inside the strict ancestor relation")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def require_valid(self) -> None:
        problems = self.violations()
        if problems:
            raise InputError("invalid tree extension: " + "; ".join(problems))

    # -- scan cuts ---------------------------------------------------------

    def scan_cut(self, t: str, kind: str = CUT_ABOVE) -> tuple[Arc, ...]:
        """The host arcs crossing just above (or just below) `t`."""
        if t not in self.gamma:
            raise InputError(f"unknown vertex {t!r}")
        if kind not in (CUT_ABOVE, CUT_BELOW):
            raise InputError(f"unknown cut kind {kind!r}")
        desc = self.gamma.descendants(t)
        cut = []
        for (u, v) in self.host.arcs:
            if kind == CUT_ABOVE:
                if t in self.gamma.descendants(u) and (v == t or v in desc):
                    cut.append((u, v))
            else:
                if (u == t or t in self.gamma.descendants(u)) and v in desc:
                    cut.append((u, v))
        return tuple(cut)

    def width(self) -> int:
        """Maximum size of a cut just above any vertex."""
        return max(len(self.scan_cut(t, CUT_ABOVE)) for t in self.gamma.vertices)

    # -- canonicality ------------------------------------------------------

    def canonicality_violations(self) -> list[str]:
        """Check the four canonical-extension clauses (assumes validity)."""
        out = []
        for t in self.gamma.vertices:
            below = set(self.gamma.descendants(t)) | {t}
            if not _weakly_connected(self.host, below):
                out.append(f"host below {t} is not weakly connected")
        if set(self.gamma.leaves) != set(self.host.leaves):
            out.append("leaf sets of extension and host differ")
        for v in self.gamma.vertices:
            if self.gamma.out_degree(v) > self.host.out_degree(v):
                out.append(f"extension out-degree exceeds host out-degree at {v}")
        return out

    def is_canonical(self) -> bool:
        return self.is_valid() and not self.canonicality_violations()


def _weakly_connected(d: Digraph, among: set[str]) -> bool:
    if not among:
        return True
    adj = {v: [] for v in among}
    for (u, v) in d.arcs:
        if u in among and v in among:
            adj[u].append(v)
            adj[v].append(u)
    start = next(iter(among))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(among)


def validate_extension(ext: TreeExtension) -> list[str]:
    return ext.violations()


def scan_cut(ext: TreeExtension, t: str, kind: str = CUT_ABOVE) -> tuple[Arc, ...]:
    return ext.scan_cut(t, kind)


def width(ext: TreeExtension) -> int:
    return ext.width()


# -- canonicalization ------------------------------------------------------


def _canonical_from_order(host: Digraph, order) -> TreeExtension:
    """Build a canonical extension from a children-first vertex order.

    Processes vertices in `order`, maintaining a forest over the processed
    prefix; a vertex adopts the root of every forest component that contains
    one of its host children.  Components coincide with the weakly connected
    components of the host induced on the prefix, which yields the canonical
    connectivity property and never enlarges any scan cut.
    """
    comp_parent: dict[str, str] = {}
    comp_root: dict[str, str] = {}
    tree_parent: dict[str, str] = {}

    def find(v: str) -> str:
        root = v
        while comp_parent[root] != root:
            root = comp_parent[root]
        while comp_parent[v] != root:
            comp_parent[v], v = root, comp_parent[v]
        return root

    for v in order:
        comp_parent[v] = v
        comp_root[v] = v
        adopted = []
        for c in sorted(host.children(v)):
            rep = find(c)
            root = comp_root[rep]
            if root != v and root not in adopted:
                adopted.append(root)
                tree_parent[root] = v
                comp_parent[rep] = v
        comp_root[find(v)] = v

    arcs = [(p, c) for c, p in tree_parent.items()]
    gamma = Digraph(arcs, vertices=host.vertices)
    return TreeExtension(host, gamma)


def canonicalize(ext: TreeExtension) -> TreeExtension:
    """A canonical extension of the same host with no larger width."""
    ext.require_valid()
    if len(ext.host.roots) != 1:
        raise InputError("canonicalization needs a rooted host")
    order = tuple(reversed(ext.gamma.topological_order()))
    return _canonical_from_order(ext.host, order)


def default_extension(host: Digraph) -> TreeExtension:
    """A canonical extension built from scratch (no width optimality claimed)."""
    if len(host.roots) != 1:
        raise InputError("need a rooted host")
    order = tuple(reversed(host.topological_order()))
    return _canonical_from_order(host, order)


# -- maintenance under pipeline rewrites ------------------------------------


@dataclass(frozen=True)
class AttachRootStep:
    """A fresh degree-1 root was attached above the host root."""
    new_root: str


@dataclass(frozen=True)
class InSplitStep:
    """Two parents of `vertex` were moved above the fresh `new_vertex`."""
    vertex: str
    parents: tuple[str, str]
    new_vertex: str


@dataclass(frozen=True)
class StretchStep:
    """`vertex` was stretched; `gadget` carries the inserted structure."""
    vertex: str
    gadget: object  # reduction.StretchGadget


@dataclass(frozen=True)
class RestrictStep:
    """The host was pruned down to `new_host`; removed vertices contract away."""
    new_host: Digraph
    removed: frozenset[str] = field(default_factory=frozenset)


def update_extension(ext: TreeExtension, step) -> TreeExtension:
    """Carry a valid extension across one pipeline rewrite of its host."""
    host, gamma = ext.host, ext.gamma

    if isinstance(step, AttachRootStep):
        rho = step.new_root
        if rho in host:
            raise InputError(f"root id {rho!r} already present")
        new_host = Digraph(list(host.arcs) + [(rho, host.root())], host.labels)
        new_gamma = Digraph(list(gamma.arcs) + [(rho, gamma.root())],
                            vertices=new_host.vertices)
        return TreeExtension(new_host, new_gamma)

    if isinstance(step, InSplitStep):
        new_host = host.in_split(step.vertex, step.parents, step.new_vertex)
        parents = gamma.parents(step.vertex)
        if len(parents) != 1:
            raise InputError(f"{step.vertex!r} has no extension parent to subdivide at")
        new_gamma = gamma.subdivide((parents[0], step.vertex), step.new_vertex)
        return TreeExtension(new_host, new_gamma)

    if isinstance(step, StretchStep):
        new_host = step.gadget.apply(host)
        path = step.gadget.path_order()
        v = step.vertex
        old_children = gamma.children(v)
        arcs = [a for a in gamma.arcs if a[0] != v]
        chain = [v, *path]
        arcs += list(zip(chain, chain[1:]))
        arcs += [(chain[-1], c) for c in old_children]
        new_gamma = Digraph(arcs, vertices=new_host.vertices)
        return TreeExtension(new_host, new_gamma)

    if isinstance(step, RestrictStep):
        surviving = set(step.new_host.vertices)
        unknown = surviving - set(gamma.vertices)
        if unknown:
            raise InputError(f"restricted host has unknown vertices: {sorted(unknown)}")
        # Splice every removed vertex's children onto its nearest surviving
        # ancestor; stray component roots hang under the main component.
        parent = {}
        for (p, c) in gamma.arcs:
            parent[c] = p
        new_parent = {}
        for v in sorted(surviving):
            p = parent.get(v)
            while p is not None and p not in surviving:
                p = parent.get(p)
            if p is not None:
                new_parent[v] = p
        component_roots = sorted(v for v in surviving if v not in new_parent)
        host_root = step.new_host.root()
        anchor = host_root
        while anchor in new_parent:
            anchor = new_parent[anchor]
        for r in component_roots:
            if r != anchor:
                new_parent[r] = anchor
        arcs = [(p, c) for c, p in new_parent.items()]
        new_gamma = Digraph(arcs, vertices=step.new_host.vertices)
        return TreeExtension(step.new_host, new_gamma)

    raise InternalError(f"unknown extension update step: {step!r}")
