"""Signature dynamic program deciding soft display on a reduced instance.

The program sweeps a canonical tree extension of the binary network bottom-up.
For each extension vertex it keeps a table of signatures; a signature is a
downward-closed forest of the tree (represented by its topmost arcs) together
with a map sending each topmost tree arc to the network arc of the scan cut
its image path currently crosses.  The instance is a yes-instance iff the
table at the child of the network root contains the signature consisting of
the tree's root arc alone.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .digraph import Arc, Digraph, reaches
from .errors import InputError, InternalError
from .reduction import AugmentedInstance


# -- eventual arc-disjointness and embedding checks --------------------------


def eventually_arc_disjoint(d: Digraph, p: tuple[str, ...], q: tuple[str, ...]) -> bool:
    """Whether two directed paths only share a common prefix of arcs.

    Recursively: arc-disjoint paths qualify, and so do paths whose first
    arcs coincide and whose remainders qualify.
    """
    _require_path(d, p)
    _require_path(d, q)
    i = 0
    while (i + 1 < len(p) and i + 1 < len(q)
           and p[i] == q[i] and p[i + 1] == q[i + 1]):
        i += 1
    tail_p = set(zip(p[i:], p[i + 1:]))
    tail_q = set(zip(q[i:], q[i + 1:]))
    return not (tail_p & tail_q)


def _require_path(d: Digraph, p) -> None:
    if not p:
        raise InputError("empty path")
    for v in p:
        if v not in d:
            raise InputError(f"unknown vertex {v!r}")
    for (u, v) in zip(p, p[1:]):
        if not d.has_arc(u, v):
            raise InputError(f"not a path: missing arc ({u!r}, {v!r})")


@dataclass(frozen=True)
class SoftEmbedding:
    """A map from tree arcs to network paths witnessing soft display."""

    paths: dict[Arc, tuple[str, ...]]

    def endpoint(self, y: str) -> str:
        """The network vertex at which the paths into tree vertex `y` end."""
        for (x, h), path in self.paths.items():
            if h == y:
                return path[-1]
        raise InputError(f"tree vertex {y!r} heads no mapped arc")


def check_embedding(phi: dict[Arc, tuple[str, ...]], tree: Digraph,
                    network: Digraph, forest_arcs=None) -> bool:
    """Verify the four soft-pseudo-embedding conditions of `phi`.

    `phi` maps each arc of a downward-closed subforest of the tree to a
    directed network path.  Checks: paths exist in the network, paths of
    sibling arcs start where the parent arc's path ends and are pairwise
    eventually arc-disjoint, paths of arcs with unrelated tails are fully
    arc-disjoint, and each leaf arc ends at the network leaf carrying the
    same taxon.
    """
    if forest_arcs is not None and set(forest_arcs) != set(phi):
        raise InputError("embedding domain differs from the given forest")
    tree_arcs = set(tree.arcs)
    for a in phi:
        if a not in tree_arcs:
            raise InputError(f"embedded arc {a!r} is not a tree arc")
    for (x, y), path in phi.items():
        _require_path(network, path)
        for out in tree.out_arcs(y):
            if out not in phi:
                raise InputError(f"domain not downward closed: missing {out!r}")
    for (x, y), path in phi.items():
        taxon = tree.label_of(y)
        if taxon is not None:
            if network.label_of(path[-1]) != taxon:
                return False
        for out in tree.out_arcs(y):
            if phi[out][0] != path[-1]:
                return False
    items = sorted(phi.items())
    for i, (a1, p1) in enumerate(items):
        for a2, p2 in items[i + 1:]:
            arcs1 = set(zip(p1, p1[1:]))
            arcs2 = set(zip(p2, p2[1:]))
            if a1[0] == a2[0]:
                if not eventually_arc_disjoint(network, p1, p2):
                    return False
            elif not reaches(tree, a1, a2) and not reaches(tree, a2, a1):
                if arcs1 & arcs2:
                    return False
    return True


# -- the dynamic program -----------------------------------------------------


@dataclass
class VertexStats:
    vertex: str
    cut_above: int
    cut_below: int
    cells_above: int
    cells_below: int
    max_bundle: int  # largest preimage of a single network arc in any signature


@dataclass
class SolveResult:
    displayed: bool
    instance: AugmentedInstance
    stats: list[VertexStats] = field(default_factory=list)
    tables: dict | None = None        # vertex -> {signature: provenance}
    accepting_key: tuple | None = None
    final_vertex: str | None = None


def _cell_key(cell):
    s, psi = cell
    return (tuple(sorted(s)), tuple(sorted(psi)))


def _post_order(gamma: Digraph) -> list[str]:
    out = []
    stack = [(gamma.root(), False)]
    while stack:
        v, done = stack.pop()
        if done:
            out.append(v)
        else:
            stack.append((v, True))
            for c in sorted(gamma.children(v), reverse=True):
                stack.append((c, False))
    return out


def solve(inst: AugmentedInstance, *, keep_tables: bool = True,
          collect_stats: bool = True) -> SolveResult:
    """Decide soft display on a reduced instance.

    With `keep_tables` the full signature tables and provenance tags are
    retained for witness reconstruction; without it, child tables are freed
    as soon as they have been combined, which bounds memory by the tables
    along one root-to-leaf slice.
    """
    inst.check()
    n, t, gamma = inst.network, inst.tree, inst.extension.gamma
    rho_n, rho_t = inst.network_root, inst.tree_root
    if gamma.root() != rho_n:
        raise InternalError("extension root differs from the network root")
    t_leaf_of = t.leaf_by_taxon
    top_arc = (rho_t, t.children(rho_t)[0])

    above: dict[str, dict] = {}
    below: dict[str, dict] = {}
    stats: list[VertexStats] = []
    order = _post_order(gamma)

    for v in order:
        if v == rho_n:
            continue
        qs = sorted(gamma.children(v))
        out_v = set(n.out_arcs(v))
        in_parents = sorted(n.parents(v))

        if not qs:
            taxon = n.label_of(v)
            if taxon is None or taxon not in t_leaf_of:
                raise InternalError(f"network leaf {v!r} has no matching tree leaf")
            tl = t_leaf_of[taxon]
            (tp,) = t.parents(tl)
            (u,) = in_parents
            key = (frozenset({(tp, tl)}), frozenset({((tp, tl), (u, v))}))
            above[v] = {key: ("leaf",)}
            below[v] = {}
        else:
            if len(qs) == 1:
                q = qs[0]
                below_v = {k: ("copy", q, k) for k in above[q]}
            elif len(qs) == 2:
                q1, q2 = qs
                below_v = {}
                for k1 in sorted(above[q1], key=_cell_key):
                    s1, psi1 = k1
                    for k2 in sorted(above[q2], key=_cell_key):
                        s2, psi2 = k2
                        if s1 & s2:
                            raise InternalError(
                                "sibling signatures share a tree arc; "
                                "the extension cannot be canonical")
                        key = (s1 | s2, psi1 | psi2)
                        below_v.setdefault(key, ("join", q1, k1, q2, k2))
            else:
                raise InternalError(
                    "extension vertex with more than two children over a binary host")

            above_v: dict = {}
            for key in sorted(below_v, key=_cell_key):
                s, psi = key
                psi_map = dict(psi)
                bundle = frozenset(a for a, b in psi_map.items() if b in out_v)
                if not bundle:
                    above_v.setdefault(key, ("up", key))
                    continue
                tails = {a[0] for a in bundle}
                if len(tails) != 1:
                    continue
                (y,) = tails
                for u in in_parents:
                    psi2 = frozenset(
                        (a, (u, v) if a in bundle else b)
                        for a, b in psi_map.items())
                    above_v.setdefault((s, psi2), ("extend", key, bundle, u))
                if y != rho_t and len(bundle) == t.out_degree(y):
                    (x,) = t.parents(y)
                    s2 = (s - bundle) | {(x, y)}
                    for u in in_parents:
                        grown = {a: b for a, b in psi_map.items() if a not in bundle}
                        grown[(x, y)] = (u, v)
                        above_v.setdefault(
                            (s2, frozenset(grown.items())),
                            ("grow", key, bundle, (x, y), u))
            above[v] = above_v
            below[v] = below_v

        if collect_stats:
            max_bundle = 0
            for table in (above[v], below[v]):
                for (_, psi) in table:
                    counts: dict = {}
                    for _, b in psi:
                        counts[b] = counts.get(b, 0) + 1
                    if counts:
                        max_bundle = max(max_bundle, max(counts.values()))
            stats.append(VertexStats(
                vertex=v,
                cut_above=len(inst.extension.scan_cut(v, "above")),
                cut_below=len(inst.extension.scan_cut(v, "below")),
                cells_above=len(above[v]),
                cells_below=len(below[v]),
                max_bundle=max_bundle,
            ))

        if not keep_tables:
            for q in qs:
                above.pop(q, None)
                below.pop(q, None)

    final = n.children(rho_n)[0]
    accepting = sorted(
        (k for k in above.get(final, {}) if k[0] == frozenset({top_arc})),
        key=_cell_key)
    result = SolveResult(
        displayed=bool(accepting),
        instance=inst,
        stats=stats,
        tables={"above": above, "below": below} if keep_tables else None,
        accepting_key=accepting[0] if accepting else None,
        final_vertex=final,
    )
    return result


# -- witness reconstruction --------------------------------------------------


def reconstruct_witness(result: SolveResult) -> SoftEmbedding:
    """Replay provenance tags of an accepting run into an embedding.

    The embedding maps every arc of the reduced tree to a directed path in
    the reduced network and satisfies the soft-pseudo-embedding conditions.
    """
    if not result.displayed:
        raise InputError("no witness: the instance is a no-instance")
    if result.tables is None:
        raise InputError("no witness: the solver ran in decision-only mode")
    above, below = result.tables["above"], result.tables["below"]
    inst = result.instance
    limit = 4 * len(inst.network.vertices) + 1000
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, limit))
    try:
        phi = _expand_above(above, below, result.final_vertex, result.accepting_key)
    finally:
        sys.setrecursionlimit(old_limit)
    top_arc = (inst.tree_root, inst.tree.children(inst.tree_root)[0])
    if phi[top_arc][0] != inst.network_root:
        raise InternalError("witness does not start at the network root")
    if not check_embedding(phi, inst.tree, inst.network):
        raise InternalError("reconstructed embedding fails verification")
    return SoftEmbedding(phi)


def _expand_above(above, below, v, key):
    tag = above[v][key]
    if tag[0] == "leaf":
        (_, psi) = key
        ((a, b),) = tuple(psi)
        return {a: b}
    if tag[0] == "up":
        return dict(_expand_below(above, below, v, tag[1]))
    if tag[0] == "extend":
        _, inner, bundle, u = tag
        phi = dict(_expand_below(above, below, v, inner))
        for a in bundle:
            phi[a] = (u,) + phi[a]
        return phi
    if tag[0] == "grow":
        # The bundled arcs stay embedded; they merely stop being topmost.
        _, inner, bundle, new_arc, u = tag
        phi = dict(_expand_below(above, below, v, inner))
        phi[new_arc] = (u, v)
        return phi
    raise InternalError(f"unknown provenance tag {tag!r}")


def _expand_below(above, below, v, key):
    tag = below[v][key]
    if tag[0] == "copy":
        return _expand_above(above, below, tag[1], tag[2])
    if tag[0] == "join":
        _, q1, k1, q2, k2 = tag
        phi = dict(_expand_above(above, below, q1, k1))
        other = _expand_above(above, below, q2, k2)
        overlap = set(phi) & set(other)
        if overlap:
            raise InternalError(f"joined embeddings overlap on {sorted(overlap)}")
        phi.update(other)
        return phi
    raise InternalError(f"unknown provenance tag {tag!r}")
