"""Text formats: the edge-list document, extension documents, and eNewick.

The edge-list format is line based: an optional `network <name>` header,
`A tail head` arc lines, and `L vertex taxon` label lines; `#` starts a
comment.  Extensions use `E parent child` lines over a known host.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .digraph import Digraph
from .errors import InputError, ParseError
from .extension import TreeExtension

_TOKEN_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class EdgeListDocument:
    name: str | None
    graph: Digraph


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0]
        if stripped.strip():
            yield lineno, stripped


def _tokens(line):
    return [(m.start() + 1, m.group()) for m in _TOKEN_RE.finditer(line)]


def parse_edgelist_document(text: str) -> EdgeListDocument:
    name = None
    arcs: list = []
    arc_lines: dict = {}
    labels: dict = {}
    first = True
    for lineno, line in _lines(text):
        toks = _tokens(line)
        col, kind = toks[0]
        if kind == "network":
            if not first:
                raise ParseError("header must come first", lineno, col)
            if len(toks) != 2:
                raise ParseError("header needs exactly one name", lineno, col)
            name = toks[1][1]
        elif kind == "A":
            if len(toks) != 3:
                raise ParseError("arc line needs a tail and a head", lineno, col)
            tail, head = toks[1][1], toks[2][1]
            if tail == head:
                raise ParseError(f"self-loop on {tail!r}", lineno, toks[1][0])
            if (tail, head) in arc_lines:
                raise ParseError(
                    f"duplicate arc ({tail}, {head}), first seen on line "
                    f"{arc_lines[(tail, head)]}", lineno, col)
            arc_lines[(tail, head)] = lineno
            arcs.append((tail, head))
        elif kind == "L":
            if len(toks) != 3:
                raise ParseError("label line needs a vertex and a taxon", lineno, col)
            vertex, taxon = toks[1][1], toks[2][1]
            if vertex in labels:
                raise ParseError(f"vertex {vertex!r} labeled twice", lineno, toks[1][0])
            if any(taxon == t for t, _, _ in labels.values()):
                raise ParseError(f"taxon {taxon!r} used twice", lineno, toks[2][0])
            labels[vertex] = (taxon, lineno, toks[1][0])
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno, col)
        first = False
    if not arcs:
        raise ParseError("document contains no arcs", 1, 1)
    mentioned = {x for a in arcs for x in a}
    out_tails = {a[0] for a in arcs}
    for vertex, (taxon, lineno, col) in labels.items():
        if vertex not in mentioned:
            raise ParseError(f"label on unknown vertex {vertex!r}", lineno, col)
        if vertex in out_tails:
            raise ParseError(f"label on non-leaf vertex {vertex!r}", lineno, col)
    graph = Digraph(arcs, {v: t for v, (t, _, _) in labels.items()})
    return EdgeListDocument(name, graph)


def parse_edgelist(text: str) -> Digraph:
    return parse_edgelist_document(text).graph


def serialize_edgelist(graph: Digraph, name: str | None = None) -> str:
    out = []
    if name is not None:
        out.append(f"network {name}")
    for (u, v) in graph.arcs:
        out.append(f"A {u} {v}")
    for v, taxon in sorted(graph.labels.items()):
        out.append(f"L {v} {taxon}")
    return "\n".join(out) + "\n"


def serialize_document(doc: EdgeListDocument) -> str:
    return serialize_edgelist(doc.graph, doc.name)


# -- extensions --------------------------------------------------------------


def parse_extension(text: str, host: Digraph) -> TreeExtension:
    arcs = []
    seen: dict = {}
    for lineno, line in _lines(text):
        toks = _tokens(line)
        col, kind = toks[0]
        if kind != "E":
            raise ParseError(f"unknown directive {kind!r}", lineno, col)
        if len(toks) != 3:
            raise ParseError("extension line needs a parent and a child", lineno, col)
        parent, child = toks[1][1], toks[2][1]
        for tok_col, v in (toks[1], toks[2]):
            if v not in host:
                raise ParseError(f"unknown vertex {v!r}", lineno, tok_col)
        if parent == child:
            raise ParseError(f"self-loop on {parent!r}", lineno, toks[1][0])
        if (parent, child) in seen:
            raise ParseError(f"duplicate line for ({parent}, {child})", lineno, col)
        seen[(parent, child)] = lineno
        arcs.append((parent, child))
    if not arcs:
        raise ParseError("extension document contains no lines", 1, 1)
    gamma = Digraph(arcs)
    ext = TreeExtension(host, gamma)
    ext.require_valid()
    return ext


def serialize_extension(ext: TreeExtension) -> str:
    return "\n".join(f"E {p} {c}" for (p, c) in ext.gamma.arcs) + "\n"


# -- eNewick -----------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z0-9_.+-]+")
_NUMBER_RE = re.compile(r"[0-9.eE+-]+")
_HYBRID_RE = re.compile(r"#[A-Za-z]*[0-9]+")


class _Newick:
    """Recursive-descent parser; vertex ids are n0, n1, ... in parse order.

    Parsing is two-phase: first the text becomes a node tree, then a
    pre-order walk assigns ids and merges hybrid occurrences.
    """

    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.counter = 0
        self.arcs: list = []
        self.labels: dict = {}
        self.hybrids: dict = {}       # tag -> vertex id
        self.has_children: set = set()

    def error(self, message):
        raise ParseError(message, 1, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def fresh(self):
        vid = f"n{self.counter}"
        self.counter += 1
        return vid

    def parse(self) -> Digraph:
        tree = self.subtree()
        self.expect(";")
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing characters after ';'")
        root = self.assign(tree, None)
        labels = {v: t for v, t in self.labels.items()
                  if v not in self.has_children}
        seen = set()
        for v, t in sorted(labels.items()):
            if t in seen:
                raise ParseError(f"taxon {t!r} on two distinct leaves", 1, 1)
            seen.add(t)
        return Digraph(self.arcs, labels, (root,))

    def subtree(self) -> dict:
        children = []
        start = self.pos
        if self.peek() == "(":
            self.pos += 1
            children.append(self.subtree())
            while self.peek() == ",":
                self.pos += 1
                children.append(self.subtree())
            self.expect(")")
        name, tag = self.decoration()
        if tag is None and name is None and not children:
            self.error("expected a subtree")
        return {"children": children, "name": name, "tag": tag, "pos": start}

    def assign(self, node, parent) -> str:
        tag = node["tag"]
        if tag is not None:
            known = tag in self.hybrids
            vid = self.hybrids.setdefault(tag, self.fresh())
            if node["children"] and vid in self.has_children:
                raise ParseError(f"hybrid {tag!r} given two child sets",
                                 1, node["pos"] + 1)
            if not known and node["name"] is not None:
                self.labels[vid] = node["name"]
        else:
            vid = self.fresh()
            if node["name"] is not None:
                self.labels[vid] = node["name"]
        if parent is not None:
            self.arcs.append((parent, vid))
        for child in node["children"]:
            self.has_children.add(vid)
            self.assign(child, vid)
        return vid

    def decoration(self):
        name = tag = None
        m = _NAME_RE.match(self.text, self.pos) if self.peek() not in "#:(),;" else None
        if m and self.peek() != "":
            name = m.group()
            self.pos = m.end()
        if self.peek() == "#":
            m = _HYBRID_RE.match(self.text, self.pos)
            if not m:
                self.error("malformed hybrid tag")
            tag = m.group()
            self.pos = m.end()
        if self.peek() == ":":
            self.pos += 1
            self.skip_ws()
            m = _NUMBER_RE.match(self.text, self.pos)
            if not m:
                self.error("expected a branch length after ':'")
            try:
                float(m.group())
            except ValueError:
                self.error(f"bad branch length {m.group()!r}")
            self.pos = m.end()  # branch lengths are parsed and discarded
        return name, tag


def parse_enewick(text: str) -> Digraph:
    """Parse an (extended) Newick string into a digraph.

    Hybrid tags (`#H1` etc.) merge all their occurrences into one vertex;
    at most one occurrence may carry children, and only the first
    occurrence's name is kept.  Branch lengths are accepted and discarded.
    """
    if not text.strip():
        raise ParseError("empty document", 1, 1)
    return _Newick(text.strip()).parse()
