"""Graph ingestion, edge weighting and the keyword index.

The search pipeline operates on a directed graph whose nodes carry free
text.  Input arrives either as a pair of tab-separated files (nodes and
edges) or as a small N-Triples subset.  Before a search runs the graph is
weighted (explicit weights or the in-degree step function) and closed
under edge reversal so traversals can walk edges in both directions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

DEFAULT_DEGREE_CUTOFF = 1001

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph input."""


class Node(NamedTuple):
    id: int
    text: str


class Edge(NamedTuple):
    src: int
    dst: int
    weight: int | None


@dataclass
class Graph:
    """Directed graph with optional per-edge labels.

    Node ids are dense and 0-based.  ``symmetric`` is set once
    :func:`add_reverse_edges` has run; a symmetric graph is treated as
    immutable by everything downstream.
    """

    nodes: list[Node]
    adj: list[list[Edge]] = field(default_factory=list)
    symmetric: bool = False
    edge_labels: dict[tuple[int, int], str] = field(default_factory=dict)

    @classmethod
    def build(cls, texts: Iterable[str], edges: Iterable[tuple[int, int] | tuple[int, int, int]]) -> "Graph":
        """Construct a graph from node texts and (src, dst[, weight]) tuples."""
        nodes = [Node(i, t) for i, t in enumerate(texts)]
        g = cls(nodes=nodes, adj=[[] for _ in nodes])
        for e in edges:
            src, dst = e[0], e[1]
            weight = e[2] if len(e) > 2 else None
            g._add_edge(src, dst, weight)
        return g

    def _add_edge(self, src: int, dst: int, weight: int | None) -> None:
        n = len(self.nodes)
        if not (0 <= src < n and 0 <= dst < n):
            raise GraphFormatError(f"edge ({src}, {dst}) references unknown node")
        if src == dst:
            raise GraphFormatError(f"self-loop on node {src} is not allowed")
        if weight is not None and weight <= 0:
            raise GraphFormatError(f"edge ({src}, {dst}) has non-positive weight {weight}")
        if any(e.dst == dst for e in self.adj[src]):
            raise GraphFormatError(f"duplicate edge ({src}, {dst})")
        self.adj[src].append(Edge(src, dst, weight))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return sum(len(out) for out in self.adj)

    @property
    def has_weights(self) -> bool:
        return all(e.weight is not None for out in self.adj for e in out)

    def neighbors(self, v: int) -> list[Edge]:
        return self.adj[v]

    def text(self, v: int) -> str:
        return self.nodes[v].text

    def edges(self) -> Iterable[Edge]:
        for out in self.adj:
            yield from out


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def _parse_lines(path: str) -> Iterable[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def ingest_edge_list(nodes_path: str, edges_path: str) -> Graph:
    """Load a graph from tab-separated node and edge files.

    Node lines are ``id<TAB>text``; ids must form a dense 0-based range.
    Edge lines are ``src<TAB>dst`` or ``src<TAB>dst<TAB>weight``; the
    weight column must be used consistently across the whole file.
    ``#`` starts a comment line in either file.
    """
    texts: dict[int, str] = {}
    for lineno, parts in _parse_lines(nodes_path):
        if len(parts) != 2:
            raise GraphFormatError(f"{nodes_path}:{lineno}: expected id<TAB>text")
        try:
            nid = int(parts[0])
        except ValueError:
            raise GraphFormatError(f"{nodes_path}:{lineno}: bad node id {parts[0]!r}") from None
        if nid in texts:
            raise GraphFormatError(f"{nodes_path}:{lineno}: duplicate node id {nid}")
        texts[nid] = parts[1]
    if not texts:
        raise GraphFormatError(f"{nodes_path}: no nodes")
    n = len(texts)
    if sorted(texts) != list(range(n)):
        raise GraphFormatError(f"{nodes_path}: node ids must be dense and 0-based")

    g = Graph(nodes=[Node(i, texts[i]) for i in range(n)], adj=[[] for _ in range(n)])
    weighted: bool | None = None
    for lineno, parts in _parse_lines(edges_path):
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"{edges_path}:{lineno}: expected src<TAB>dst[<TAB>weight]")
        has_w = len(parts) == 3
        if weighted is None:
            weighted = has_w
        elif weighted != has_w:
            raise GraphFormatError(f"{edges_path}:{lineno}: inconsistent weight column")
        try:
            src, dst = int(parts[0]), int(parts[1])
            weight = int(parts[2]) if has_w else None
        except ValueError:
            raise GraphFormatError(f"{edges_path}:{lineno}: bad edge line {parts!r}") from None
        try:
            g._add_edge(src, dst, weight)
        except GraphFormatError as exc:
            raise GraphFormatError(f"{edges_path}:{lineno}: {exc}") from None
    return g


def write_edge_list(g: Graph, nodes_path: str, edges_path: str) -> None:
    """Serialize a graph back to the tab-separated file pair."""
    with open(nodes_path, "w", encoding="utf-8") as fh:
        for node in g.nodes:
            fh.write(f"{node.id}\t{node.text}\n")
    with open(edges_path, "w", encoding="utf-8") as fh:
        for edge in g.edges():
            if edge.weight is None:
                fh.write(f"{edge.src}\t{edge.dst}\n")
            else:
                fh.write(f"{edge.src}\t{edge.dst}\t{edge.weight}\n")


_NT_TERM = re.compile(
    r"""\s*(<[^>]*>|_:[A-Za-z0-9]+|"(?:[^"\\]|\\.)*"(?:\^\^<[^>]*>|@[A-Za-z0-9-]+)?)"""
)


def _nt_text(term: str) -> str:
    if term.startswith("<"):
        iri = term[1:-1]
        return re.split(r"[#/]", iri)[-1] or iri
    if term.startswith("_:"):
        return term[2:]
    body = term[1:term.rindex('"')]
    return body.encode().decode("unicode_escape")


def load_ntriples(path: str) -> Graph:
    """Load a graph from a small N-Triples subset.

    Each distinct subject/object term becomes a node whose text is the
    IRI local name (or the literal text).  Predicates become edge labels
    kept for output only.  Self-loops are skipped and parallel edges are
    collapsed onto the first predicate seen.
    """
    ids: dict[str, int] = {}
    texts: list[str] = []
    triples: list[tuple[int, int, str]] = []

    def node_of(term: str) -> int:
        if term not in ids:
            ids[term] = len(texts)
            texts.append(_nt_text(term))
        return ids[term]

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            terms = []
            pos = 0
            for _ in range(3):
                m = _NT_TERM.match(line, pos)
                if not m:
                    raise GraphFormatError(f"{path}:{lineno}: malformed triple")
                terms.append(m.group(1))
                pos = m.end()
            if line[pos:].strip() != ".":
                raise GraphFormatError(f"{path}:{lineno}: triple must end with '.'")
            s, p, o = terms
            if not p.startswith("<"):
                raise GraphFormatError(f"{path}:{lineno}: predicate must be an IRI")
            si, oi = node_of(s), node_of(o)
            if si != oi:
                triples.append((si, oi, _nt_text(p)))

    if not texts:
        raise GraphFormatError(f"{path}: no triples")
    g = Graph(nodes=[Node(i, t) for i, t in enumerate(texts)], adj=[[] for _ in texts])
    for src, dst, label in triples:
        if any(e.dst == dst for e in g.adj[src]):
            continue
        g.adj[src].append(Edge(src, dst, None))
        g.edge_labels[(src, dst)] = label
    return g


def assign_step_weights(g: Graph, cutoff: int = DEFAULT_DEGREE_CUTOFF) -> Graph:
    """Weight every edge by a step function of its target's in-degree.

    An edge into a node of in-degree d gets weight 1 + floor(log10(d)),
    i.e. the number of decimal digits of d.  Edges into nodes of
    in-degree >= ``cutoff`` are removed outright: such targets are too
    common to be informative.  In-degrees are taken on the directed
    graph as ingested, so this must run before :func:`add_reverse_edges`.
    """
    if g.symmetric:
        raise GraphFormatError("assign weights before adding reverse edges")
    if cutoff < 2:
        raise GraphFormatError(f"degree cutoff must be >= 2, got {cutoff}")
    indeg = [0] * g.node_count
    for edge in g.edges():
        indeg[edge.dst] += 1
    new_adj: list[list[Edge]] = [[] for _ in range(g.node_count)]
    kept = 0
    for edge in g.edges():
        d = indeg[edge.dst]
        if d >= cutoff:
            continue
        new_adj[edge.src].append(Edge(edge.src, edge.dst, len(str(d))))
        kept += 1
    if kept == 0:
        raise GraphFormatError("no edges survive the in-degree cutoff")
    g.adj = new_adj
    return g


def add_reverse_edges(g: Graph) -> Graph:
    """Close the graph under edge reversal.

    Every edge gains a reverse twin carrying the same weight, so the
    search can expand against edge direction at equal cost.  When both
    directions already exist with different weights they are unified to
    the cheaper one: downstream code treats edges as undirected and a
    pair must agree on its weight.  Idempotent.
    """
    if not g.has_weights:
        raise GraphFormatError("assign weights before adding reverse edges")
    cheapest: dict[tuple[int, int], int] = {}
    for e in g.edges():
        lo, hi = (e.src, e.dst) if e.src < e.dst else (e.dst, e.src)
        pair = (lo, hi)
        if pair not in cheapest or e.weight < cheapest[pair]:
            cheapest[pair] = e.weight
    new_adj: list[list[Edge]] = [[] for _ in range(g.node_count)]
    for (lo, hi), weight in cheapest.items():
        new_adj[lo].append(Edge(lo, hi, weight))
        new_adj[hi].append(Edge(hi, lo, weight))
    for out in new_adj:
        out.sort(key=lambda e: e.dst)
    g.adj = new_adj
    g.symmetric = True
    return g


def undirected_weights(g: Graph) -> dict[tuple[int, int], int]:
    """Map each undirected edge pair (lo, hi) to its weight.

    Requires the symmetric closure: both directions must exist and agree.
    """
    out: dict[tuple[int, int], int] = {}
    for e in g.edges():
        if e.weight is None:
            raise GraphFormatError("graph has unweighted edges")
        lo, hi = (e.src, e.dst) if e.src < e.dst else (e.dst, e.src)
        have = out.get((lo, hi))
        if have is None:
            out[(lo, hi)] = e.weight
        elif have != e.weight:
            raise GraphFormatError(
                f"edge ({lo}, {hi}) has direction-dependent weights {have} and {e.weight}"
            )
    directed = sum(len(adj) for adj in g.adj)
    if directed != 2 * len(out):
        raise GraphFormatError("graph is not closed under edge reversal")
    return out


def min_edge_weight(g: Graph) -> int:
    """Smallest edge weight in the graph; the exit test leans on it."""
    weights = [e.weight for e in g.edges()]
    if not weights:
        raise GraphFormatError("graph has no edges")
    if any(w is None for w in weights):
        raise GraphFormatError("graph has unweighted edges")
    return min(weights)  # type: ignore[type-var]


@dataclass(frozen=True)
class InvertedIndex:
    """Keyword -> sorted node ids whose text contains the keyword."""

    postings: dict[str, tuple[int, ...]]

    def nodes_for(self, keyword: str) -> tuple[int, ...]:
        return self.postings.get(keyword, ())

    def vocabulary(self) -> list[str]:
        return sorted(self.postings)


def build_inverted_index(g: Graph) -> InvertedIndex:
    """Index every token of every node text."""
    postings: dict[str, set[int]] = {}
    for node in g.nodes:
        for token in tokenize(node.text):
            postings.setdefault(token, set()).add(node.id)
    return InvertedIndex({t: tuple(sorted(v)) for t, v in sorted(postings.items())})
