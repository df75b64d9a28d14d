"""Partial answers and the per-vertex tables that accumulate them.

A partial answer is a tree rooted at the vertex that owns it, reaching
a node for every keyword in its keyword-set mask.  Vertices keep the
non-dominated partials per mask; merging a neighbour's table extends
each entry across the connecting edge and then cross-combines entries
of disjoint masks.  Edge sets are explicit so that unions count shared
edges once and cycles are rejected outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

MAX_KEYWORDS = 12

EdgeTriple = tuple[int, int, int]  # (lo, hi, weight)


class QueryError(ValueError):
    """Raised for unusable queries."""


class KeywordNotFound(QueryError):
    """Raised when some query keyword matches no node."""

    def __init__(self, keywords: list[str]) -> None:
        self.keywords = keywords
        super().__init__(f"no nodes match keyword(s): {', '.join(keywords)}")


class TreeAccountingError(AssertionError):
    """Raised when branch bookkeeping disagrees with an answer's weight."""


@dataclass(frozen=True)
class Query:
    keywords: tuple[str, ...]
    k: int

    def __post_init__(self) -> None:
        if not self.keywords:
            raise QueryError("query needs at least one keyword")
        if len(set(self.keywords)) != len(self.keywords):
            raise QueryError("query keywords must be distinct")
        if len(self.keywords) > MAX_KEYWORDS:
            raise QueryError(f"at most {MAX_KEYWORDS} keywords supported")
        if self.k < 1:
            raise QueryError("k must be >= 1")

    @property
    def m(self) -> int:
        return len(self.keywords)

    @property
    def full_mask(self) -> int:
        return (1 << self.m) - 1


def resolve_keyword_nodes(query: Query, index) -> tuple[tuple[int, ...], ...]:
    """Map each query keyword to its sorted group of matching nodes."""
    groups = []
    missing = []
    for kw in query.keywords:
        nodes = index.nodes_for(kw)
        if not nodes:
            missing.append(kw)
        groups.append(tuple(nodes))
    if missing:
        raise KeywordNotFound(missing)
    return tuple(groups)


def node_cover_masks(groups: Iterable[Iterable[int]], node_count: int) -> list[int]:
    """Per-node bitmask of the keyword groups the node belongs to."""
    covers = [0] * node_count
    for bit, group in enumerate(groups):
        for v in group:
            covers[v] |= 1 << bit
    return covers


class PartialAnswer(NamedTuple):
    """A tree rooted at ``root`` whose nodes cover the keyword-sets in
    ``mask``.  ``edges`` is kept sorted, which doubles as the canonical
    identity of the tree; ``length`` is the sum of distinct edge weights.
    """

    mask: int
    length: int
    root: int
    edges: tuple[EdgeTriple, ...]
    nodes: frozenset[int]
    keyword_nodes: tuple[tuple[int, int], ...]  # (keyword bit, node), sorted

    @property
    def order_key(self) -> tuple:
        return (self.length, self.edges, self.keyword_nodes)


def seed_entries(v: int, cover_mask: int) -> list[PartialAnswer]:
    """Zero-length partials for every keyword a node holds."""
    out = []
    bit = 0
    mask = cover_mask
    while mask:
        if mask & 1:
            out.append(PartialAnswer(1 << bit, 0, v, (), frozenset({v}), ((bit, v),)))
        mask >>= 1
        bit += 1
    return out


def extend_entry(entry: PartialAnswer, src: int, dst: int, weight: int) -> PartialAnswer | None:
    """Re-root an entry across the edge (src, dst).

    Walking into a node already inside the tree is only legal along an
    edge the tree contains (a pure re-rooting); anything else would
    close a cycle and is dropped.
    """
    lo, hi = (src, dst) if src < dst else (dst, src)
    if dst in entry.nodes:
        if (lo, hi, weight) in entry.edges:
            return entry._replace(root=dst)
        return None
    edges = tuple(sorted(entry.edges + ((lo, hi, weight),)))
    return PartialAnswer(
        entry.mask, entry.length + weight, dst, edges, entry.nodes | {dst}, entry.keyword_nodes
    )


def combine_entries(a: PartialAnswer, b: PartialAnswer) -> PartialAnswer | None:
    """Join two partials rooted at the same vertex with disjoint masks.

    The union must stay a tree: both trees contain the shared root, so
    the union is connected and acyclicity reduces to the edge count.
    Shared edges are counted once in the combined length.
    """
    if a.mask & b.mask or a.root != b.root:
        return None
    edges = set(a.edges)
    edges.update(b.edges)
    nodes = a.nodes | b.nodes
    if len(edges) != len(nodes) - 1:
        return None
    length = sum(w for _, _, w in edges)
    return PartialAnswer(
        a.mask | b.mask,
        length,
        a.root,
        tuple(sorted(edges)),
        nodes,
        tuple(sorted(a.keyword_nodes + b.keyword_nodes)),
    )


class NewEntry(NamedTuple):
    entry: PartialAnswer
    joined: tuple[PartialAnswer, PartialAnswer] | None  # set for cross-combinations


class PartialTable:
    """Per-mask lists of partial answers, cheapest first."""

    __slots__ = ("lists",)

    def __init__(self) -> None:
        self.lists: dict[int, list[PartialAnswer]] = {}

    def entries(self) -> Iterable[PartialAnswer]:
        for mask in sorted(self.lists):
            yield from self.lists[mask]

    def min_length(self, mask: int) -> int | None:
        lst = self.lists.get(mask)
        return lst[0].length if lst else None

    def _insert(self, entry: PartialAnswer) -> bool:
        """Insert keeping order; duplicates (same tree, same mask) keep
        the canonically smaller keyword assignment.  True if new."""
        lst = self.lists.setdefault(entry.mask, [])
        for i, have in enumerate(lst):
            if have.edges == entry.edges:
                if entry.order_key < have.order_key:
                    lst[i] = entry
                return False
        lst.append(entry)
        lst.sort(key=lambda e: e.order_key)
        return True

    def absorb(self, incoming: list[PartialAnswer], best_bound: int | None = None) -> list[NewEntry]:
        """Insert entries and chase cross-combinations to a fixpoint.

        Every accepted entry is combined against all disjoint-mask
        entries present at that moment; combinations re-enter the work
        queue, so joins of joins (multi-branch roots) form in a single
        pass.  Entries longer than ``best_bound`` cannot take part in
        any answer that would still matter and are skipped.
        """
        new: list[NewEntry] = []
        work: list[NewEntry] = [NewEntry(e, None) for e in incoming]
        pos = 0
        while pos < len(work):
            item = work[pos]
            pos += 1
            entry = item.entry
            if best_bound is not None and entry.length > best_bound:
                continue
            if not self._insert(entry):
                continue
            new.append(item)
            for mask in sorted(self.lists):
                if mask & entry.mask:
                    continue
                for other in list(self.lists[mask]):
                    combined = combine_entries(entry, other)
                    if combined is not None:
                        work.append(NewEntry(combined, (entry, other)))
        return new

    def truncate(self, k: int) -> None:
        """Purge entries that cannot take part in any remaining answer.

        An entry is dropped when another entry of the same mask spans a
        proper subset of its nodes at no greater length: swapping the
        smaller entry into any tree the bigger one could complete yields a
        strictly smaller tree covering the same keywords, so the bigger
        entry never appears in a minimal answer.  Plain rank-K cutoffs are
        tempting here but unsafe: the evicting entries may overlap the
        completion the evicted one was needed for.
        """
        del k
        for mask in list(self.lists):
            lst = self.lists[mask]
            if len(lst) < 2:
                continue
            # proper-subset dominance is antisymmetric, so testing against
            # the original list cannot drop two entries off each other
            keep = [
                e
                for e in lst
                if not any(
                    other.nodes < e.nodes and other.length <= e.length
                    for other in lst
                )
            ]
            if len(keep) != len(lst):
                self.lists[mask] = keep

    def contains(self, entry: PartialAnswer) -> bool:
        return any(have.edges == entry.edges for have in self.lists.get(entry.mask, ()))

    def local_tree_nodes(self) -> set[int]:
        """Union of nodes over all retained entries."""
        out: set[int] = set()
        for lst in self.lists.values():
            for e in lst:
                out |= e.nodes
        return out


class AnswerTree(NamedTuple):
    """An extracted, minimal answer: weight plus the exact tree."""

    weight: int
    root: int
    edges: tuple[EdgeTriple, ...]
    nodes: frozenset[int]
    keyword_nodes: tuple[tuple[int, int], ...]

    @property
    def key(self) -> tuple:
        return self.edges if self.edges else (("node", self.root),)

    @property
    def order_key(self) -> tuple:
        return (self.weight, self.key)


def extract_answer(entry: PartialAnswer, covers: list[int], full_mask: int) -> AnswerTree:
    """Trim a full-mask entry down to a minimal answer tree.

    Leaves whose keywords are all present elsewhere in the tree are
    pruned (smallest node id first, to a fixpoint), which enforces
    minimality: every surviving leaf is needed.  The keyword assignment
    is recomputed canonically on the pruned tree.
    """
    nodes = set(entry.nodes)
    edges = set(entry.edges)
    root = entry.root
    degree = {v: 0 for v in nodes}
    touch = {v: [] for v in nodes}
    for e in edges:
        lo, hi, _ = e
        degree[lo] += 1
        degree[hi] += 1
        touch[lo].append(e)
        touch[hi].append(e)

    while len(nodes) > 1:
        removed = False
        for v in sorted(nodes):
            if degree[v] != 1:
                continue
            rest = 0
            for u in nodes:
                if u != v:
                    rest |= covers[u]
            if rest & full_mask != full_mask:
                continue
            (edge,) = [e for e in touch[v] if e in edges]
            lo, hi, _ = edge
            other = hi if v == lo else lo
            nodes.remove(v)
            edges.remove(edge)
            degree[other] -= 1
            del degree[v]
            if root == v:
                root = other
            removed = True
            break
        if not removed:
            break

    weight = sum(w for _, _, w in edges)
    assignment = []
    bit = 0
    mask = full_mask
    while mask:
        if mask & 1:
            assignment.append((bit, min(v for v in nodes if covers[v] >> bit & 1)))
        mask >>= 1
        bit += 1
    return AnswerTree(weight, root, tuple(sorted(edges)), frozenset(nodes), tuple(assignment))


def branch_decomposition(answer: AnswerTree, covers: list[int], full_mask: int) -> dict[int, int]:
    """Split an answer at its root into branch keyword-sets and weights.

    Each child subtree of the root yields one constituent: the mask of
    query keywords its nodes hold and the weight of the branch including
    the edge to the root.  Minimal trees never produce two branches with
    the same mask; if that happens the tree bookkeeping is broken.
    """
    if not answer.edges:
        return {}
    adj: dict[int, list[EdgeTriple]] = {v: [] for v in answer.nodes}
    for e in answer.edges:
        adj[e[0]].append(e)
        adj[e[1]].append(e)
    out: dict[int, int] = {}
    for first in adj[answer.root]:
        child = first[1] if first[0] == answer.root else first[0]
        mask = 0
        weight = first[2]
        stack = [(child, answer.root)]
        while stack:
            v, parent = stack.pop()
            mask |= covers[v]
            for e in adj[v]:
                u = e[1] if e[0] == v else e[0]
                if u != parent:
                    weight += e[2]
                    stack.append((u, v))
        mask &= full_mask
        if mask in out:
            raise TreeAccountingError(
                f"two root branches share keyword-set {mask:b} in answer {answer.key}"
            )
        out[mask] = weight
    return out


def answer_weight_from_branches(answer: AnswerTree, covers: list[int], full_mask: int) -> int:
    """Answer weight as the sum over constituent branches.

    Must equal the plain sum of distinct edge weights; a mismatch means
    the tree or its decomposition lost track of a shared edge.
    """
    total = sum(branch_decomposition(answer, covers, full_mask).values())
    direct = sum(w for _, _, w in answer.edges)
    if total != direct:
        raise TreeAccountingError(
            f"branch sum {total} != edge sum {direct} for answer {answer.key}"
        )
    return total
