"""Brute-force reference answers for small instances.

Everything here recomputes results from first principles so the search
pipeline can be checked against an independent route: an exact dynamic
program for the optimal answer weight, an exhaustive enumeration of
minimal answer trees for full top-K comparisons, and an exhaustive
set-cover minimum for the lower-bound estimator.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import NamedTuple

from .graph import Graph

MAX_GROUPS = 12
MAX_ENUM_NODES = 14


class OracleError(ValueError):
    """Raised when an instance falls outside the oracle's safe envelope."""


@dataclass(frozen=True)
class GstInstance:
    """A graph plus the node groups an answer tree must connect."""

    graph: Graph
    groups: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if not self.groups:
            raise OracleError("instance needs at least one group")
        if len(self.groups) > MAX_GROUPS:
            raise OracleError(f"at most {MAX_GROUPS} groups supported")
        for i, group in enumerate(self.groups):
            if not group:
                raise OracleError(f"group {i} is empty")
            for v in group:
                if not (0 <= v < self.graph.node_count):
                    raise OracleError(f"group {i} references unknown node {v}")


class OracleAnswer(NamedTuple):
    """A minimal answer tree: exact weight plus its canonical edge set."""

    weight: int
    edges: tuple[tuple[int, int], ...]
    nodes: frozenset[int]

    @property
    def key(self) -> tuple:
        # 0-edge trees carry no edges, so the surviving node disambiguates.
        return self.edges if self.edges else (("node", min(self.nodes)),)


def _undirected(g: Graph) -> dict[tuple[int, int], int]:
    und: dict[tuple[int, int], int] = {}
    for e in g.edges():
        if e.weight is None:
            raise OracleError("oracle requires a fully weighted graph")
        key = (min(e.src, e.dst), max(e.src, e.dst))
        prev = und.get(key)
        if prev is not None and prev != e.weight:
            raise OracleError(f"asymmetric weights on edge {key}")
        und[key] = e.weight
    return und


def _cover_mask(instance: GstInstance, v: int) -> int:
    mask = 0
    for i, group in enumerate(instance.groups):
        if v in group:
            mask |= 1 << i
    return mask


def exact_answer_weight(instance: GstInstance) -> int | None:
    """Exact optimal answer weight by dynamic programming.

    States are (group mask, vertex): the cheapest tree containing the
    vertex and touching every group in the mask.  Masks are solved in
    ascending order by merging complementary submasks at a shared vertex
    and then relaxing along edges with a Dijkstra pass.  Returns None if
    some group cannot be connected.
    """
    g = instance.graph
    n = g.node_count
    m = len(instance.groups)
    full = (1 << m) - 1
    und = _undirected(g)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (a, b), w in und.items():
        adj[a].append((b, w))
        adj[b].append((a, w))

    INF = float("inf")
    dp = [[INF] * n for _ in range(full + 1)]
    for v in range(n):
        node_mask = _cover_mask(instance, v)
        sub = node_mask
        while sub:
            dp[sub][v] = 0
            sub = (sub - 1) & node_mask

    for mask in range(1, full + 1):
        row = dp[mask]
        sub = (mask - 1) & mask
        while sub:
            other = dp[sub]
            rest = dp[mask ^ sub]
            for v in range(n):
                cand = other[v] + rest[v]
                if cand < row[v]:
                    row[v] = cand
            sub = (sub - 1) & mask
        heap = [(d, v) for v, d in enumerate(row) if d < INF]
        heapq.heapify(heap)
        while heap:
            d, v = heapq.heappop(heap)
            if d > row[v]:
                continue
            for u, w in adj[v]:
                cand = d + w
                if cand < row[u]:
                    row[u] = cand
                    heapq.heappush(heap, (cand, u))

    best = min(dp[full])
    return None if best == INF else int(best)


def _is_minimal(tree_nodes: frozenset[int], degree: dict[int, int], covers: dict[int, int], full: int) -> bool:
    # A tree is minimal when no leaf can be dropped: every leaf must hold
    # some group that no other tree node holds.
    if len(tree_nodes) == 1:
        return True
    for v in tree_nodes:
        if degree[v] != 1:
            continue
        rest = 0
        for u in tree_nodes:
            if u != v:
                rest |= covers[u]
        if rest & full == full:
            return False
    return True


def enumerate_answer_trees(instance: GstInstance, k: int) -> list[OracleAnswer]:
    """All minimal answer trees, K smallest by (weight, canonical edges).

    Connected edge subsets are enumerated exactly once each (every
    subtree is grown from its minimum node id, with branch-local edge
    bans), filtered for group coverage and minimality, and ranked.  If
    the graph holds fewer than K minimal trees, all of them are
    returned.  Only safe for graphs with at most ``MAX_ENUM_NODES``
    nodes.
    """
    g = instance.graph
    if g.node_count > MAX_ENUM_NODES:
        raise OracleError(f"enumeration limited to {MAX_ENUM_NODES} nodes")
    if k < 1:
        raise OracleError("k must be >= 1")
    m = len(instance.groups)
    full = (1 << m) - 1
    und = _undirected(g)
    covers = {v: _cover_mask(instance, v) for v in range(g.node_count)}
    adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(g.node_count)}
    for (a, b), w in sorted(und.items()):
        adj[a].append((w, a, b))
        adj[b].append((w, b, a))
    for out in adj.values():
        out.sort()

    found: list[OracleAnswer] = []
    # worst acceptable weight once K minimal trees are known
    def bound() -> float:
        if len(found) < k:
            return float("inf")
        return sorted(a.weight for a in found)[k - 1]

    def report(edges: frozenset[tuple[int, int]], nodes: frozenset[int], weight: int) -> None:
        mask = 0
        for v in nodes:
            mask |= covers[v]
        if mask & full != full:
            return
        degree: dict[int, int] = {v: 0 for v in nodes}
        for a, b in edges:
            degree[a] += 1
            degree[b] += 1
        if not _is_minimal(nodes, degree, covers, full):
            return
        found.append(OracleAnswer(weight, tuple(sorted(edges)), nodes))

    def grow(root: int, edges: frozenset, nodes: frozenset, weight: int, banned: frozenset) -> None:
        report(edges, nodes, weight)
        candidates = []
        for v in nodes:
            for w, _, u in adj[v]:
                if u <= root or u in nodes:
                    continue
                key = (min(v, u), max(v, u))
                if key in banned:
                    continue
                candidates.append((w, v, u, key))
        candidates = sorted(set(candidates))
        new_bans = set()
        for w, v, u, key in candidates:
            if weight + w <= bound():
                grow(root, edges | {key}, nodes | {u}, weight + w, banned | frozenset(new_bans))
            new_bans.add(key)

    for root in range(g.node_count):
        grow(root, frozenset(), frozenset({root}), 0, frozenset())

    found.sort(key=lambda a: (a.weight, a.key))
    return found[:k]


def min_cover_weight_exhaustive(costs: dict[int, int], m: int) -> int | None:
    """Cheapest subset of masks whose union covers all m groups.

    Checks every subset of the available masks outright, so it stays an
    independent reference for the dynamic-programming estimator.  Only
    feasible for small tables; returns None when no subset covers.
    """
    if m < 1 or m > MAX_GROUPS:
        raise OracleError(f"m must be in 1..{MAX_GROUPS}")
    full = (1 << m) - 1
    masks = sorted(costs)
    if len(masks) > 20:
        raise OracleError("exhaustive cover limited to 20 masks")
    for mask in masks:
        if not 0 < mask <= full:
            raise OracleError(f"mask {mask} out of range for m={m}")
    best: int | None = None
    for pick in range(1, 1 << len(masks)):
        union = 0
        total = 0
        for i, mask in enumerate(masks):
            if pick >> i & 1:
                union |= mask
                total += costs[mask]
        if union == full and (best is None or total < best):
            best = total
    return best
