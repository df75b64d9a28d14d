"""Shared fixtures: small deterministic graphs and a random corpus.

The corpus generator produces connected undirected graphs of at most
twelve nodes with integer weights 1..4, the size class where the
enumeration oracle stays fast enough to certify every answer.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import pytest

from dks.graph import Graph, InvertedIndex, add_reverse_edges, build_inverted_index
from dks.partials import resolve_keyword_nodes
from dks.harness import prepare_query

WORDS = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta")


@dataclass
class Instance:
    graph: Graph
    index: InvertedIndex
    terms: tuple[str, ...]
    k: int

    @property
    def query_text(self) -> str:
        return " ".join(self.terms)

    def groups(self) -> tuple[tuple[int, ...], ...]:
        query = prepare_query(self.query_text, self.k)
        return resolve_keyword_nodes(query, self.index)


def random_graph(rng: random.Random, n_max: int = 12, w_max: int = 4) -> Graph:
    """A connected graph with random keyword texts and weights 1..w_max."""
    n = rng.randint(3, n_max)
    texts = []
    for i in range(n):
        kws = rng.sample(WORDS, rng.randint(0, 3))
        texts.append(" ".join(kws) if kws else f"blank{i}")
    edges: set[tuple[int, int]] = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        a, b = order[rng.randrange(i)], order[i]
        edges.add((min(a, b), max(a, b)))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    weighted = [(a, b, rng.randint(1, w_max)) for a, b in sorted(edges)]
    return add_reverse_edges(Graph.build(texts, weighted))


def corpus(seed: int, count: int, n_max: int = 12, w_max: int = 4):
    """Yield ``count`` instances whose keywords all resolve to nodes."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        graph = random_graph(rng, n_max, w_max)
        index = build_inverted_index(graph)
        m = rng.randint(2, 3)
        terms = tuple(rng.sample(WORDS, m))
        k = rng.choice((1, 2, 3))
        if any(not index.nodes_for(t) for t in terms):
            continue
        produced += 1
        yield Instance(graph, index, terms, k)


@pytest.fixture
def path_graph() -> Graph:
    # alpha --1-- blank --2-- delta, the smallest two-keyword instance
    g = Graph.build(["alpha", "hub node", "delta"], [(0, 1, 1), (1, 2, 2)])
    return add_reverse_edges(g)


@pytest.fixture
def detour_graph() -> Graph:
    # four nodes around a cheap triangle; "alpha delta" has optimum 3
    texts = ["alpha bridge", "relay station", "delta sink", "alpha spur"]
    edges = [(0, 1, 1), (1, 2, 2), (0, 2, 4), (2, 3, 5)]
    return add_reverse_edges(Graph.build(texts, edges))


@pytest.fixture
def hub_graph() -> Graph:
    # one node holds every keyword, surrounded by decoys; exercises the
    # zero-weight answer path and early exit
    texts = ["alpha beta gamma", "alpha", "beta", "gamma", "blank"]
    edges = [(0, 1, 2), (0, 2, 2), (0, 3, 2), (1, 4, 1), (2, 4, 3)]
    return add_reverse_edges(Graph.build(texts, edges))
