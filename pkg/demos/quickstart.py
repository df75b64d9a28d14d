"""Smallest possible tour: build a graph inline, ask for two keywords.

The graph is four nodes around a cheap detour; the direct edge between
the keyword nodes costs more than the two-hop path, so the best answer
is a tree through the relay.  The per-superstep trace shows the exit
criterion firing as soon as the frontier is provably too expensive.
"""

from __future__ import annotations

from dks import Graph, add_reverse_edges, build_inverted_index, run_search
from dks.harness import prepare_query
from dks.partials import resolve_keyword_nodes


def main() -> None:
    texts = ["alpha bridge", "relay station", "delta sink", "alpha spur"]
    edges = [(0, 1, 1), (1, 2, 2), (0, 2, 4), (2, 3, 5)]
    graph = add_reverse_edges(Graph.build(texts, edges))

    query = prepare_query("alpha delta", k=2)
    groups = resolve_keyword_nodes(query, build_inverted_index(graph))
    result = run_search(graph, query, groups)

    print(f"query keywords: {query.keywords}, K={query.k}")
    print(f"halt: {result.halt_label} after {result.supersteps} supersteps")
    for rank, answer in enumerate(result.answers, start=1):
        print(f"  #{rank}: weight {answer.weight} via edges {answer.edges}")

    print("\nper-superstep trace:")
    for rec in result.trace:
        print(
            f"  superstep {rec.superstep}: frontier minima {rec.frontier_minima}, "
            f"answers {rec.answers_found}, exit fired: {rec.exit_fired}"
        )
    print(f"\nexplored {result.explored}/{result.node_count} nodes")


if __name__ == "__main__":
    main()
