"""Why partials keep moving after the frontier stops.

The frontier criterion watches the cheapest *new* arrivals per
keyword-set.  A lopsided answer can hide from it: here a cheap chain of
one keyword group connects the other two keywords entirely through
already-seeded nodes, while an expensive spur is the only place the
frontier still grows.  Freezing everything at the stop would return the
decoy tree; letting in-flight partials finish their hops between
already-acquainted vertices recovers the true optimum.
"""

from __future__ import annotations

from dks import (
    Graph,
    GstInstance,
    SearchOptions,
    add_reverse_edges,
    build_inverted_index,
    enumerate_answer_trees,
    run_search,
)
from dks.harness import prepare_query
from dks.partials import resolve_keyword_nodes


def build_fixture() -> Graph:
    texts = ["alpha", "beta"] + ["gamma"] * 6 + ["spur"]
    edges = [
        (0, 2, 5),  # the decoy: alpha and beta meet a gamma for 10
        (1, 2, 5),
        (0, 3, 1),  # the real answer: a six-hop gamma chain for 6
        (3, 4, 1),
        (4, 5, 1),
        (5, 6, 1),
        (6, 7, 1),
        (7, 1, 1),
        (0, 8, 10),  # expensive spur, keeps one unexplored node around
    ]
    return add_reverse_edges(Graph.build(texts, edges))


def main() -> None:
    graph = build_fixture()
    query = prepare_query("alpha beta gamma", k=1)
    groups = resolve_keyword_nodes(query, build_inverted_index(graph))

    reference = enumerate_answer_trees(
        GstInstance(graph, tuple(frozenset(g) for g in groups)), query.k
    )
    print(f"exhaustive reference: weight {reference[0].weight}")

    frozen = run_search(graph, query, groups, SearchOptions(disable_deep=True))
    print(
        f"drain disabled:  weight {frozen.answers[0].weight} "
        f"(halt {frozen.halt_label}, deep messages {frozen.deep_sent})"
    )

    drained = run_search(graph, query, groups)
    print(
        f"drain enabled:   weight {drained.answers[0].weight} "
        f"(halt {drained.halt_label}, deep messages {drained.deep_sent})"
    )

    print("\ntimeline with the drain:")
    for rec in drained.trace:
        print(
            f"  superstep {rec.superstep}: bfs {rec.bfs_sent}, deep {rec.deep_sent}, "
            f"best {rec.best_weights}, exit fired: {rec.exit_fired}"
        )


if __name__ == "__main__":
    main()
