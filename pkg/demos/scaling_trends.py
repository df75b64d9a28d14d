"""Trend experiment on a synthetic scale-free graph.

Generates a preferential-attachment graph with Zipf-ish node texts,
sweeps a seeded workload over several K values and prints the two
trends worth watching: deep-message volume grows with K (bigger answer
lists keep more partials in flight after the stop), while the explored
share of the graph stays well under 100% whenever the exit fires.

Pass a node count to override the default (20000).
"""

from __future__ import annotations

import sys
from statistics import mean, median

from dks import generate_queries, run_bench, synthetic_text_graph, write_bench_csv


def main() -> None:
    node_count = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
    graph = synthetic_text_graph(node_count, seed=5)
    workload = generate_queries(graph, 10, seed=5)
    print(f"graph: {node_count} nodes, {graph.edge_count} directed edges")
    print(f"workload: {len(workload)} queries, K in 1/2/5/10\n")

    reports = run_bench(graph, workload, k_values=[1, 2, 5, 10])

    print(f"{'K':>3} {'mean deep':>12} {'mean explored%':>15} {'exits':>6}")
    for k in (1, 2, 5, 10):
        rows = [r for r in reports if r.k == k]
        exits = sum(1 for r in rows if r.halt_reason == "exit")
        print(
            f"{k:>3} {mean(r.deep_messages for r in rows):>12.1f} "
            f"{mean(r.explored_pct for r in rows):>15.1f} {exits:>6}"
        )

    exited = [r.explored_pct for r in reports if r.halt_reason == "exit"]
    if exited:
        print(f"\nmedian explored% over exit-terminated runs: {median(exited):.1f}")

    write_bench_csv(reports, "scaling_trends.csv")
    print("full per-run metrics written to scaling_trends.csv")


if __name__ == "__main__":
    main()
