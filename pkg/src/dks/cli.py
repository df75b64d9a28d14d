"""Command line entry points.

Four subcommands: ``run`` executes one query and emits answer JSON,
``bench`` sweeps a workload into a CSV, ``oracle`` answers a query by
exhaustive enumeration for diffing, and ``gen-queries`` produces a
seeded workload.  Exit codes: 0 success, 2 keyword not found, 3 budget
exceeded, 1 anything else.
"""

from __future__ import annotations

import argparse
import sys

from .graph import GraphFormatError, build_inverted_index
from .harness import (
    answer_document,
    canonical_json,
    generate_queries,
    load_graph,
    metrics_lines,
    oracle_document,
    run_bench,
    run_query,
    write_bench_csv,
)
from .partials import KeywordNotFound, Query, QueryError, resolve_keyword_nodes

RC_OK = 0
RC_ERROR = 1
RC_NO_KEYWORD = 2
RC_BUDGET = 3


def _add_graph_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph-nodes", help="node file: <id>\\t<text> per line")
    parser.add_argument("--graph-edges", help="edge file: <src>\\t<dst>[\\t<weight>]")
    parser.add_argument("--ntriples", help="RDF N-Triples file (alternative input)")
    parser.add_argument(
        "--tau",
        type=int,
        default=None,
        help="in-degree cutoff for derived edge weights (default 1001)",
    )


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--max-messages", type=int, default=None)
    parser.add_argument("--max-supersteps", type=int, default=None)


def _load(args: argparse.Namespace):
    return load_graph(
        nodes_path=args.graph_nodes,
        edges_path=args.graph_edges,
        ntriples_path=args.ntriples,
        tau=args.tau,
    )


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dks", description="Top-K keyword search over node-labeled graphs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one query")
    _add_graph_flags(p_run)
    _add_engine_flags(p_run)
    p_run.add_argument("--query", required=True, help="space-separated keywords")
    p_run.add_argument("--k", type=int, default=1, help="answers to return")
    p_run.add_argument("--seed", type=int, default=None, help="message shuffle seed")
    p_run.add_argument("--output", help="answer JSON path (default stdout)")
    p_run.add_argument("--metrics", help="per-superstep metrics JSON-lines path")
    p_run.add_argument(
        "--oracle-check",
        action="store_true",
        help="diff the top-K weights against exhaustive enumeration (small graphs)",
    )

    p_bench = sub.add_parser("bench", help="sweep a workload into a CSV")
    _add_graph_flags(p_bench)
    _add_engine_flags(p_bench)
    p_bench.add_argument("--workload", help="file with one query per line")
    p_bench.add_argument("--query", help="single query instead of a workload file")
    p_bench.add_argument(
        "--k", default="1", help="comma-separated K values, e.g. 1,2,5,10"
    )
    p_bench.add_argument(
        "--baseline",
        action="store_true",
        help="add a full-exploration BFS row per query for comparison",
    )
    p_bench.add_argument("--output", help="CSV path (default stdout)")

    p_oracle = sub.add_parser("oracle", help="exhaustive reference answers")
    _add_graph_flags(p_oracle)
    p_oracle.add_argument(
        "--groups", required=True, help="semicolon-separated keywords, e.g. 'a;b;c'"
    )
    p_oracle.add_argument("--topk", type=int, default=1)
    p_oracle.add_argument("--output", help="answer JSON path (default stdout)")

    p_gen = sub.add_parser("gen-queries", help="generate a seeded query workload")
    _add_graph_flags(p_gen)
    p_gen.add_argument("--count", type=int, default=25)
    p_gen.add_argument("--keywords", type=int, default=2, help="keywords per query")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", help="workload path (default stdout)")

    return parser


def cmd_run(args: argparse.Namespace) -> int:
    graph = _load(args)
    report = run_query(
        graph,
        args.query,
        args.k,
        workers=args.workers,
        max_messages=args.max_messages,
        max_supersteps=args.max_supersteps,
        shuffle_seed=args.seed,
        oracle_check=args.oracle_check,
    )
    _write(canonical_json(answer_document(report, graph)), args.output)
    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            for line in metrics_lines(report):
                fh.write(line + "\n")
    return RC_BUDGET if report.halt_reason == "budget" else RC_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if bool(args.workload) == bool(args.query):
        raise QueryError("give exactly one of --workload or --query")
    if args.workload:
        with open(args.workload, encoding="utf-8") as fh:
            workload = [line.strip() for line in fh if line.strip()]
    else:
        workload = [args.query]
    k_values = [int(part) for part in str(args.k).split(",") if part]
    reports = run_bench(
        graph=_load(args),
        workload=workload,
        k_values=k_values,
        baseline=args.baseline,
        workers=args.workers,
        max_messages=args.max_messages,
        max_supersteps=args.max_supersteps,
    )
    if args.output:
        write_bench_csv(reports, args.output)
    else:
        from .harness import CSV_COLUMNS

        print(",".join(CSV_COLUMNS))
        for report in reports:
            print(",".join(report.csv_row()))
    return RC_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    graph = _load(args)
    keywords = [part.strip().lower() for part in args.groups.split(";") if part.strip()]
    query = Query(tuple(keywords), args.topk)
    groups = resolve_keyword_nodes(query, build_inverted_index(graph))
    _write(
        canonical_json(oracle_document(graph, keywords, groups, args.topk)), args.output
    )
    return RC_OK


def cmd_gen_queries(args: argparse.Namespace) -> int:
    queries = generate_queries(
        _load(args), args.count, keywords_per_query=args.keywords, seed=args.seed
    )
    _write("\n".join(queries), args.output)
    return RC_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "bench": cmd_bench,
        "oracle": cmd_oracle,
        "gen-queries": cmd_gen_queries,
    }
    try:
        return handlers[args.command](args)
    except KeywordNotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RC_NO_KEYWORD
    except (GraphFormatError, QueryError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RC_ERROR


if __name__ == "__main__":
    sys.exit(main())
