"""End-to-end pipeline: load a graph, run queries, report and benchmark.

Everything user-facing funnels through here: ingestion with the right
weighting steps, per-query reports with a frozen CSV column order,
canonical answer JSON (byte-identical regardless of worker count),
superstep metrics as JSON lines, workload generation, and a synthetic
scale-free text graph for trend experiments.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from time import perf_counter
from typing import Iterable, Sequence

from .engine import EngineConfig
from .graph import (
    DEFAULT_DEGREE_CUTOFF,
    Graph,
    GraphFormatError,
    InvertedIndex,
    add_reverse_edges,
    assign_step_weights,
    build_inverted_index,
    ingest_edge_list,
    load_ntriples,
    tokenize,
    undirected_weights,
)
from .oracle import GstInstance, enumerate_answer_trees
from .partials import Query, resolve_keyword_nodes
from .search import SearchOptions, SearchResult, run_search

# Column order is frozen: plotting scripts index into these by position.
CSV_COLUMNS = (
    "query",
    "k",
    "mode",
    "halt_reason",
    "wall_seconds",
    "supersteps",
    "answers_found",
    "best_weight",
    "explored_pct",
    "messages_pct_of_edges",
    "total_messages",
    "bfs_messages",
    "deep_messages",
    "spa_weight",
    "spa_ratio",
    "pct_receive",
    "pct_evaluate",
    "pct_send_agg",
    "pct_send_bfs",
    "pct_send_deep",
    "optimal",
)

BASELINE_OPTIONS = SearchOptions(
    disable_exit=True, disable_deep=True, disable_pruning=True
)


def load_graph(
    nodes_path: str | None = None,
    edges_path: str | None = None,
    ntriples_path: str | None = None,
    tau: int | None = None,
) -> Graph:
    """Ingest, weight and close a graph from either input format.

    Unweighted inputs get degree-step weights (``tau`` is the in-degree
    cutoff); inputs that carry weights must not also ask for one.
    """
    if ntriples_path is not None:
        if nodes_path or edges_path:
            raise GraphFormatError("give either an edge list or an N-Triples file")
        g = load_ntriples(ntriples_path)
    elif nodes_path is not None and edges_path is not None:
        g = ingest_edge_list(nodes_path, edges_path)
    else:
        raise GraphFormatError("a node and edge file, or an N-Triples file, is required")
    if not g.has_weights:
        assign_step_weights(g, tau if tau is not None else DEFAULT_DEGREE_CUTOFF)
    elif tau is not None:
        raise GraphFormatError("tau only applies when weights are derived from degrees")
    return add_reverse_edges(g)


def prepare_query(text: str, k: int) -> Query:
    """Normalize free-form query text into distinct keyword tokens."""
    seen: dict[str, None] = {}
    for token in tokenize(text):
        seen.setdefault(token, None)
    return Query(tuple(seen), k)


@dataclass
class RunReport:
    """One query's outcome, flattened for the benchmark CSV."""

    query: str
    k: int
    mode: str
    halt_reason: str
    wall_seconds: float
    supersteps: int
    answers_found: int
    best_weight: int | None
    explored_pct: float
    messages_pct_of_edges: float
    total_messages: int
    bfs_messages: int
    deep_messages: int
    spa_weight: int | float | None
    spa_ratio: float | None
    pct_receive: float
    pct_evaluate: float
    pct_send_agg: float
    pct_send_bfs: float
    pct_send_deep: float
    keywords: tuple[str, ...] = field(repr=False)
    result: SearchResult = field(repr=False)
    optimal: bool | None = None

    def csv_row(self) -> list[str]:
        row = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if value is None:
                row.append("")
            elif isinstance(value, float):
                row.append(f"{value:.6f}")
            else:
                row.append(str(value))
        return row


def _plain_number(value: int | float | None) -> int | float | None:
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def run_query(
    graph: Graph,
    query_text: str,
    k: int,
    *,
    workers: int = 1,
    max_messages: int | None = None,
    max_supersteps: int | None = None,
    shuffle_seed: int | None = None,
    options: SearchOptions | None = None,
    oracle_check: bool = False,
    index: InvertedIndex | None = None,
    mode: str = "dks",
) -> RunReport:
    """Resolve keywords, run the search and flatten the outcome.

    Raises KeywordNotFound when a keyword matches nothing.  With
    ``oracle_check`` the top-K weights are diffed against the exhaustive
    reference, which only makes sense on small graphs.
    """
    if index is None:
        index = build_inverted_index(graph)
    query = prepare_query(query_text, k)
    groups = resolve_keyword_nodes(query, index)
    config = EngineConfig(
        workers=workers,
        message_budget=max_messages if max_messages is not None else 1_000_000,
        max_supersteps=max_supersteps if max_supersteps is not None else 1000,
        shuffle_seed=shuffle_seed,
    )
    started = perf_counter()
    result = run_search(graph, query, groups, options, config)
    wall = perf_counter() - started

    def share(name: str) -> float:
        if wall <= 0:
            return 0.0
        return min(100.0, 100.0 * result.phase_seconds[name] / wall)

    optimal: bool | None = None
    if oracle_check:
        reference = enumerate_answer_trees(
            GstInstance(graph, tuple(frozenset(g) for g in groups)), k
        )
        optimal = [a.weight for a in result.answers] == [a.weight for a in reference]

    return RunReport(
        query=query_text,
        k=k,
        mode=mode,
        halt_reason=result.halt_label,
        wall_seconds=wall,
        supersteps=result.supersteps,
        answers_found=len(result.answers),
        best_weight=result.answers[0].weight if result.answers else None,
        explored_pct=100.0 * result.explored / result.node_count,
        messages_pct_of_edges=100.0 * result.total_sent / graph.edge_count,
        total_messages=result.total_sent,
        bfs_messages=result.bfs_sent,
        deep_messages=result.deep_sent,
        spa_weight=_plain_number(result.smallest_unexplored),
        spa_ratio=result.progress,
        pct_receive=share("receive"),
        pct_evaluate=share("evaluate"),
        pct_send_agg=share("send_agg"),
        pct_send_bfs=share("send_bfs"),
        pct_send_deep=share("send_deep"),
        keywords=query.keywords,
        result=result,
        optimal=optimal,
    )


def canonical_json(document: dict) -> str:
    """Stable serialization: key-sorted, no whitespace."""
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def answer_document(report: RunReport, graph: Graph) -> dict:
    """The answer JSON payload for one run."""
    answers = []
    for rank, ans in enumerate(report.result.answers, start=1):
        edges = []
        for lo, hi, weight in ans.edges:
            entry = {"src": lo, "dst": hi, "weight": weight}
            label = graph.edge_labels.get((lo, hi)) or graph.edge_labels.get((hi, lo))
            if label is not None:
                entry["label"] = label
            edges.append(entry)
        answers.append(
            {
                "rank": rank,
                "weight": ans.weight,
                "root": ans.root,
                "edges": edges,
                "keyword_nodes": {
                    report.keywords[bit]: node for bit, node in ans.keyword_nodes
                },
            }
        )
    document = {
        "query": report.query,
        "K": report.k,
        "halt_reason": report.halt_reason,
        "supersteps": report.supersteps,
        "answers": answers,
        "spa_weight": _plain_number(report.spa_weight),
        "spa_ratio": report.spa_ratio,
    }
    if report.optimal is not None:
        document["optimal"] = report.optimal
    return document


def mask_keywords(mask: int, keywords: Sequence[str]) -> str:
    parts = [keywords[bit] for bit in range(len(keywords)) if mask >> bit & 1]
    return "+".join(parts)


def metrics_lines(report: RunReport) -> list[str]:
    """Per-superstep metrics, one JSON document per line."""
    lines = []
    for engine_report, trace in zip(report.result.superstep_reports, report.result.trace):
        lines.append(
            canonical_json(
                {
                    "superstep": engine_report.superstep,
                    "active_vertices": engine_report.computed,
                    "messages_sent": engine_report.sent,
                    "messages_delivered": engine_report.delivered,
                    "bfs_messages": trace.bfs_sent,
                    "deep_messages": trace.deep_sent,
                    "aggregator_messages": engine_report.contributions,
                    "frontier_minima": {
                        mask_keywords(mask, report.keywords): value
                        for mask, value in sorted(trace.frontier_minima.items())
                    },
                    "candidates": trace.candidates,
                    "answers_found": trace.answers_found,
                    "exit_fired": trace.exit_fired,
                }
            )
        )
    return lines


def oracle_document(
    graph: Graph, keywords: Sequence[str], groups: Sequence[Iterable[int]], k: int
) -> dict:
    """Exhaustive-reference answers in the same schema as a run."""
    instance = GstInstance(graph, tuple(frozenset(g) for g in groups))
    weights = undirected_weights(graph)
    answers = []
    for rank, ans in enumerate(enumerate_answer_trees(instance, k), start=1):
        edges = []
        for lo, hi in ans.edges:
            entry = {"src": lo, "dst": hi, "weight": weights[(lo, hi)]}
            label = graph.edge_labels.get((lo, hi)) or graph.edge_labels.get((hi, lo))
            if label is not None:
                entry["label"] = label
            edges.append(entry)
        keyword_nodes = {}
        for bit, kw in enumerate(keywords):
            members = set(groups[bit]) & ans.nodes
            keyword_nodes[kw] = min(members)
        answers.append(
            {
                "rank": rank,
                "weight": ans.weight,
                "root": min(ans.nodes),
                "edges": edges,
                "keyword_nodes": keyword_nodes,
            }
        )
    return {
        "query": " ".join(keywords),
        "K": k,
        "halt_reason": "exit",
        "supersteps": 0,
        "answers": answers,
        "spa_weight": 0,
        "spa_ratio": 0.0,
    }


def run_bench(
    graph: Graph,
    workload: Sequence[str],
    k_values: Sequence[int],
    *,
    baseline: bool = False,
    workers: int = 1,
    max_messages: int | None = None,
    max_supersteps: int | None = None,
) -> list[RunReport]:
    """One report per (query, K), optionally shadowed by a plain-BFS row."""
    index = build_inverted_index(graph)
    reports = []
    for query_text in workload:
        for k in k_values:
            reports.append(
                run_query(
                    graph,
                    query_text,
                    k,
                    workers=workers,
                    max_messages=max_messages,
                    max_supersteps=max_supersteps,
                    index=index,
                )
            )
            if baseline:
                reports.append(
                    run_query(
                        graph,
                        query_text,
                        k,
                        workers=workers,
                        max_messages=max_messages,
                        max_supersteps=max_supersteps,
                        index=index,
                        options=BASELINE_OPTIONS,
                        mode="bfs",
                    )
                )
    return reports


def write_bench_csv(reports: Iterable[RunReport], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerow(report.csv_row())


def generate_queries(
    source: Graph | InvertedIndex,
    count: int,
    keywords_per_query: int = 2,
    seed: int = 0,
) -> list[str]:
    """Seeded workload of queries with frequency-stratified keywords.

    The vocabulary is split into equal bands by document frequency and
    each keyword slot draws from a random band, so workloads mix common
    and rare terms instead of clustering at either end.
    """
    index = source if isinstance(source, InvertedIndex) else build_inverted_index(source)
    if count < 1 or keywords_per_query < 1:
        raise ValueError("count and keywords_per_query must be >= 1")
    vocab = sorted(index.postings, key=lambda t: (-len(index.postings[t]), t))
    if len(vocab) < keywords_per_query:
        raise ValueError("vocabulary too small for the requested query size")
    band_count = min(3, len(vocab))
    band_size = -(-len(vocab) // band_count)
    bands = [vocab[i : i + band_size] for i in range(0, len(vocab), band_size)]
    rng = random.Random(seed)
    queries = []
    for _ in range(count):
        chosen: dict[str, None] = {}
        guard = 0
        while len(chosen) < keywords_per_query:
            band = bands[rng.randrange(len(bands))]
            chosen.setdefault(band[rng.randrange(len(band))], None)
            guard += 1
            if guard > 100 * keywords_per_query:
                for term in vocab:  # tiny vocabulary: fill deterministically
                    chosen.setdefault(term, None)
                    if len(chosen) == keywords_per_query:
                        break
        queries.append(" ".join(chosen))
    return queries


def synthetic_text_graph(
    node_count: int,
    *,
    seed: int = 0,
    attach: int = 2,
    vocab_size: int | None = None,
    words_per_node: int = 3,
    tau: int = DEFAULT_DEGREE_CUTOFF,
) -> Graph:
    """Scale-free text graph for trend experiments.

    Preferential attachment gives the degree skew; node texts sample a
    Zipf-ish vocabulary so keyword frequencies are skewed too.  Weights
    follow the in-degree step rule, then the graph is closed.
    """
    if node_count < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    if vocab_size is None:
        vocab_size = max(32, node_count // 64)
    vocab = [f"w{i}" for i in range(vocab_size)]
    cumulative = []
    total = 0.0
    for i in range(vocab_size):
        total += 1.0 / (i + 1)
        cumulative.append(total)
    texts = [
        " ".join(rng.choices(vocab, cum_weights=cumulative, k=words_per_node))
        for _ in range(node_count)
    ]

    edges: list[tuple[int, int]] = []
    endpoint_pool = [0]
    for v in range(1, node_count):
        wanted = min(attach, v)
        targets: set[int] = set()
        while len(targets) < wanted:
            pick = endpoint_pool[rng.randrange(len(endpoint_pool))]
            if pick >= v:
                pick = rng.randrange(v)
            targets.add(pick)
        for t in sorted(targets):
            edges.append((v, t))
            endpoint_pool.append(v)
            endpoint_pool.append(t)

    g = Graph.build(texts, edges)
    assign_step_weights(g, tau)
    return add_reverse_edges(g)
