"""Top-K keyword search over node-labeled, edge-weighted graphs.

The package splits into ingestion (:mod:`dks.graph`), an embedded
vertex-centric BSP engine (:mod:`dks.engine`), the search itself
(:mod:`dks.partials`, :mod:`dks.search`, :mod:`dks.estimates`), an
exhaustive reference (:mod:`dks.oracle`) and the user-facing pipeline
(:mod:`dks.harness`, :mod:`dks.cli`).
"""

from .engine import AggregatorSpec, Engine, EngineConfig, HaltReason, VertexProgram
from .estimates import (
    CostModelParams,
    combination_count,
    cover_cost_table,
    progress_ratio,
    smallest_possible_answer,
)
from .graph import (
    Graph,
    GraphFormatError,
    InvertedIndex,
    add_reverse_edges,
    assign_step_weights,
    build_inverted_index,
    ingest_edge_list,
    load_ntriples,
    min_edge_weight,
    tokenize,
)
from .harness import (
    RunReport,
    answer_document,
    canonical_json,
    generate_queries,
    load_graph,
    metrics_lines,
    run_bench,
    run_query,
    synthetic_text_graph,
    write_bench_csv,
)
from .oracle import (
    GstInstance,
    OracleAnswer,
    enumerate_answer_trees,
    exact_answer_weight,
    min_cover_weight_exhaustive,
)
from .partials import (
    AnswerTree,
    KeywordNotFound,
    PartialAnswer,
    PartialTable,
    Query,
    QueryError,
    resolve_keyword_nodes,
)
from .search import (
    KeywordSearchProgram,
    SearchOptions,
    SearchResult,
    check_exit,
    is_candidate,
    run_search,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatorSpec",
    "AnswerTree",
    "CostModelParams",
    "Engine",
    "EngineConfig",
    "Graph",
    "GraphFormatError",
    "GstInstance",
    "HaltReason",
    "InvertedIndex",
    "KeywordNotFound",
    "KeywordSearchProgram",
    "OracleAnswer",
    "PartialAnswer",
    "PartialTable",
    "Query",
    "QueryError",
    "RunReport",
    "SearchOptions",
    "SearchResult",
    "VertexProgram",
    "add_reverse_edges",
    "answer_document",
    "assign_step_weights",
    "build_inverted_index",
    "canonical_json",
    "check_exit",
    "combination_count",
    "cover_cost_table",
    "enumerate_answer_trees",
    "exact_answer_weight",
    "generate_queries",
    "ingest_edge_list",
    "is_candidate",
    "load_graph",
    "load_ntriples",
    "metrics_lines",
    "min_cover_weight_exhaustive",
    "min_edge_weight",
    "progress_ratio",
    "resolve_keyword_nodes",
    "run_bench",
    "run_query",
    "run_search",
    "smallest_possible_answer",
    "synthetic_text_graph",
    "tokenize",
    "write_bench_csv",
]
