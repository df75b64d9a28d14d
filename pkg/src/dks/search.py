"""Top-K keyword search as a vertex program.

Keyword nodes seed zero-length partial answers, every superstep extends
the per-vertex tables one hop outward, and disjoint keyword-sets meeting
at a shared root combine into bigger partials.  A master-side criterion
compares the newest path lengths per keyword-set against the branches of
the answers found so far; once nothing cheaper can still be assembled,
frontier expansion stops.  Partials already in flight keep moving, but
only between vertices that have exchanged messages before ("deep"
messages): unbalanced answers whose pieces sit on already-explored
ground still meet, while no new territory is touched.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from functools import partial
from time import perf_counter
from typing import Any, NamedTuple

from .engine import (
    AggregatorSpec,
    Engine,
    EngineConfig,
    HaltReason,
    MasterContext,
    SuperstepReport,
    VertexContext,
    VertexProgram,
)
from .estimates import cover_cost_table, progress_ratio
from .graph import Graph, min_edge_weight
from .partials import (
    AnswerTree,
    PartialAnswer,
    PartialTable,
    Query,
    branch_decomposition,
    extend_entry,
    extract_answer,
    node_cover_masks,
    seed_entries,
)

HALT_LABELS = {
    HaltReason.GLOBAL_HALT: "exit",
    HaltReason.PROGRAM_STOP: "exit",
    HaltReason.BUDGET_EXCEEDED: "budget",
    HaltReason.SUPERSTEP_CAP: "cap",
}


class BfsMessage(NamedTuple):
    """A table delta broadcast to a neighbour."""

    sender: int
    entries: tuple[PartialAnswer, ...]


class DeepMessage(NamedTuple):
    """A table delta sent into already-explored territory after the stop.

    Handled exactly like a BFS delta on arrival; the restriction to
    previously heard-from neighbours is what keeps the drain finite.
    """

    sender: int
    entries: tuple[PartialAnswer, ...]


def _message_key(msg: Any) -> tuple:
    return (isinstance(msg, DeepMessage), msg.sender)


def check_exit(
    frontier_minima: dict[int, int],
    branch_bounds: dict[int, int],
    min_weight: int,
    have_k: bool,
) -> bool:
    """Decide whether frontier expansion can stop.

    Fires when K answers exist and every keyword-set that reached new
    territory this superstep is already more expensive, plus one more
    edge, than the longest branch with that keyword-set inside any
    current answer.  Keyword-sets with no such branch keep the search
    alive, and a silent superstep proves nothing, so neither fires.
    """
    if not have_k or not frontier_minima:
        return False
    for mask, smallest in frontier_minima.items():
        bound = branch_bounds.get(mask)
        if bound is None or smallest + min_weight <= bound:
            return False
    return True


def is_candidate(
    arrival_minima: dict[int, int], branch_bounds: dict[int, int], min_weight: int
) -> bool:
    """Could this newly reached vertex still root a better answer?"""
    for mask, smallest in arrival_minima.items():
        bound = branch_bounds.get(mask)
        if bound is None or smallest + min_weight < bound:
            return True
    return False


@dataclass(frozen=True)
class SearchOptions:
    """Feature switches, mostly for experiments and tests."""

    disable_exit: bool = False
    disable_deep: bool = False
    disable_filtering: bool = False
    disable_pruning: bool = False


@dataclass
class VertexState:
    table: PartialTable = field(default_factory=PartialTable)
    seen: bool = False  # seeded or ever received a message
    heard_from: set[int] = field(default_factory=set)


class TraceRecord(NamedTuple):
    superstep: int
    frontier_minima: dict[int, int]
    frontier_count: int
    candidates: int
    answers_found: int
    best_weights: tuple[int, ...]
    branch_bounds: dict[int, int]
    bfs_sent: int
    deep_sent: int
    exit_fired: bool


def merge_answer_lists(
    a: tuple[AnswerTree, ...], b: tuple[AnswerTree, ...], k: int
) -> tuple[AnswerTree, ...]:
    """Top-K of two answer lists, deduplicated by tree identity.

    The same tree reported from two roots keeps the smallest root, so
    the result does not depend on how partial lists were grouped.
    """
    merged: dict[tuple, AnswerTree] = {}
    for ans in sorted(a + b, key=lambda t: (t.weight, t.key, t.root, t.keyword_nodes)):
        merged.setdefault(ans.key, ans)
    out = []
    for ans in merged.values():
        out.append(ans)
        if len(out) == k:
            break
    return tuple(out)


def _merge_minima(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out = dict(a)
    for mask, val in b.items():
        if mask not in out or val < out[mask]:
            out[mask] = val
    return out


class KeywordSearchProgram(VertexProgram):
    """The vertex program plus its master-side bookkeeping."""

    def __init__(
        self,
        graph: Graph,
        query: Query,
        groups: tuple[tuple[int, ...], ...],
        options: SearchOptions | None = None,
    ) -> None:
        if len(groups) != query.m:
            raise ValueError("one node group per query keyword expected")
        self.graph = graph
        self.query = query
        self.options = options or SearchOptions()
        self.k = query.k
        self.full_mask = query.full_mask
        self.covers = node_cover_masks(groups, graph.node_count)
        self.min_weight = min_edge_weight(graph)
        self._weight_maps: dict[int, dict[int, int]] = {}
        self._merge = partial(merge_answer_lists, k=self.k)

        # master-side accumulation across supersteps
        self.answers: tuple[AnswerTree, ...] = ()
        self.branch_bounds: dict[int, int] = {}
        self.positive_minima: dict[int, int] = {}
        self.exit_fired = False
        self.exit_superstep: int | None = None
        self.trace: list[TraceRecord] = []
        self.phase_seconds = {
            "receive": 0.0,
            "evaluate": 0.0,
            "send_agg": 0.0,
            "send_bfs": 0.0,
            "send_deep": 0.0,
        }

        self.aggregators = [
            AggregatorSpec("answers", self._merge, ()),
            AggregatorSpec("frontier_minima", _merge_minima, {}),
            AggregatorSpec("frontier_count", operator.add, 0),
            AggregatorSpec("candidates", operator.add, 0),
            AggregatorSpec("bfs_sent", operator.add, 0),
            AggregatorSpec("deep_sent", operator.add, 0),
        ]

    # -- vertex side ----------------------------------------------------

    def init_state(self, vertex_id: int) -> VertexState:
        return VertexState()

    def _weights_at(self, v: int) -> dict[int, int]:
        cached = self._weight_maps.get(v)
        if cached is None:
            cached = {e.dst: e.weight for e in self.graph.adj[v]}
            self._weight_maps[v] = cached
        return cached

    def compute(self, ctx: VertexContext) -> None:
        state: VertexState = ctx.state
        opts = self.options
        v = ctx.vertex_id
        stopped = bool(ctx.values.get("stop"))
        bound = None if opts.disable_pruning else ctx.values.get("best_bound")
        bounds = ctx.values.get("branch_bounds") or {}
        phases = self.phase_seconds

        fresh: list[tuple[PartialAnswer, Any]] = []  # (entry, source tag)
        arrival_minima: dict[int, int] = {}
        first_receipt = bool(ctx.messages) and not state.seen

        t0 = perf_counter()
        if ctx.messages:
            state.seen = True
            for msg in sorted(ctx.messages, key=_message_key):
                state.heard_from.add(msg.sender)
                weight = self._weights_at(v)[msg.sender]
                shifted = []
                for entry in msg.entries:
                    moved = extend_entry(entry, msg.sender, v, weight)
                    if moved is None:
                        continue
                    shifted.append(moved)
                    if first_receipt:
                        prev = arrival_minima.get(moved.mask)
                        if prev is None or moved.length < prev:
                            arrival_minima[moved.mask] = moved.length
                for item in state.table.absorb(shifted, bound):
                    fresh.append((item.entry, "combo" if item.joined else msg.sender))
                if not opts.disable_filtering:
                    state.table.truncate(self.k)

        if ctx.superstep == 0 and self.covers[v]:
            state.seen = True
            first_receipt = True
            for item in state.table.absorb(seed_entries(v, self.covers[v])):
                fresh.append((item.entry, "seed"))
            if not opts.disable_filtering:
                state.table.truncate(self.k)
            for mask, entries in state.table.lists.items():
                arrival_minima[mask] = entries[0].length

        t1 = perf_counter()
        surviving = [
            (entry, source) for entry, source in fresh if state.table.contains(entry)
        ]
        # complete trees are results the moment they are assembled, even when
        # the table immediately drops them in favour of lighter entries
        found = [
            extract_answer(entry, self.covers, self.full_mask)
            for entry, _ in fresh
            if entry.mask == self.full_mask
        ]
        fresh_candidate = (
            first_receipt
            and bool(arrival_minima)
            and is_candidate(arrival_minima, bounds, self.min_weight)
        )

        t2 = perf_counter()
        if first_receipt:
            ctx.contribute("frontier_count", 1)
            if arrival_minima:
                ctx.contribute("frontier_minima", dict(arrival_minima))
            if fresh_candidate:
                ctx.contribute("candidates", 1)
        if found:
            ctx.contribute("answers", self._merge((), tuple(found)))

        t3 = perf_counter()
        if surviving and not stopped:
            sent = 0
            for edge in self.graph.adj[v]:
                payload = tuple(
                    entry for entry, source in surviving if source != edge.dst
                )
                if payload:
                    ctx.send(edge.dst, BfsMessage(v, payload))
                    sent += 1
            if sent:
                ctx.contribute("bfs_sent", sent)

        t4 = perf_counter()
        if stopped and surviving and not opts.disable_deep:
            # drain phase: new partials no longer expand the frontier but
            # keep moving between vertices that have already talked, so
            # assemblies pending on explored ground still complete
            deep = 0
            for edge in self.graph.adj[v]:
                if edge.dst not in state.heard_from:
                    continue
                payload = tuple(
                    entry for entry, source in surviving if source != edge.dst
                )
                if payload:
                    ctx.send(edge.dst, DeepMessage(v, payload))
                    deep += 1
            if deep:
                ctx.contribute("deep_sent", deep)

        t5 = perf_counter()
        phases["receive"] += t1 - t0
        phases["evaluate"] += t2 - t1
        phases["send_agg"] += t3 - t2
        phases["send_bfs"] += t4 - t3
        phases["send_deep"] += t5 - t4

        ctx.vote_to_halt()

    # -- master side ------------------------------------------------------

    def after_superstep(self, master: MasterContext, report: SuperstepReport) -> None:
        agg = report.aggregates
        minima: dict[int, int] = agg.get("frontier_minima") or {}
        for mask, val in minima.items():
            if val > 0 and (
                mask not in self.positive_minima or val < self.positive_minima[mask]
            ):
                self.positive_minima[mask] = val

        new_answers: tuple[AnswerTree, ...] = agg.get("answers") or ()
        if new_answers:
            self.answers = self._merge(self.answers, new_answers)

        have_k = len(self.answers) >= self.k
        bounds: dict[int, int] = {}
        for ans in self.answers:
            for mask, length in branch_decomposition(
                ans, self.covers, self.full_mask
            ).items():
                if length > bounds.get(mask, -1):
                    bounds[mask] = length
        self.branch_bounds = bounds
        master.set_value("branch_bounds", bounds)
        master.set_value(
            "best_bound", self.answers[self.k - 1].weight if have_k else None
        )

        if not self.options.disable_exit and not self.exit_fired:
            if check_exit(minima, bounds, self.min_weight, have_k):
                self.exit_fired = True
                self.exit_superstep = report.superstep
        if self.exit_fired:
            master.set_value("stop", True)
            drained = (
                report.superstep > (self.exit_superstep or 0)
                and agg.get("deep_sent", 0) == 0
            )
            if drained:
                master.request_stop()

        self.trace.append(
            TraceRecord(
                superstep=report.superstep,
                frontier_minima=dict(minima),
                frontier_count=agg.get("frontier_count", 0),
                candidates=agg.get("candidates", 0),
                answers_found=len(self.answers),
                best_weights=tuple(a.weight for a in self.answers),
                branch_bounds=dict(bounds),
                bfs_sent=agg.get("bfs_sent", 0),
                deep_sent=agg.get("deep_sent", 0),
                exit_fired=self.exit_fired,
            )
        )


@dataclass(frozen=True)
class SearchResult:
    answers: tuple[AnswerTree, ...]
    halt_reason: HaltReason
    halt_label: str
    exited: bool
    exit_superstep: int | None
    supersteps: int
    total_sent: int
    total_delivered: int
    undelivered: int
    bfs_sent: int
    deep_sent: int
    explored: int
    node_count: int
    smallest_unexplored: int | float | None
    progress: float | None
    min_weight: int
    positive_minima: dict[int, int]
    branch_bounds: dict[int, int]
    trace: tuple[TraceRecord, ...]
    phase_seconds: dict[str, float]
    superstep_reports: tuple


def run_search(
    graph: Graph,
    query: Query,
    groups: tuple[tuple[int, ...], ...],
    options: SearchOptions | None = None,
    engine_config: EngineConfig | None = None,
) -> SearchResult:
    """Run one query to completion and assemble the outcome."""
    program = KeywordSearchProgram(graph, query, groups, options)
    engine = Engine(graph.node_count, program, engine_config)
    outcome = engine.run()

    exited = outcome.halt_reason in (HaltReason.GLOBAL_HALT, HaltReason.PROGRAM_STOP)
    best = program.answers[0].weight if program.answers else None
    if exited:
        smallest: int | float | None = 0
    else:
        costs: dict[int, int | float] = {
            mask: program.positive_minima.get(mask, program.min_weight)
            for mask in range(1, query.full_mask + 1)
        }
        table = cover_cost_table(costs, query.m)
        zeros = {0} | {
            cover & query.full_mask for cover in program.covers if cover
        }
        smallest = min(table[query.full_mask & ~z] for z in zeros)

    bfs_total = sum(rec.bfs_sent for rec in program.trace)
    deep_total = sum(rec.deep_sent for rec in program.trace)
    return SearchResult(
        answers=program.answers,
        halt_reason=outcome.halt_reason,
        halt_label=HALT_LABELS[outcome.halt_reason],
        exited=exited,
        exit_superstep=program.exit_superstep,
        supersteps=len(outcome.reports),
        total_sent=outcome.total_sent,
        total_delivered=outcome.total_delivered,
        undelivered=outcome.undelivered,
        bfs_sent=bfs_total,
        deep_sent=deep_total,
        explored=sum(1 for st in outcome.states if st.seen),
        node_count=graph.node_count,
        smallest_unexplored=smallest,
        progress=progress_ratio(best, smallest, exited),
        min_weight=program.min_weight,
        positive_minima=dict(program.positive_minima),
        branch_bounds=dict(program.branch_bounds),
        trace=tuple(program.trace),
        phase_seconds=dict(program.phase_seconds),
        superstep_reports=tuple(outcome.reports),
    )
