"""Embedded vertex-centric BSP engine.

Single-process stand-in for a Pregel-style cluster: vertices are hash
partitioned over logical workers, computation proceeds in supersteps,
and messages sent in superstep s are delivered exactly once in s+1.
Vertices vote to halt and are reawakened by incoming messages; the run
ends on global quiescence, on an explicit stop from the program's
barrier hook, when a superstep's sends blow the message budget, or at
the superstep cap.

Programs must treat each vertex as if it ran concurrently: the only
channels between vertices are messages and aggregators, and message
batches must be handled order-insensitively (a test hook shuffles
them to enforce this).  Aggregator contributions are reduced per
worker in vertex order and then across workers in worker order, so
combine functions must be associative and commutative for results to
be independent of the worker count.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable


class EngineError(ValueError):
    """Raised for invalid engine configuration or protocol misuse."""


class HaltReason(str, Enum):
    GLOBAL_HALT = "global_halt"
    PROGRAM_STOP = "program_stop"
    BUDGET_EXCEEDED = "budget_exceeded"
    SUPERSTEP_CAP = "superstep_cap"


@dataclass(frozen=True)
class EngineConfig:
    workers: int = 1
    message_budget: int = 1_000_000
    max_supersteps: int = 1000
    shuffle_seed: int | None = None

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise EngineError(f"workers must be >= 1, got {self.workers}")
        if self.message_budget < 1:
            raise EngineError("message budget must be >= 1")
        if self.max_supersteps < 1:
            raise EngineError("superstep cap must be >= 1")


@dataclass(frozen=True)
class AggregatorSpec:
    """Named reduction over per-vertex contributions.

    ``combine`` must be pure, associative and commutative; ``identity``
    is the value of an empty reduction.
    """

    name: str
    combine: Callable[[Any, Any], Any]
    identity: Any = None


@dataclass
class SuperstepReport:
    superstep: int
    computed: int
    delivered: int
    sent: int
    aggregates: dict[str, Any]
    wall_seconds: float
    contributions: int = 0


def partition(vertex_count: int, workers: int) -> list[list[int]]:
    """Assign vertex ids to workers by id modulo worker count."""
    if vertex_count < 0:
        raise EngineError("vertex count must be >= 0")
    if workers < 1:
        raise EngineError("workers must be >= 1")
    parts: list[list[int]] = [[] for _ in range(workers)]
    for vid in range(vertex_count):
        parts[vid % workers].append(vid)
    return parts


class VertexContext:
    """Per-vertex view of one superstep, handed to ``compute``."""

    __slots__ = ("vertex_id", "state", "superstep", "messages", "values", "_engine", "_halt")

    def __init__(self, engine: "Engine") -> None:
        self._engine = engine
        self.vertex_id = -1
        self.state: Any = None
        self.superstep = -1
        self.messages: list[Any] = []
        self.values: dict[str, Any] = {}
        self._halt = False

    def send(self, dst: int, payload: Any) -> None:
        self._engine._send(dst, payload)

    def contribute(self, name: str, value: Any) -> None:
        self._engine._contribute(name, value)

    def vote_to_halt(self) -> None:
        self._halt = True


class MasterContext:
    """Barrier-side hook: publish values for the next superstep or stop."""

    __slots__ = ("next_values", "stop_requested")

    def __init__(self) -> None:
        self.next_values: dict[str, Any] = {}
        self.stop_requested = False

    def set_value(self, name: str, value: Any) -> None:
        self.next_values[name] = value

    def request_stop(self) -> None:
        self.stop_requested = True


class VertexProgram:
    """Base class for programs run by the engine."""

    aggregators: list[AggregatorSpec] = []

    def init_state(self, vertex_id: int) -> Any:
        return None

    def compute(self, ctx: VertexContext) -> None:
        raise NotImplementedError

    def after_superstep(self, master: MasterContext, report: SuperstepReport) -> None:
        """Runs once per barrier with the reduced aggregator values."""


@dataclass
class RunResult:
    halt_reason: HaltReason
    states: list[Any]
    reports: list[SuperstepReport]
    total_sent: int = 0
    total_delivered: int = 0
    undelivered: int = 0
    computed_ever: int = 0
    received_ever: int = 0


class Engine:
    def __init__(self, vertex_count: int, program: VertexProgram, config: EngineConfig | None = None) -> None:
        self.config = config or EngineConfig()
        self.program = program
        self.vertex_count = vertex_count
        self.partitions = partition(vertex_count, self.config.workers)
        self._outbox: dict[int, list[Any]] = {}
        self._sent_this_step = 0
        self._contributed_this_step = 0
        self._partials: dict[str, Any] = {}
        self._agg_specs = {spec.name: spec for spec in program.aggregators}

    # -- callbacks used by VertexContext -------------------------------

    def _send(self, dst: int, payload: Any) -> None:
        if not (0 <= dst < self.vertex_count):
            raise EngineError(f"message to unknown vertex {dst}")
        self._outbox.setdefault(dst, []).append(payload)
        self._sent_this_step += 1

    def _contribute(self, name: str, value: Any) -> None:
        spec = self._agg_specs.get(name)
        if spec is None:
            raise EngineError(f"unknown aggregator {name!r}")
        self._contributed_this_step += 1
        if name in self._partials:
            self._partials[name] = spec.combine(self._partials[name], value)
        else:
            self._partials[name] = value

    # -- main loop ------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.config
        program = self.program
        states = [program.init_state(v) for v in range(self.vertex_count)]
        active = [True] * self.vertex_count
        computed_ever = [False] * self.vertex_count
        received_ever = [False] * self.vertex_count
        inbox: dict[int, list[Any]] = {}
        values: dict[str, Any] = {}
        rng = random.Random(cfg.shuffle_seed) if cfg.shuffle_seed is not None else None
        ctx = VertexContext(self)
        result = RunResult(HaltReason.SUPERSTEP_CAP, states, [])

        for superstep in range(cfg.max_supersteps):
            started = time.perf_counter()
            self._outbox = {}
            self._sent_this_step = 0
            self._contributed_this_step = 0
            delivered = 0
            computed = 0
            worker_partials: list[dict[str, Any]] = []

            for part in self.partitions:
                self._partials = {}
                for vid in part:
                    batch = inbox.pop(vid, None)
                    if batch is None and not active[vid]:
                        continue
                    if batch:
                        received_ever[vid] = True
                        delivered += len(batch)
                        if rng is not None:
                            rng.shuffle(batch)
                    ctx.vertex_id = vid
                    ctx.state = states[vid]
                    ctx.superstep = superstep
                    ctx.messages = batch or []
                    ctx.values = values
                    ctx._halt = False
                    program.compute(ctx)
                    states[vid] = ctx.state
                    active[vid] = not ctx._halt
                    computed += 1
                    computed_ever[vid] = True
                worker_partials.append(self._partials)

            aggregates: dict[str, Any] = {}
            for name, spec in self._agg_specs.items():
                acc = spec.identity
                seen = False
                for partial in worker_partials:
                    if name in partial:
                        acc = partial[name] if not seen else spec.combine(acc, partial[name])
                        seen = True
                aggregates[name] = acc

            report = SuperstepReport(
                superstep=superstep,
                computed=computed,
                delivered=delivered,
                sent=self._sent_this_step,
                aggregates=aggregates,
                wall_seconds=time.perf_counter() - started,
                contributions=self._contributed_this_step,
            )
            result.reports.append(report)
            result.total_sent += self._sent_this_step
            result.total_delivered += delivered

            master = MasterContext()
            program.after_superstep(master, report)
            values = dict(aggregates)
            values.update(master.next_values)

            inbox = self._outbox
            if master.stop_requested:
                result.halt_reason = HaltReason.PROGRAM_STOP
                break
            if result.total_sent > cfg.message_budget:
                # sends are counted as they happen; the overflow stops the
                # run before the next superstep delivers anything
                result.halt_reason = HaltReason.BUDGET_EXCEEDED
                break
            if not inbox and not any(active):
                result.halt_reason = HaltReason.GLOBAL_HALT
                break

        result.undelivered = sum(len(v) for v in inbox.values())
        result.computed_ever = sum(computed_ever)
        result.received_ever = sum(received_ever)
        return result
