"""BSP engine behaviour, exercised with tiny throwaway programs."""
from __future__ import annotations

import operator

import pytest

from dks.engine import (
    AggregatorSpec,
    Engine,
    EngineConfig,
    EngineError,
    HaltReason,
    MasterContext,
    SuperstepReport,
    VertexContext,
    VertexProgram,
    partition,
)


class RelayToken(VertexProgram):
    """Vertex 0 emits a token that walks the ring once, then all halt."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.visits: list[int] = []

    def compute(self, ctx: VertexContext) -> None:
        if ctx.superstep == 0 and ctx.vertex_id == 0:
            ctx.send((ctx.vertex_id + 1) % self.n, "token")
        for _ in ctx.messages:
            self.visits.append(ctx.vertex_id)
            if ctx.vertex_id != 0:
                ctx.send((ctx.vertex_id + 1) % self.n, "token")
        ctx.vote_to_halt()


def test_messages_arrive_next_superstep_and_halt_on_quiescence():
    program = RelayToken(4)
    result = Engine(4, program).run()
    assert result.halt_reason == HaltReason.GLOBAL_HALT
    assert program.visits == [1, 2, 3, 0]
    assert result.total_sent == result.total_delivered == 4
    assert result.undelivered == 0
    # ring walk of n hops needs n+1 supersteps: the last delivery plus quiescence
    assert len(result.reports) == 5


def test_dormant_vertices_skip_compute_until_reawakened():
    computes: dict[int, list[int]] = {0: [], 1: []}

    class Sleeper(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            computes[ctx.vertex_id].append(ctx.superstep)
            if ctx.vertex_id == 0 and ctx.superstep == 2 and not ctx.messages:
                ctx.send(1, "wake")
            if ctx.vertex_id == 0 and ctx.superstep < 3:
                return  # stays active without sending
            ctx.vote_to_halt()

    result = Engine(2, Sleeper()).run()
    assert result.halt_reason == HaltReason.GLOBAL_HALT
    assert computes[0] == [0, 1, 2, 3]
    assert computes[1] == [0, 3]  # halted at 0, reawakened by the wake message


def test_aggregators_reduce_across_workers():
    class Counter(VertexProgram):
        aggregators = [
            AggregatorSpec("total", operator.add, 0),
            AggregatorSpec("merged", lambda a, b: {**a, **b}, {}),
        ]
        last: dict = {}

        def compute(self, ctx: VertexContext) -> None:
            ctx.contribute("total", ctx.vertex_id)
            ctx.contribute("merged", {ctx.vertex_id: True})
            Counter.last = dict(ctx.values)
            ctx.vote_to_halt()

        def after_superstep(self, master: MasterContext, report: SuperstepReport) -> None:
            master.set_value("extra", report.aggregates["total"] * 10)

    for workers in (1, 2, 3, 7):
        program = Counter()
        result = Engine(5, program, EngineConfig(workers=workers)).run()
        report = result.reports[0]
        assert report.aggregates["total"] == 0 + 1 + 2 + 3 + 4
        assert sorted(report.aggregates["merged"]) == [0, 1, 2, 3, 4]
        assert report.contributions == 10


def test_master_values_visible_next_superstep():
    seen: list = []

    class Publisher(VertexProgram):
        aggregators = [AggregatorSpec("n", operator.add, 0)]

        def compute(self, ctx: VertexContext) -> None:
            seen.append((ctx.superstep, ctx.values.get("flag"), ctx.values.get("n")))
            ctx.contribute("n", 1)
            if ctx.superstep == 0:
                ctx.send(0, "again")
            ctx.vote_to_halt()

        def after_superstep(self, master: MasterContext, report: SuperstepReport) -> None:
            master.set_value("flag", f"ss{report.superstep}")

    Engine(1, Publisher()).run()
    # superstep 1 sees the master value and the aggregate from superstep 0
    assert seen == [(0, None, None), (1, "ss0", 1)]


def test_program_stop_wins_over_pending_messages():
    class Stopper(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            ctx.send(ctx.vertex_id, "loop")

        def after_superstep(self, master: MasterContext, report: SuperstepReport) -> None:
            if report.superstep == 2:
                master.request_stop()

    result = Engine(2, Stopper()).run()
    assert result.halt_reason == HaltReason.PROGRAM_STOP
    assert len(result.reports) == 3
    assert result.undelivered == 2  # the in-flight loop messages are dropped


def test_budget_is_cumulative_across_supersteps():
    class Chatty(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            ctx.send(ctx.vertex_id, "m")  # one message per vertex per superstep

    result = Engine(3, Chatty(), EngineConfig(message_budget=7)).run()
    assert result.halt_reason == HaltReason.BUDGET_EXCEEDED
    assert result.total_sent == 9  # 3 per superstep; crosses 7 during the third


def test_superstep_cap():
    class Forever(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            ctx.send(ctx.vertex_id, "m")

    result = Engine(1, Forever(), EngineConfig(max_supersteps=4)).run()
    assert result.halt_reason == HaltReason.SUPERSTEP_CAP
    assert len(result.reports) == 4


def test_send_to_unknown_vertex_rejected():
    class Bad(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            ctx.send(99, "m")

    with pytest.raises(EngineError, match="unknown vertex"):
        Engine(2, Bad()).run()


def test_unknown_aggregator_rejected():
    class Bad(VertexProgram):
        def compute(self, ctx: VertexContext) -> None:
            ctx.contribute("nope", 1)

    with pytest.raises(EngineError, match="unknown aggregator"):
        Engine(1, Bad()).run()


def test_partition_is_modulo():
    assert partition(5, 2) == [[0, 2, 4], [1, 3]]
    assert partition(0, 3) == [[], [], []]
    with pytest.raises(EngineError):
        partition(3, 0)


def test_config_validation():
    with pytest.raises(EngineError):
        EngineConfig(workers=0)
    with pytest.raises(EngineError):
        EngineConfig(message_budget=0)
    with pytest.raises(EngineError):
        EngineConfig(max_supersteps=0)


def test_shuffle_changes_batch_order_not_results():
    class Collector(VertexProgram):
        def __init__(self) -> None:
            self.orders: list[tuple] = []

        def compute(self, ctx: VertexContext) -> None:
            if ctx.superstep == 0:
                for i in range(6):
                    ctx.send(0, (ctx.vertex_id, i))
            elif ctx.messages:
                self.orders.append(tuple(ctx.messages))
            ctx.vote_to_halt()

    plain = Collector()
    Engine(3, plain).run()
    orders = set()
    for seed in (1, 2, 3, 4):
        shuffled = Collector()
        Engine(3, shuffled, EngineConfig(shuffle_seed=seed)).run()
        assert sorted(shuffled.orders[0]) == sorted(plain.orders[0])
        orders.add(shuffled.orders[0])
    assert len(orders) > 1  # at least one seed permuted the batch


def test_received_and_computed_tallies():
    program = RelayToken(3)
    result = Engine(3, program).run()
    assert result.computed_ever == 3
    assert result.received_ever == 3
