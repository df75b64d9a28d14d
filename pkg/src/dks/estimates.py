"""Lower-bound estimates for answers still outside the explored region.

The core tool is a set-cover DP over keyword-set masks: given, for each
mask, the cheapest weight any future branch with that mask could have,
the DP yields the cheapest conceivable full answer built from such
branches.  Overlapping masks are allowed (an answer may cover a keyword
twice), so the DP relaxes with ``remaining & ~mask``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_INF = math.inf


def cover_cost_table(branch_costs: dict[int, int | float], m: int) -> list[int | float]:
    """DP table of cheapest cover costs for every keyword subset.

    ``branch_costs`` maps a keyword-set mask to the cheapest weight a
    branch with exactly that mask could contribute.  Entry ``U`` of the
    result is the cheapest total cost of branch masks whose union
    covers ``U``; unreachable subsets hold infinity.
    """
    if m < 1:
        raise ValueError("need at least one keyword")
    full = (1 << m) - 1
    for mask in branch_costs:
        if not 0 < mask <= full:
            raise ValueError(f"mask {mask:#x} out of range for {m} keywords")
    best: list[int | float] = [_INF] * (full + 1)
    best[0] = 0
    for remaining in range(1, full + 1):
        acc = _INF
        for mask, cost in branch_costs.items():
            if mask & remaining:
                prev = best[remaining & ~mask]
                if prev + cost < acc:
                    acc = prev + cost
        best[remaining] = acc
    return best


def smallest_possible_answer(
    branch_costs: dict[int, int | float], m: int, covered_mask: int = 0
) -> int | float | None:
    """Cheapest total cost of branch masks covering all keywords.

    ``covered_mask`` marks keywords already paid for (cost zero).
    Returns None when no combination of the given masks covers the rest.
    """
    full = (1 << m) - 1
    value = cover_cost_table(branch_costs, m)[full & ~covered_mask]
    if value is _INF:
        return None
    return value


def progress_ratio(
    best_found: int | None, smallest_possible: int | float | None, exited: bool
) -> float | None:
    """Ratio of the cheapest unexplored answer bound to the best found.

    Zero if and only if the run ended through the exit criterion (the
    bound proved nothing better remains).  None when the run stopped
    early without enough information for a bound.
    """
    if exited:
        return 0.0
    if best_found is None or smallest_possible is None:
        return None
    if smallest_possible == 0:
        if best_found == 0:
            return 1.0
        raise ValueError("zero bound with a non-zero answer found")
    return smallest_possible / best_found if best_found else None


def combination_count(matches_per_keyword: int, m: int) -> int:
    """Partial answers a single vertex can host, counting every subset
    of the m keywords with ``matches_per_keyword`` choices per keyword.

    The subset sum telescopes to (1 + matches_per_keyword) ** m, which
    doubles as a self-check here.
    """
    if matches_per_keyword < 0 or m < 1:
        raise ValueError("matches_per_keyword must be >= 0 and m >= 1")
    total = sum(
        math.comb(m, r) * matches_per_keyword**r for r in range(m + 1)
    )
    closed = (1 + matches_per_keyword) ** m
    if total != closed:
        raise AssertionError(f"combination count mismatch: {total} != {closed}")
    return total


@dataclass(frozen=True)
class CostModelParams:
    """Instrumentation snapshot of the quantities driving run cost.

    Purely descriptive; nothing in the search consumes these.
    """

    matches_per_keyword: int
    keyword_sets: int
    answers_per_set: int
    hops: int
    avg_degree: float
    messages_per_vertex: float

    def __post_init__(self) -> None:
        for name in (
            "matches_per_keyword",
            "keyword_sets",
            "answers_per_set",
            "hops",
            "avg_degree",
            "messages_per_vertex",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
