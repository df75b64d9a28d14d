"""Unit tests for partial-answer trees and the per-vertex tables."""

from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dks.graph import Graph, add_reverse_edges, build_inverted_index
from dks.partials import (
    AnswerTree,
    KeywordNotFound,
    PartialAnswer,
    PartialTable,
    Query,
    QueryError,
    TreeAccountingError,
    answer_weight_from_branches,
    branch_decomposition,
    combine_entries,
    extend_entry,
    extract_answer,
    node_cover_masks,
    resolve_keyword_nodes,
    seed_entries,
)


def entry_for(edges, root, mask=1, keyword_nodes=None) -> PartialAnswer:
    """Build a PartialAnswer from explicit (lo, hi, weight) edges."""
    nodes = frozenset({root} | {v for lo, hi, _ in edges for v in (lo, hi)})
    length = sum(w for _, _, w in edges)
    kws = keyword_nodes if keyword_nodes is not None else ((0, root),)
    return PartialAnswer(mask, length, root, tuple(sorted(edges)), nodes, kws)


# ---------------------------------------------------------------- queries


@pytest.mark.parametrize(
    "keywords, k",
    [
        ((), 1),
        (("alpha", "alpha"), 1),
        (tuple(f"w{i}" for i in range(13)), 1),
        (("alpha",), 0),
    ],
)
def test_query_validation(keywords, k):
    with pytest.raises(QueryError):
        Query(keywords, k)


def test_query_properties():
    q = Query(("alpha", "beta", "gamma"), 2)
    assert q.m == 3
    assert q.full_mask == 0b111


def test_resolve_keyword_nodes():
    g = Graph.build(["alpha", "beta alpha", "beta"], [(0, 1, 1), (1, 2, 1)])
    index = build_inverted_index(g)
    groups = resolve_keyword_nodes(Query(("beta", "alpha"), 1), index)
    assert groups == ((1, 2), (0, 1))


def test_resolve_missing_keywords_lists_them():
    g = Graph.build(["alpha"], [])
    index = build_inverted_index(g)
    with pytest.raises(KeywordNotFound) as exc:
        resolve_keyword_nodes(Query(("alpha", "nope", "zilch"), 1), index)
    assert exc.value.keywords == ["nope", "zilch"]


def test_node_cover_masks():
    assert node_cover_masks([(0, 2), (1, 2)], 4) == [0b01, 0b10, 0b11, 0]


def test_seed_entries():
    seeds = seed_entries(5, 0b101)
    assert seeds == [
        PartialAnswer(0b001, 0, 5, (), frozenset({5}), ((0, 5),)),
        PartialAnswer(0b100, 0, 5, (), frozenset({5}), ((2, 5),)),
    ]


# ------------------------------------------------------- extend / combine


def test_extend_appends_new_node():
    seed = seed_entries(0, 0b1)[0]
    out = extend_entry(seed, 0, 1, 3)
    assert out == PartialAnswer(1, 3, 1, ((0, 1, 3),), frozenset({0, 1}), ((0, 0),))


def test_extend_rejects_cycle_closure():
    path = entry_for([(0, 1, 1), (1, 2, 1)], root=2)
    assert extend_entry(path, 2, 0, 5) is None


def test_extend_reroots_along_tree_edge():
    path = entry_for([(0, 1, 1), (1, 2, 1)], root=2)
    back = extend_entry(path, 2, 1, 1)
    assert back == path._replace(root=1)
    # a parallel edge with a different weight is not the tree edge
    assert extend_entry(path, 2, 1, 7) is None


def test_combine_requires_disjoint_masks_and_shared_root():
    a = entry_for([(0, 1, 2)], root=0, mask=0b01, keyword_nodes=((0, 1),))
    b = entry_for([(0, 2, 3)], root=0, mask=0b10, keyword_nodes=((1, 2),))
    joined = combine_entries(a, b)
    assert joined == PartialAnswer(
        0b11, 5, 0, ((0, 1, 2), (0, 2, 3)), frozenset({0, 1, 2}), ((0, 1), (1, 2))
    )
    assert combine_entries(a, b._replace(mask=0b01)) is None
    assert combine_entries(a, b._replace(root=2)) is None


def test_combine_counts_shared_edges_once():
    a = entry_for([(0, 1, 2)], root=0, mask=0b01, keyword_nodes=((0, 1),))
    b = entry_for([(0, 1, 2), (1, 2, 3)], root=0, mask=0b10, keyword_nodes=((1, 2),))
    joined = combine_entries(a, b)
    assert joined is not None
    assert joined.length == 5
    assert joined.edges == ((0, 1, 2), (1, 2, 3))


def test_combine_rejects_cycles():
    a = entry_for([(0, 1, 1)], root=0, mask=0b01, keyword_nodes=((0, 1),))
    b = entry_for([(0, 2, 1), (1, 2, 1)], root=0, mask=0b10, keyword_nodes=((1, 2),))
    assert combine_entries(a, b) is None


# ------------------------------------------------------------ the table


def test_absorb_reports_new_entries_and_joins():
    table = PartialTable()
    new = table.absorb(seed_entries(0, 0b11))
    assert sorted(item.entry.mask for item in new) == [1, 2, 3]
    by_mask = {item.entry.mask: item for item in new}
    assert by_mask[1].joined is None
    assert by_mask[2].joined is None
    assert by_mask[3].joined == (by_mask[2].entry, by_mask[1].entry)
    assert by_mask[3].entry.length == 0


def test_absorb_deduplicates():
    table = PartialTable()
    seed = seed_entries(0, 0b1)
    assert len(table.absorb(seed)) == 1
    assert table.absorb(seed) == []
    assert len(list(table.entries())) == 1


def test_absorb_keeps_canonical_keyword_assignment():
    # the same tree reported with two different keyword placements stays
    # one entry, carrying the smaller assignment
    late = entry_for([(0, 1, 2)], root=1, keyword_nodes=((0, 1),))
    early = entry_for([(0, 1, 2)], root=1, keyword_nodes=((0, 0),))
    table = PartialTable()
    table.absorb([late])
    assert table.absorb([early]) == []
    (kept,) = table.entries()
    assert kept.keyword_nodes == ((0, 0),)


def test_absorb_chains_combinations_to_fixpoint():
    table = PartialTable()
    new = table.absorb(seed_entries(3, 0b111))
    assert sorted(table.lists) == [1, 2, 3, 4, 5, 6, 7]
    assert len(new) == 7
    assert table.min_length(0b111) == 0


def test_absorb_skips_entries_beyond_bound():
    table = PartialTable()
    heavy = entry_for([(0, 1, 6)], root=1)
    exact = entry_for([(0, 1, 5)], root=1)
    assert table.absorb([heavy], best_bound=5) == []
    assert not table.contains(heavy)
    assert len(table.absorb([exact], best_bound=5)) == 1


def test_table_inventory_helpers():
    table = PartialTable()
    table.absorb([entry_for([(0, 1, 2)], root=1), entry_for([(3, 4, 1)], root=4, mask=0b10)])
    assert table.min_length(0b1) == 2
    assert table.min_length(0b100) is None
    assert table.local_tree_nodes() == {0, 1, 3, 4}


# ------------------------------------------------------------- truncate


def test_truncate_drops_node_superset_at_no_smaller_length():
    small = entry_for([(0, 1, 1)], root=1)
    big = entry_for([(0, 1, 1), (1, 2, 1)], root=2)
    table = PartialTable()
    table.absorb([small, big])
    table.truncate(1)
    assert table.lists[1] == [small]


def test_truncate_keeps_cheaper_superset():
    # spanning more nodes is fine when it is strictly lighter
    pricey = entry_for([(0, 1, 5)], root=1)
    wide = entry_for([(0, 1, 1), (1, 2, 2)], root=2)
    table = PartialTable()
    table.absorb([pricey, wide])
    table.truncate(1)
    assert table.lists[1] == [wide, pricey]


def test_truncate_keeps_equal_node_sets():
    # two different trees over the same nodes are incomparable even when
    # one is lighter; the heavier one may still win a later tie-break
    direct = entry_for([(0, 2, 1), (1, 2, 1)], root=2)
    detour = entry_for([(0, 1, 1), (1, 2, 3)], root=2)
    table = PartialTable()
    table.absorb([direct, detour])
    table.truncate(1)
    assert table.lists[1] == [direct, detour]


def test_truncate_keeps_incomparable_node_sets():
    left = entry_for([(0, 1, 1)], root=0)
    right = entry_for([(0, 2, 9)], root=0)
    table = PartialTable()
    table.absorb([left, right])
    table.truncate(1)
    assert table.lists[1] == [left, right]


def test_truncate_handles_dominator_sorting_last():
    # equal lengths: the superset's edges sort first, so the dominating
    # subset entry appears later in the list and must still evict it
    superset = entry_for([(0, 1, 1), (1, 2, 2)], root=2)
    subset = entry_for([(0, 1, 3)], root=1)
    table = PartialTable()
    table.absorb([superset, subset])
    assert table.lists[1][0] is superset
    table.truncate(2)
    assert table.lists[1] == [subset]


@given(
    st.lists(
        st.tuples(st.sets(st.integers(0, 5), min_size=1, max_size=4), st.integers(0, 6)),
        min_size=1,
        max_size=8,
    )
)
def test_truncate_dominance_contract(raw):
    entries = [
        PartialAnswer(1, length, min(nodes), ((90 + i, 91 + i, 1),), frozenset(nodes), ((0, min(nodes)),))
        for i, (nodes, length) in enumerate(raw)
    ]
    table = PartialTable()
    table.lists = {1: list(entries)}
    table.truncate(3)
    kept = table.lists[1]
    dropped = [e for e in entries if e not in kept]
    # kept entries never dominate each other, and everything dropped is
    # witnessed by a survivor
    for e in kept:
        assert not any(o.nodes < e.nodes and o.length <= e.length for o in kept)
    for e in dropped:
        assert any(o.nodes < e.nodes and o.length <= e.length for o in kept)


# ------------------------------------------------------------ extraction


def test_extract_keeps_needed_leaves():
    entry = entry_for(
        [(0, 1, 1), (1, 2, 2)], root=2, mask=0b11, keyword_nodes=((0, 0), (1, 2))
    )
    ans = extract_answer(entry, [0b01, 0, 0b10], 0b11)
    assert ans == AnswerTree(3, 2, ((0, 1, 1), (1, 2, 2)), frozenset({0, 1, 2}), ((0, 0), (1, 2)))


def test_extract_prunes_keywordless_root_and_reseats():
    star = entry_for(
        [(0, 1, 1), (0, 2, 2), (0, 3, 4)], root=3, mask=0b11, keyword_nodes=((0, 1), (1, 2))
    )
    ans = extract_answer(star, [0, 0b01, 0b10, 0], 0b11)
    assert ans.nodes == frozenset({0, 1, 2})
    assert ans.root == 0
    assert ans.weight == 3
    assert ans.edges == ((0, 1, 1), (0, 2, 2))


def test_extract_prunes_cascade():
    path = entry_for(
        [(0, 1, 1), (1, 2, 1), (2, 3, 1)], root=3, mask=0b11, keyword_nodes=((0, 0), (1, 1))
    )
    ans = extract_answer(path, [0b01, 0b10, 0, 0b10], 0b11)
    assert ans == AnswerTree(1, 1, ((0, 1, 1),), frozenset({0, 1}), ((0, 0), (1, 1)))


def test_extract_single_node_answer():
    entry = PartialAnswer(0b11, 0, 4, (), frozenset({4}), ((0, 4), (1, 4)))
    ans = extract_answer(entry, [0, 0, 0, 0, 0b11], 0b11)
    assert ans.weight == 0
    assert ans.nodes == frozenset({4})
    assert ans.key == (("node", 4),)


def test_extract_prunes_smallest_node_id_first():
    # both leaves hold the same keyword; the lower id goes, regardless of
    # which edge is cheaper (alternatives reach the table as their own
    # entries, so no weight is lost overall)
    star = entry_for(
        [(0, 1, 1), (0, 2, 5)], root=0, mask=0b11, keyword_nodes=((0, 1), (1, 0))
    )
    ans = extract_answer(star, [0b10, 0b01, 0b01], 0b11)
    assert ans.nodes == frozenset({0, 2})
    assert ans.weight == 5


# --------------------------------------------------- branch bookkeeping


def test_branch_decomposition_splits_at_root():
    ans = AnswerTree(3, 1, ((0, 1, 1), (1, 2, 2)), frozenset({0, 1, 2}), ((0, 0), (1, 2)))
    assert branch_decomposition(ans, [0b01, 0, 0b10], 0b11) == {0b01: 1, 0b10: 2}


def test_branch_decomposition_single_branch_from_endpoint():
    ans = AnswerTree(3, 0, ((0, 1, 1), (1, 2, 2)), frozenset({0, 1, 2}), ((0, 0), (1, 2)))
    assert branch_decomposition(ans, [0b01, 0, 0b10], 0b11) == {0b10: 3}


def test_branch_decomposition_edgeless():
    ans = AnswerTree(0, 4, (), frozenset({4}), ((0, 4), (1, 4)))
    assert branch_decomposition(ans, [0, 0, 0, 0, 0b11], 0b11) == {}


def test_branch_decomposition_rejects_duplicate_masks():
    ans = AnswerTree(2, 0, ((0, 1, 1), (0, 2, 1)), frozenset({0, 1, 2}), ((0, 1), (1, 0)))
    with pytest.raises(TreeAccountingError):
        branch_decomposition(ans, [0b10, 0b01, 0b01], 0b11)


def test_answer_weight_from_branches_matches_edge_sum():
    ans = AnswerTree(3, 1, ((0, 1, 1), (1, 2, 2)), frozenset({0, 1, 2}), ((0, 0), (1, 2)))
    assert answer_weight_from_branches(ans, [0b01, 0, 0b10], 0b11) == 3


def test_answer_weight_mismatch_raises():
    # edges detached from the root never reach the decomposition, which
    # the cross-check must notice
    ans = AnswerTree(5, 0, ((1, 2, 5),), frozenset({0, 1, 2}), ((0, 1), (1, 2)))
    with pytest.raises(TreeAccountingError):
        answer_weight_from_branches(ans, [0, 0b01, 0b10], 0b11)


# ------------------------------------------------------------ properties


@st.composite
def random_tree_instance(draw):
    n = draw(st.integers(3, 8))
    m = draw(st.integers(2, 3))
    full = (1 << m) - 1
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    weights = [draw(st.integers(1, 4)) for _ in range(1, n)]
    covers = [draw(st.integers(0, full)) for _ in range(n)]
    for bit in range(m):
        if not any(c >> bit & 1 for c in covers):
            covers[draw(st.integers(0, n - 1))] |= 1 << bit
    edges = tuple(
        sorted((min(i, p), max(i, p), w) for i, (p, w) in enumerate(zip(parents, weights), 1))
    )
    keyword_nodes = tuple(
        (bit, min(v for v in range(n) if covers[v] >> bit & 1)) for bit in range(m)
    )
    root = draw(st.integers(0, n - 1))
    entry = PartialAnswer(full, sum(weights), root, edges, frozenset(range(n)), keyword_nodes)
    return entry, covers, full


@settings(max_examples=80, deadline=None)
@given(random_tree_instance())
def test_extracted_answers_are_leaf_minimal(instance):
    entry, covers, full = instance
    ans = extract_answer(entry, covers, full)

    got = 0
    for v in ans.nodes:
        got |= covers[v]
    assert got & full == full
    assert ans.weight == sum(w for _, _, w in ans.edges)
    assert answer_weight_from_branches(ans, covers, full) == ans.weight

    degree = Counter()
    for lo, hi, _ in ans.edges:
        degree[lo] += 1
        degree[hi] += 1
    for v in ans.nodes:
        if len(ans.nodes) > 1 and degree[v] == 1:
            rest = 0
            for u in ans.nodes:
                if u != v:
                    rest |= covers[u]
            assert rest & full != full, f"leaf {v} is redundant"


@given(st.integers(1, 15))
def test_absorb_closes_combinations(cover):
    table = PartialTable()
    new = table.absorb(seed_entries(7, cover))
    submasks = [m for m in range(1, 16) if m & cover == m]
    assert sorted(table.lists) == submasks
    assert len(new) == len(submasks)
    assert all(table.min_length(m) == 0 for m in submasks)
