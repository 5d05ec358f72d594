"""Graph construction, neighbor calculus, connectivity, and the text format."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_lab import (
    DirectedGraph,
    GraphFormatError,
    IntervalSpec,
    UnsupportedQueryError,
    WeightedDigraph,
    FiniteSchedule,
    GeneratedSchedule,
    PeriodicSchedule,
    empty_graph,
    find_root,
    format_graph_text,
    is_bidirectional,
    is_connected_from,
    is_weakly_connected,
    neighbors,
    parse_graph_text,
    relabel,
    union_across,
    weakly_connected_oracle,
)


@st.composite
def digraphs(draw, max_n=5):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(k, l) for k in range(1, n + 1) for l in range(1, n + 1) if k != l]
    if pairs:
        arcs = draw(st.sets(st.sampled_from(pairs)))
    else:
        arcs = set()
    return DirectedGraph(n, arcs)


# ---------------------------------------------------------------------------
# Construction


def test_rejects_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        DirectedGraph(3, {(2, 2)})


def test_rejects_out_of_range_arc():
    with pytest.raises(ValueError, match="outside node range"):
        DirectedGraph(3, {(1, 4)})


def test_rejects_empty_node_set():
    with pytest.raises(ValueError, match="node count"):
        DirectedGraph(0, set())


def test_graph_is_hashable_and_comparable():
    a = DirectedGraph(3, {(1, 2), (2, 3)})
    b = DirectedGraph(3, [(2, 3), (1, 2)])
    assert a == b
    assert hash(a) == hash(b)
    assert a != DirectedGraph(3, {(1, 2)})


def test_in_and_out_adjacency():
    g = DirectedGraph(4, {(2, 1), (1, 2), (3, 2)})
    assert g.in_sources(1) == {2}
    assert g.in_sources(2) == {1, 3}
    assert g.in_sources(3) == frozenset()
    assert g.out_targets(3) == {2}
    assert g.has_arc(3, 2) and not g.has_arc(2, 3)


def test_weighted_digraph_requires_matching_weights():
    g = DirectedGraph(2, {(1, 2)})
    with pytest.raises(ValueError, match="missing weights"):
        WeightedDigraph(g, {})
    with pytest.raises(ValueError, match="absent arcs"):
        WeightedDigraph(g, {(1, 2): 1.0, (2, 1): 1.0})
    with pytest.raises(ValueError, match="positive"):
        WeightedDigraph(g, {(1, 2): 0.0})


def test_weighted_digraph_bounds():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    wg = WeightedDigraph(g, {(1, 2): 0.5, (2, 1): 2.0})
    assert wg.bounds == (0.5, 2.0)  # tight by default
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        WeightedDigraph(g, {(1, 2): 0.5, (2, 1): 2.0}, bounds=(1.0, 2.0))
    with pytest.raises(ValueError, match="e_min"):
        WeightedDigraph(g, {(1, 2): 0.5, (2, 1): 2.0}, bounds=(-1.0, 2.0))


def test_weighted_digraph_equality_and_hash():
    g = DirectedGraph(2, {(1, 2)})
    a = WeightedDigraph(g, {(1, 2): 1.5})
    b = WeightedDigraph(g, {(1, 2): 1.5})
    assert a == b and hash(a) == hash(b)
    assert a != WeightedDigraph(g, {(1, 2): 2.5})


def test_interval_spec_validation():
    assert IntervalSpec(3, 7).bounded
    assert not IntervalSpec(3).bounded
    with pytest.raises(ValueError, match="empty interval"):
        IntervalSpec(5, 4)


# ---------------------------------------------------------------------------
# Neighbors


def test_neighbors_worked_example():
    g = DirectedGraph(4, {(2, 1), (1, 2), (3, 2)})
    assert neighbors(g, {1}) == {2}
    assert neighbors(g, {2}) == {1, 3}
    assert neighbors(g, {1, 2}) == {3}
    assert neighbors(g, {3, 4}) == frozenset()
    assert neighbors(g, set()) == frozenset()


def test_neighbors_rejects_bad_labels():
    g = DirectedGraph(3, set())
    with pytest.raises(ValueError, match="outside"):
        neighbors(g, {0})


@given(digraphs())
def test_neighbors_disjoint_from_argument(g):
    for L in [{1}, set(range(1, g.n + 1)), {g.n}]:
        assert neighbors(g, L) & L == frozenset()


# ---------------------------------------------------------------------------
# Connectivity


def test_connected_from_chain():
    chain = DirectedGraph(3, {(1, 2), (2, 3)})
    assert is_connected_from(chain, 1)
    assert not is_connected_from(chain, 2)
    assert not is_connected_from(chain, 3)


def test_weak_connectivity_examples():
    assert is_weakly_connected(DirectedGraph(1, set()))
    assert not is_weakly_connected(empty_graph(2))
    assert is_weakly_connected(DirectedGraph(3, {(1, 2), (2, 3), (3, 1)}))
    # pair plus an isolated node
    assert not is_weakly_connected(DirectedGraph(3, {(1, 2), (2, 1)}))


def test_bidirectional():
    assert is_bidirectional(DirectedGraph(3, {(1, 2), (2, 1)}))
    assert not is_bidirectional(DirectedGraph(3, {(1, 2), (2, 3), (3, 2)}))
    assert is_bidirectional(empty_graph(2))


def test_oracle_node_cap():
    with pytest.raises(ValueError, match="capped"):
        weakly_connected_oracle(empty_graph(13))


def test_oracle_matches_bfs_exhaustively_n3():
    pairs = [(k, l) for k in range(1, 4) for l in range(1, 4) if k != l]
    for mask in range(1 << len(pairs)):
        arcs = {p for i, p in enumerate(pairs) if mask >> i & 1}
        g = DirectedGraph(3, arcs)
        assert weakly_connected_oracle(g) == is_weakly_connected(g)


@given(digraphs(max_n=5))
@settings(max_examples=150)
def test_oracle_matches_bfs_random(g):
    assert weakly_connected_oracle(g) == is_weakly_connected(g)


def test_find_root_examples():
    assert find_root(DirectedGraph(3, {(1, 2), (2, 3)})) == 1
    assert find_root(DirectedGraph(1, set())) == 1
    assert find_root(empty_graph(2)) is None
    assert find_root(DirectedGraph(2, {(1, 2)})) == 1
    assert find_root(DirectedGraph(2, {(2, 1)})) == 2
    cyc = DirectedGraph(4, {(1, 2), (2, 3), (3, 4), (4, 1)})
    assert is_connected_from(cyc, find_root(cyc))


@given(digraphs())
@settings(max_examples=200)
def test_find_root_soundness(g):
    r = find_root(g)
    if r is None:
        assert not is_weakly_connected(g)
    else:
        assert is_connected_from(g, r)


@given(digraphs(max_n=5), st.randoms(use_true_random=False))
def test_connectivity_is_relabeling_invariant(g, rnd):
    perm = list(range(1, g.n + 1))
    rnd.shuffle(perm)
    assert is_weakly_connected(relabel(g, perm)) == is_weakly_connected(g)


def test_relabel_requires_permutation():
    with pytest.raises(ValueError, match="permutation"):
        relabel(empty_graph(3), [1, 1, 2])


# ---------------------------------------------------------------------------
# Unions across schedules


def test_union_across_finite_schedule():
    a = DirectedGraph(3, {(1, 2)})
    b = DirectedGraph(3, {(2, 3)})
    sched = FiniteSchedule([a, b], first_time=5)
    assert union_across(sched, IntervalSpec(5, 6)).arcs == {(1, 2), (2, 3)}
    assert union_across(sched, IntervalSpec(6, 100)).arcs == {(2, 3)}
    # the tail is the default arc-free graph, so unbounded unions settle
    assert union_across(sched, IntervalSpec(7)).arcs == frozenset()
    assert union_across(sched, IntervalSpec(5)).arcs == {(1, 2), (2, 3)}


def test_union_across_periodic_schedule():
    a = DirectedGraph(3, {(1, 2)})
    b = DirectedGraph(3, {(2, 3)})
    sched = PeriodicSchedule([a, b], first_time=0)
    assert union_across(sched, IntervalSpec(0, 0)).arcs == {(1, 2)}
    assert union_across(sched, IntervalSpec(1, 1)).arcs == {(2, 3)}
    assert union_across(sched, IntervalSpec(3)).arcs == {(1, 2), (2, 3)}
    assert union_across(sched, IntervalSpec(2, 10**9)).arcs == {(1, 2), (2, 3)}


def test_union_across_generated_without_period():
    g = DirectedGraph(2, {(1, 2)})
    sched = GeneratedSchedule(lambda t: g, n=2, first_time=0)
    assert union_across(sched, IntervalSpec(0, 3)).arcs == {(1, 2)}
    with pytest.raises(UnsupportedQueryError):
        union_across(sched, IntervalSpec(0))


def test_union_across_rejects_early_start():
    sched = PeriodicSchedule([empty_graph(2)], first_time=3)
    with pytest.raises(ValueError, match="before the schedule"):
        union_across(sched, IntervalSpec(2, 5))


# ---------------------------------------------------------------------------
# Text format


def test_parse_unweighted_round_trip():
    g = DirectedGraph(4, {(2, 1), (1, 2), (3, 2)})
    assert parse_graph_text(format_graph_text(g)) == g


def test_parse_weighted_round_trip():
    g = DirectedGraph(4, {(2, 1), (1, 2), (3, 2)})
    wg = WeightedDigraph(g, {(2, 1): 0.5, (1, 2): 1.0, (3, 2): 5.0})
    again = parse_graph_text(format_graph_text(wg))
    assert isinstance(again, WeightedDigraph)
    assert again == wg


def test_parse_comments_and_blank_lines():
    text = "# a graph\n\nn=2  # two nodes\n  arc 1 2   # the only arc\n\n"
    g = parse_graph_text(text)
    assert g == DirectedGraph(2, {(1, 2)})


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("arc 1 2\n", 1, "expected 'n="),
        ("n=2\nbogus\n", 2, "expected 'arc"),
        ("n=2\narc 1 1\n", 2, "self-loop"),
        ("n=2\narc 1 3\n", 2, "outside node range"),
        ("n=2\narc 1 2\narc 1 2\n", 3, "duplicate"),
        ("n=2\narc 1 2 1.0\narc 2 1\n", 3, "mixed"),
        ("n=2\narc 1 2\narc 2 1 1.0\n", 3, "mixed"),
        ("n=2\narc 1 2 zero\n", 2, "bad weight"),
        ("n=2\narc 1 2 -1\n", 2, "positive"),
        ("n=0\n", 1, "node count"),
        ("", 1, "empty input"),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(GraphFormatError) as err:
        parse_graph_text(text)
    assert err.value.line == lineno
    assert fragment in str(err.value)


def test_parse_with_declared_bounds():
    text = "n=2\narc 1 2 0.5\n"
    wg = parse_graph_text(text, bounds=(0.1, 1.0))
    assert wg.bounds == (0.1, 1.0)
    with pytest.raises(ValueError, match="outside declared bounds"):
        parse_graph_text(text, bounds=(1.0, 2.0))
