"""State containers, update matrices, nonlinear maps, and assumption checkers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_lab import (
    AgentState,
    DirectedGraph,
    KuramotoTime1,
    LinearAverage,
    MaxUpdate,
    NonlinearConsensus,
    StochasticMatrix,
    VicsekHeading,
    WeightedDigraph,
    build_update_matrix,
    check_communication_assumption,
    check_strict_convexity,
    empty_graph,
    kuramoto_time1,
    linear_step,
    max_step,
    nonlinear_consensus_time1,
    validate_gain,
    vicsek_step,
)

WORKED_GRAPH = WeightedDigraph(
    DirectedGraph(4, {(2, 1), (1, 2), (3, 2)}),
    {(2, 1): 0.5, (1, 2): 1.0, (3, 2): 5.0},
)


# ---------------------------------------------------------------------------
# AgentState and StochasticMatrix


def test_state_accepts_flat_and_planar_input():
    s = AgentState([0.0, 1.0, 2.0])
    assert s.n == 3 and s.d == 1
    assert s.values.tolist() == [0.0, 1.0, 2.0]
    assert s.point(2).tolist() == [1.0]
    p = AgentState([[0.0, 1.0], [2.0, 3.0]])
    assert p.n == 2 and p.d == 2
    assert p.point(1).tolist() == [0.0, 1.0]


def test_state_rejects_bad_input():
    with pytest.raises(ValueError, match="shape"):
        AgentState([[[1.0]]])
    with pytest.raises(ValueError, match="d in"):
        AgentState(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="finite"):
        AgentState([0.0, float("nan")])
    with pytest.raises(ValueError, match="scalar"):
        AgentState([[0.0, 1.0]]).values


def test_state_is_read_only():
    s = AgentState([0.0, 1.0])
    with pytest.raises(ValueError):
        s.points[0] = 5.0


def test_stochastic_matrix_validation():
    StochasticMatrix([[0.5, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError, match="square"):
        StochasticMatrix([[0.5, 0.5]])
    with pytest.raises(ValueError, match="nonnegative"):
        StochasticMatrix([[1.5, -0.5], [0.0, 1.0]])
    with pytest.raises(ValueError, match="row 1 sums"):
        StochasticMatrix([[0.5, 0.6], [0.0, 1.0]])
    with pytest.raises(ValueError, match="diagonal"):
        StochasticMatrix([[0.0, 1.0], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# Update matrix and linear stepping


def test_update_matrix_worked_example():
    A = build_update_matrix(WORKED_GRAPH).entries
    expected = np.array(
        [
            [2 / 3, 1 / 3, 0.0, 0.0],
            [1 / 7, 1 / 7, 5 / 7, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    assert np.array_equal(A, expected)


def test_update_matrix_unit_weights_for_bare_graph():
    A = build_update_matrix(DirectedGraph(3, {(1, 2), (3, 2)})).entries
    expected = np.array([[1.0, 0.0, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 0.0, 1.0]])
    assert np.array_equal(A, expected)


def test_update_matrix_of_arc_free_graph_is_identity():
    assert np.array_equal(build_update_matrix(empty_graph(3)).entries, np.eye(3))


def test_linear_step_worked_example():
    m = build_update_matrix(WORKED_GRAPH)
    out = linear_step(m, AgentState([0.0, 1.0, 1.0, 1.0]))
    assert np.allclose(out.values, [1 / 3, 6 / 7, 1.0, 1.0], rtol=0, atol=1e-15)


def test_linear_step_dimension_mismatch():
    m = build_update_matrix(empty_graph(3))
    with pytest.raises(ValueError, match="n=2"):
        linear_step(m, AgentState([0.0, 1.0]))


@given(
    st.lists(st.floats(-50, 50), min_size=3, max_size=3),
    st.floats(-100, 100),
)
def test_linear_step_translation_invariance(xs, c):
    m = build_update_matrix(DirectedGraph(3, {(1, 2), (2, 3), (3, 1)}))
    base = linear_step(m, AgentState(xs)).values
    shifted = linear_step(m, AgentState([x + c for x in xs])).values
    assert np.allclose(shifted, base + c, rtol=0, atol=1e-9)


def test_linear_step_preserves_consensus_exactly():
    m = build_update_matrix(WORKED_GRAPH)
    out = linear_step(m, AgentState([0.7, 0.7, 0.7, 0.7]))
    # rows sum to 1 exactly for these rational weights
    assert out.values.tolist() == [0.7, 0.7, 0.7, 0.7]


# ---------------------------------------------------------------------------
# Oscillator time-1 map


def test_kuramoto_pair_regression():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    out = kuramoto_time1(g, AgentState([0.0, 1.0]), substeps=1000)
    assert out.values[0] == pytest.approx(0.39278887371618926, abs=1e-12)
    assert out.values[1] == pytest.approx(0.6072111262838092, abs=1e-12)


def test_kuramoto_consensus_is_exact_fixed_point():
    g = DirectedGraph(3, {(1, 2), (2, 1), (2, 3), (3, 2)})
    x = AgentState([1.3, 1.3, 1.3])
    out = kuramoto_time1(g, x, substeps=50)
    assert out.values.tolist() == [1.3, 1.3, 1.3]


def test_kuramoto_symmetric_coupling_conserves_sum():
    g = DirectedGraph(3, {(1, 2), (2, 1), (2, 3), (3, 2)})
    x = AgentState([-1.0, 0.25, 2.0])
    out = kuramoto_time1(g, x, substeps=200)
    assert sum(out.values) == pytest.approx(sum(x.values), abs=1e-12)


def test_kuramoto_isolated_agent_is_frozen():
    g = DirectedGraph(3, {(1, 2), (2, 1)})
    out = kuramoto_time1(g, AgentState([0.0, 1.0, 5.0]), substeps=100)
    assert out.values[2] == 5.0


def test_kuramoto_rejects_planar_states():
    with pytest.raises(ValueError, match="scalar"):
        kuramoto_time1(empty_graph(2), AgentState([[0.0, 1.0], [2.0, 3.0]]), substeps=4)


# ---------------------------------------------------------------------------
# Gain validation and the nonlinear consensus flow


def test_validate_gain_accepts_standard_gains():
    validate_gain(lambda s: s)
    validate_gain(lambda s: s**3)
    validate_gain(math.atan)


def test_validate_gain_rejects_offset():
    with pytest.raises(ValueError, match="gamma\\(0\\)"):
        validate_gain(lambda s: s + 0.1)


def test_validate_gain_rejects_even_function():
    with pytest.raises(ValueError, match="not odd"):
        validate_gain(lambda s: s * s)


def test_validate_gain_rejects_non_monotone():
    with pytest.raises(ValueError, match="strictly increasing"):
        validate_gain(math.sin)


def test_nonlinear_identity_gain_closed_form():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    out = nonlinear_consensus_time1(g, AgentState([0.0, 1.0]), gains=lambda s: s)
    lo = (1.0 - math.exp(-2.0)) / 2.0
    assert out.values[0] == pytest.approx(lo, abs=1e-8)
    assert out.values[1] == pytest.approx(1.0 - lo, abs=1e-8)


def test_nonlinear_per_arc_gains():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    gains = {(1, 2): lambda s: s, (2, 1): lambda s: 3.0 * s}
    out = nonlinear_consensus_time1(g, AgentState([0.0, 1.0]), gains=gains)
    # agent 1 is pulled three times harder, so the pair settles above 1/2
    assert out.values[0] > 0.5
    assert out.values[0] < out.values[1]


def test_nonlinear_missing_arc_gain():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    with pytest.raises(ValueError, match="no gain supplied"):
        nonlinear_consensus_time1(g, AgentState([0.0, 1.0]), gains={(1, 2): lambda s: s})


def test_nonlinear_consensus_exact_fixed_point():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    out = nonlinear_consensus_time1(g, AgentState([2.0, 2.0]), gains=lambda s: s**3)
    assert out.values.tolist() == [2.0, 2.0]


# ---------------------------------------------------------------------------
# Heading averaging and the max map


def test_vicsek_pair_bisects():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    out = vicsek_step(g, AgentState([0.0, math.pi / 4]))
    assert out.values[0] == pytest.approx(math.pi / 8, abs=1e-15)
    assert out.values[1] == pytest.approx(math.pi / 8, abs=1e-15)


def test_vicsek_no_senders_keeps_heading():
    g = DirectedGraph(2, {(1, 2)})
    out = vicsek_step(g, AgentState([0.3, 1.2]))
    assert out.values[0] == 0.3
    # agent 2 averages its heading with agent 1's
    assert out.values[1] == pytest.approx(math.atan2(math.sin(0.3) + math.sin(1.2), math.cos(0.3) + math.cos(1.2)))


def test_vicsek_rejects_out_of_domain():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    with pytest.raises(ValueError, match="agent 2"):
        vicsek_step(g, AgentState([0.0, math.pi / 2]))


def test_max_step_scalar():
    g = DirectedGraph(3, {(1, 2), (3, 2)})
    out = max_step(g, AgentState([3.0, 1.0, 2.0]))
    assert out.values.tolist() == [3.0, 3.0, 2.0]


def test_max_step_planar_is_coordinatewise():
    g = DirectedGraph(2, {(1, 2), (2, 1)})
    out = max_step(g, AgentState([[0.0, 5.0], [4.0, 1.0]]))
    assert out.points.tolist() == [[4.0, 5.0], [4.0, 5.0]]


# ---------------------------------------------------------------------------
# UpdateMap wrappers


def test_linear_average_matches_matrix_and_caches():
    lam = LinearAverage()
    g = DirectedGraph(3, {(1, 2), (2, 3)})
    x = AgentState([0.0, 1.0, 1.0])
    out = lam.step(0, g, x)
    direct = linear_step(build_update_matrix(g), x)
    assert np.array_equal(out.points, direct.points)
    assert lam.matrix_for(g) is lam.matrix_for(g)


def test_linear_average_weighted_graph_uses_given_weights():
    lam = LinearAverage()
    out = lam.step(0, WORKED_GRAPH, AgentState([0.0, 1.0, 1.0, 1.0]))
    assert np.allclose(out.values, [1 / 3, 6 / 7, 1.0, 1.0], rtol=0, atol=1e-15)


def test_linear_average_arc_free_graph_is_identity_object():
    lam = LinearAverage()
    x = AgentState([1.0, 2.0])
    assert lam.step(0, empty_graph(2), x) is x


def test_update_map_rejects_unsupported_dim():
    planar = AgentState([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError, match="does not support d=2"):
        KuramotoTime1().step(0, empty_graph(2), planar)
    with pytest.raises(ValueError, match="does not support d=2"):
        VicsekHeading().step(0, empty_graph(2), planar)
    # the linear and max maps accept planar states
    LinearAverage().step(0, empty_graph(2), planar)
    MaxUpdate().step(0, empty_graph(2), planar)


def test_nonlinear_consensus_validates_at_construction():
    with pytest.raises(ValueError, match="not odd"):
        NonlinearConsensus(gains=lambda s: abs(s))


@pytest.mark.parametrize(
    "update_map",
    [LinearAverage(), KuramotoTime1(substeps=10), NonlinearConsensus(substeps=10), VicsekHeading(), MaxUpdate()],
    ids=lambda m: m.name,
)
@given(c=st.floats(-1.5, 1.5))
@settings(max_examples=25, deadline=None)
def test_consensus_is_fixed_point_for_every_map(update_map, c):
    # the 1/3-1/3-1/3 row of the star graph makes float row sums land off 1
    g = DirectedGraph(3, {(1, 2), (3, 2)})
    out = update_map.step(0, g, AgentState([c, c, c]))
    tol = 1e-12 if update_map.integrator_backed else 0.0
    assert np.max(np.abs(out.values - c)) <= tol


# ---------------------------------------------------------------------------
# Locality checker


def test_locality_linear_average_is_bit_exact():
    g = DirectedGraph(4, {(1, 2), (2, 3), (3, 4)})
    rep = check_communication_assumption(LinearAverage(), g, AgentState([0.0, 1.0, 2.0, 3.0]))
    assert rep.ok
    assert rep.tol == 0.0


def test_locality_kuramoto_star_passes():
    # both senders point at agent 3; nobody is more than one hop away
    g = DirectedGraph(3, {(1, 3), (2, 3)})
    rep = check_communication_assumption(
        KuramotoTime1(substeps=20), g, AgentState([0.5, -0.5, 1.0]), trials=5
    )
    assert rep.ok
    assert rep.tol == 1e-12


def test_locality_kuramoto_chain_relays_information():
    # agent 1 reaches agent 3 through agent 2's motion during the unit interval
    g = DirectedGraph(3, {(1, 2), (2, 3)})
    rep = check_communication_assumption(
        KuramotoTime1(substeps=20), g, AgentState([0.5, -0.5, 1.0]), trials=5
    )
    assert not rep.ok
    assert all(v.agent == 3 for v in rep.violations)
    assert all(v.delta > 1e-12 for v in rep.violations)


def test_locality_vicsek_resamples_inside_domain():
    g = DirectedGraph(3, {(1, 2), (2, 1)})
    rep = check_communication_assumption(
        VicsekHeading(), g, AgentState([0.1, -0.2, 0.4]), trials=50
    )
    assert rep.ok


# ---------------------------------------------------------------------------
# Strict convexity checker


def test_convexity_linear_average_passes():
    g = DirectedGraph(3, {(1, 2), (2, 1), (3, 2)})
    rep = check_strict_convexity(LinearAverage(), g, samples=300)
    assert rep.ok
    assert rep.samples == 300


def test_convexity_linear_average_passes_planar():
    g = DirectedGraph(3, {(1, 2), (2, 1), (3, 2)})
    rep = check_strict_convexity(LinearAverage(), g, samples=150, d=2)
    assert rep.ok


def test_convexity_vicsek_passes_within_domain():
    g = DirectedGraph(3, {(1, 2), (2, 1), (3, 2)})
    rep = check_strict_convexity(VicsekHeading(), g, samples=200)
    assert rep.ok


def test_convexity_max_map_fails_with_witness():
    g = DirectedGraph(3, {(1, 2), (2, 1), (3, 2)})
    rep = check_strict_convexity(MaxUpdate(), g, samples=50)
    assert not rep.ok
    w = rep.violations[0]
    assert w.reason
    assert len(w.neighborhood) >= 2


def test_convexity_rejects_unsupported_dim():
    with pytest.raises(ValueError, match="does not support d=2"):
        check_strict_convexity(KuramotoTime1(), empty_graph(2), d=2)
