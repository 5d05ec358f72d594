"""Consensus dynamics under time-dependent unidirectional communication.

A small laboratory for multi-agent averaging: directed communication
graphs and their connectivity theory, one-step update maps (linear and
nonlinear), convex-hull disagreement monitoring, graph schedules with
simulation and attractivity probing, and named scenario families whose
convergence or divergence is known exactly.
"""

from .graphs import (
    Arc,
    DirectedGraph,
    GraphFormatError,
    IntervalSpec,
    NodeSet,
    UnsupportedQueryError,
    WeightedDigraph,
    as_directed,
    empty_graph,
    find_root,
    format_graph_text,
    is_bidirectional,
    is_connected_from,
    is_weakly_connected,
    is_weakly_connected_across,
    neighbors,
    parse_graph_text,
    read_graph_file,
    relabel,
    union_across,
    weakly_connected_oracle,
)
from .dynamics import (
    GAIN_LIBRARY,
    AgentState,
    ConvexityReport,
    ConvexityViolation,
    KuramotoTime1,
    LinearAverage,
    LocalityReport,
    LocalityViolation,
    MaxUpdate,
    NonlinearConsensus,
    StochasticMatrix,
    UpdateMap,
    VicsekHeading,
    build_update_matrix,
    check_communication_assumption,
    check_strict_convexity,
    kuramoto_time1,
    linear_step,
    max_step,
    nonlinear_consensus_time1,
    validate_gain,
    vicsek_step,
)
from .lyapunov import (
    HullPolytope,
    MonitorRecord,
    contains,
    decrease_over_window,
    diameter,
    hull,
    hull_vertices_2d,
    monitor_stream,
    monitor_trajectory,
    point_distance,
)
from .simulator import (
    FiniteSchedule,
    GeneratedSchedule,
    GraphSchedule,
    PeriodicSchedule,
    ProbeReport,
    ProbeSample,
    Trajectory,
    attractivity_probe,
    constant_schedule,
    detect_consensus,
    disagreement,
    iter_states,
    simulate,
)
from .scenarios import (
    CounterexampleReport,
    CounterexampleRow,
    CounterexampleSchedule,
    StretchingSchedule,
    counterexample_initial_state,
    counterexample_limit,
    counterexample_sample_times,
    counterexample_schedule,
    random_windowed_schedule,
    stretching_bidirectional_schedule,
    verify_counterexample,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "DirectedGraph",
    "GraphFormatError",
    "IntervalSpec",
    "NodeSet",
    "UnsupportedQueryError",
    "WeightedDigraph",
    "as_directed",
    "empty_graph",
    "find_root",
    "format_graph_text",
    "is_bidirectional",
    "is_connected_from",
    "is_weakly_connected",
    "is_weakly_connected_across",
    "neighbors",
    "parse_graph_text",
    "read_graph_file",
    "relabel",
    "union_across",
    "weakly_connected_oracle",
    "GAIN_LIBRARY",
    "AgentState",
    "ConvexityReport",
    "ConvexityViolation",
    "KuramotoTime1",
    "LinearAverage",
    "LocalityReport",
    "LocalityViolation",
    "MaxUpdate",
    "NonlinearConsensus",
    "StochasticMatrix",
    "UpdateMap",
    "VicsekHeading",
    "build_update_matrix",
    "check_communication_assumption",
    "check_strict_convexity",
    "kuramoto_time1",
    "linear_step",
    "max_step",
    "nonlinear_consensus_time1",
    "validate_gain",
    "vicsek_step",
    "HullPolytope",
    "MonitorRecord",
    "contains",
    "decrease_over_window",
    "diameter",
    "hull",
    "hull_vertices_2d",
    "monitor_stream",
    "monitor_trajectory",
    "point_distance",
    "FiniteSchedule",
    "GeneratedSchedule",
    "GraphSchedule",
    "PeriodicSchedule",
    "ProbeReport",
    "ProbeSample",
    "Trajectory",
    "attractivity_probe",
    "constant_schedule",
    "detect_consensus",
    "disagreement",
    "iter_states",
    "simulate",
    "CounterexampleReport",
    "CounterexampleRow",
    "CounterexampleSchedule",
    "StretchingSchedule",
    "counterexample_initial_state",
    "counterexample_limit",
    "counterexample_sample_times",
    "counterexample_schedule",
    "random_windowed_schedule",
    "stretching_bidirectional_schedule",
    "verify_counterexample",
]
