"""Time-dependent graph schedules and trajectory simulation.

A schedule assigns a communication graph to every integer time at or
after its first time.  Three kinds cover practical needs: an explicit
finite list (eventually constant, by default arc-free), a repeating
list, and an arbitrary generator function.  Periodic and eventually
constant schedules expose enough structure that arc unions over
unbounded time intervals stay decidable.

`simulate` rolls an update map along a schedule and records the visited
states; `attractivity_probe` repeats that from random initial states
around a center and reports how often the group reached consensus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from .dynamics import AgentState, UpdateMap
from .graphs import DirectedGraph, WeightedDigraph, as_directed
from .lyapunov import diameter, hull

Graph = Union[DirectedGraph, WeightedDigraph]


class GraphSchedule:
    """Base class: a graph for every time t >= first_time.

    Subclasses set `period` (repeating schedules) or `constant_from`
    (schedules that stop changing) when applicable; both stay None
    otherwise.  `name` identifies the schedule in reports and files.
    """

    first_time: int
    n: int
    name: str
    period: Optional[int] = None
    constant_from: Optional[int] = None

    def _check_time(self, t: int) -> int:
        t = int(t)
        if t < self.first_time:
            raise ValueError(
                f"time {t} is before the schedule's first time {self.first_time}"
            )
        return t

    def graph_at(self, t: int) -> Graph:
        raise NotImplementedError

    def tail_union(self, start: int) -> Optional[DirectedGraph]:
        """Arc union over [start, infinity), when known in closed form.

        Aperiodic generated schedules with analyzable structure override
        this; the default None means the union must be scanned, which is
        only possible for periodic or eventually constant schedules.
        """
        return None


class FiniteSchedule(GraphSchedule):
    """An explicit list of graphs, then a constant `after` graph forever.

    `after` defaults to the arc-free graph, modeling a burst of
    communication followed by silence.
    """

    def __init__(
        self,
        graphs: Sequence[Graph],
        first_time: int = 0,
        after: Optional[Graph] = None,
        name: str = "finite",
    ):
        graphs = tuple(graphs)
        if not graphs and after is None:
            raise ValueError("need at least one graph or an explicit after graph")
        ns = {as_directed(g).n for g in graphs}
        if after is not None:
            ns.add(as_directed(after).n)
        if len(ns) != 1:
            raise ValueError(f"graphs disagree on node count: {sorted(ns)}")
        self.n = ns.pop()
        self.graphs = graphs
        self.after = after if after is not None else DirectedGraph(self.n, ())
        self.first_time = int(first_time)
        self.constant_from = self.first_time + len(graphs)
        self.name = name

    def graph_at(self, t: int) -> Graph:
        idx = self._check_time(t) - self.first_time
        return self.graphs[idx] if idx < len(self.graphs) else self.after


class PeriodicSchedule(GraphSchedule):
    """A list of graphs repeated forever; the period is the list length."""

    def __init__(self, graphs: Sequence[Graph], first_time: int = 0, name: str = "periodic"):
        graphs = tuple(graphs)
        if not graphs:
            raise ValueError("need at least one graph")
        ns = {as_directed(g).n for g in graphs}
        if len(ns) != 1:
            raise ValueError(f"graphs disagree on node count: {sorted(ns)}")
        self.n = ns.pop()
        self.graphs = graphs
        self.first_time = int(first_time)
        self.period = len(graphs)
        self.name = name

    def graph_at(self, t: int) -> Graph:
        idx = (self._check_time(t) - self.first_time) % self.period
        return self.graphs[idx]


class GeneratedSchedule(GraphSchedule):
    """Graphs produced by a function of time.

    Declare `period` or `constant_from` when the generator honors them;
    otherwise unions over unbounded intervals are refused.
    """

    def __init__(
        self,
        fn: Callable[[int], Graph],
        n: int,
        first_time: int = 0,
        name: str = "generated",
        period: Optional[int] = None,
        constant_from: Optional[int] = None,
    ):
        if period is not None and period < 1:
            raise ValueError(f"period must be at least 1, got {period}")
        self.fn = fn
        self.n = int(n)
        self.first_time = int(first_time)
        self.name = name
        self.period = period
        self.constant_from = constant_from

    def graph_at(self, t: int) -> Graph:
        g = self.fn(self._check_time(t))
        if as_directed(g).n != self.n:
            raise ValueError(
                f"generator returned a graph with n={as_directed(g).n}, expected {self.n}"
            )
        return g


def constant_schedule(graph: Graph, first_time: int = 0) -> PeriodicSchedule:
    """The same graph at every time."""
    return PeriodicSchedule([graph], first_time, name="constant")


# ---------------------------------------------------------------------------
# Trajectories


@dataclass(frozen=True)
class Trajectory:
    """Recorded (time, state) samples of one simulation run.

    Normally every step is stored; long runs past the simulator's storage
    cap keep a strided subsample plus the final state.  `times` is
    strictly increasing and starts at the initial time.
    """

    times: tuple[int, ...]
    states: tuple[AgentState, ...]
    map_name: str = ""
    schedule_name: str = ""

    def __post_init__(self):
        if len(self.times) != len(self.states) or not self.times:
            raise ValueError("times and states must be equal-length and nonempty")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.times)})

    @property
    def t0(self) -> int:
        return self.times[0]

    @property
    def t_end(self) -> int:
        return self.times[-1]

    @property
    def n(self) -> int:
        return self.states[0].n

    @property
    def d(self) -> int:
        return self.states[0].d

    @property
    def final(self) -> AgentState:
        return self.states[-1]

    def state_at(self, t: int) -> AgentState:
        i = self._index.get(int(t))
        if i is None:
            raise ValueError(f"time {t} is not stored in this trajectory")
        return self.states[i]

    def __len__(self) -> int:
        return len(self.times)


def iter_states(
    schedule: GraphSchedule,
    update_map: UpdateMap,
    x0,
    steps: int,
    t0: Optional[int] = None,
) -> Iterator[tuple[int, AgentState]]:
    """Yield (t, state) from t0 through t0 + steps, stepping the map."""
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    t0 = schedule.first_time if t0 is None else int(t0)
    if t0 < schedule.first_time:
        raise ValueError(
            f"t0={t0} is before the schedule's first time {schedule.first_time}"
        )
    x = x0 if isinstance(x0, AgentState) else AgentState(x0)
    if x.n != schedule.n:
        raise ValueError(f"state has n={x.n} but schedule has n={schedule.n}")
    yield t0, x
    for t in range(t0, t0 + steps):
        x = update_map.step(t, schedule.graph_at(t), x)
        yield t + 1, x


DEFAULT_STORE_CAP = 1_000_000


def simulate(
    schedule: GraphSchedule,
    update_map: UpdateMap,
    x0,
    steps: int,
    t0: Optional[int] = None,
    store_cap: int = DEFAULT_STORE_CAP,
) -> Trajectory:
    """Run `steps` updates along the schedule and record the trajectory.

    With more than `store_cap` states, storage is thinned to a regular
    stride (the final state is always kept); the dynamics themselves are
    unaffected.
    """
    if store_cap < 2:
        raise ValueError(f"store_cap must be at least 2, got {store_cap}")
    # Reserve one slot for the (possibly stride-unaligned) final state so
    # the total never exceeds the cap.
    stride = max(1, math.ceil((steps + 1) / (store_cap - 1)))
    times: list[int] = []
    states: list[AgentState] = []
    last: Optional[tuple[int, AgentState]] = None
    for i, (t, x) in enumerate(iter_states(schedule, update_map, x0, steps, t0)):
        if i % stride == 0:
            times.append(t)
            states.append(x)
            last = None
        else:
            last = (t, x)
    if last is not None:
        times.append(last[0])
        states.append(last[1])
    return Trajectory(
        times=tuple(times),
        states=tuple(states),
        map_name=update_map.name,
        schedule_name=schedule.name,
    )


def disagreement(state) -> float:
    """Hull diameter of the agent positions: 0 exactly at consensus."""
    x = state if isinstance(state, AgentState) else AgentState(state)
    if x.d == 1:
        v = x.points[:, 0]
        return float(v.max() - v.min())
    return diameter(hull(x))


def detect_consensus(traj: Trajectory, tol: float) -> Optional[int]:
    """First stored time with disagreement below tol, or None."""
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    for t, st in zip(traj.times, traj.states):
        if disagreement(st) < tol:
            return t
    return None


# ---------------------------------------------------------------------------
# Attractivity probing


@dataclass(frozen=True)
class ProbeSample:
    index: int
    status: str  # "converged" | "diverged" | "undetermined"
    final_disagreement: float
    max_excursion: float
    consensus_time: Optional[int]


@dataclass(frozen=True)
class ProbeReport:
    schedule_name: str
    map_name: str
    t0: int
    center: tuple
    radius: float
    horizon: int
    tol: float
    seed: int
    samples: tuple[ProbeSample, ...]

    @property
    def converged_fraction(self) -> float:
        if not self.samples:
            return 0.0
        return sum(s.status == "converged" for s in self.samples) / len(self.samples)

    def to_json_dict(self) -> dict:
        return {
            "schedule": self.schedule_name,
            "map": self.map_name,
            "t0": self.t0,
            "center": [list(row) for row in self.center],
            "radius": self.radius,
            "horizon": self.horizon,
            "tol": self.tol,
            "seed": self.seed,
            "samples": len(self.samples),
            "converged_fraction": self.converged_fraction,
            "per_sample": [
                {
                    "index": s.index,
                    "status": s.status,
                    "final_disagreement": s.final_disagreement,
                    "max_excursion": s.max_excursion,
                    "consensus_time": s.consensus_time,
                }
                for s in self.samples
            ],
        }


#: Relative disagreement drop over the last tenth of the horizon below
#: which an unconverged run is called diverged rather than undetermined.
_STALL_THRESHOLD = 1e-3


def attractivity_probe(
    schedule: GraphSchedule,
    update_map: UpdateMap,
    center,
    radius: float,
    samples: int = 20,
    horizon: int = 1000,
    tol: float = 1e-6,
    seed: int = 0,
    t0: Optional[int] = None,
) -> ProbeReport:
    """Sample initial states near a center and count consensus outcomes.

    Each sample starts uniformly in the ball of the given radius around
    `center` (in the flattened state space) and is stepped until its
    disagreement drops below `tol` (converged) or the horizon is reached.
    Unconverged runs whose disagreement is still visibly shrinking over
    the final tenth of the horizon are labeled undetermined; the rest are
    labeled diverged.  Everything is deterministic in `seed`.
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    if not (radius >= 0.0 and math.isfinite(radius)):
        raise ValueError(f"radius must be nonnegative and finite, got {radius}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    c = center if isinstance(center, AgentState) else AgentState(center)
    t0 = schedule.first_time if t0 is None else int(t0)
    checkpoint = max(1, horizon - horizon // 10)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(samples)]
    out: list[ProbeSample] = []
    for i in range(samples):
        rng = rngs[i]
        dim = c.n * c.d
        direction = rng.standard_normal(dim)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            offset = np.zeros(dim)
        else:
            offset = direction / norm * radius * rng.uniform(0.0, 1.0) ** (1.0 / dim)
        x0 = AgentState(c.points + offset.reshape(c.n, c.d))
        status = "diverged"
        consensus_time: Optional[int] = None
        max_exc = 0.0
        d_checkpoint = math.inf
        d_now = math.inf
        for t, x in iter_states(schedule, update_map, x0, horizon, t0):
            d_now = disagreement(x)
            max_exc = max(max_exc, d_now)
            if d_now < tol:
                status = "converged"
                consensus_time = t
                break
            if t - t0 == checkpoint:
                d_checkpoint = d_now
        if status != "converged":
            drop = (d_checkpoint - d_now) / d_checkpoint if d_checkpoint > 0.0 else 0.0
            status = "undetermined" if drop > _STALL_THRESHOLD else "diverged"
        out.append(
            ProbeSample(
                index=i,
                status=status,
                final_disagreement=d_now,
                max_excursion=max_exc,
                consensus_time=consensus_time,
            )
        )
    return ProbeReport(
        schedule_name=schedule.name,
        map_name=update_map.name,
        t0=t0,
        center=tuple(tuple(map(float, row)) for row in c.points),
        radius=float(radius),
        horizon=int(horizon),
        tol=float(tol),
        seed=int(seed),
        samples=tuple(out),
    )
