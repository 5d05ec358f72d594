"""Named schedule families with known convergence behavior.

Three constructions:

* A three-agent schedule whose every-tail arc unions are weakly
  connected, yet unit-weight averaging never reaches consensus: the
  communication windows needed for connectivity stretch out so fast that
  the residual disagreement survives in the limit.  The gap between
  agents 3 and 1 at specific sample times obeys an exact product
  recursion, which makes the whole pipeline self-auditing.
* Random periodic schedules that plant a rooted spanning tree often
  enough that every window of T + 1 consecutive steps is weakly
  connected; averaging must then converge uniformly.
* A bidirectional single-edge schedule with ever-growing silent gaps.
  No fixed window length stays connected, but every tail is, and for
  bidirectional communication that is enough for consensus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import AgentState, LinearAverage
from .graphs import DirectedGraph, IntervalSpec, is_weakly_connected_across
from .simulator import GeneratedSchedule, PeriodicSchedule, iter_states

# ---------------------------------------------------------------------------
# The non-converging schedule
#
# Four graphs on agents {1, 2, 3}:
#   g12      : 1 -> 2
#   g12_21   : 1 <-> 2
#   g32      : 3 -> 2
#   g23_32   : 2 <-> 3
# Block s (s = 0, 1, 2, ...) is the sequence
#   (2s copies of g12, g12_21, 2s+1 copies of g32, g23_32)
# of length 4s + 3; blocks are concatenated starting at time 1, so block
# s starts at time 2 s^2 + s + 1.

_G12 = DirectedGraph(3, {(1, 2)})
_G12_21 = DirectedGraph(3, {(1, 2), (2, 1)})
_G32 = DirectedGraph(3, {(3, 2)})
_G23_32 = DirectedGraph(3, {(2, 3), (3, 2)})

_CE_FIRST_TIME = 1


class CounterexampleSchedule(GeneratedSchedule):
    """The stretching-block schedule on three agents (first time 1)."""

    block_graphs = (_G12, _G12_21, _G32, _G23_32)

    def __init__(self):
        super().__init__(
            fn=self._lookup, n=3, first_time=_CE_FIRST_TIME, name="counterexample"
        )

    def tail_union(self, start: int) -> DirectedGraph:
        # Every tail contains a complete block with s >= 1, and such a
        # block uses all four arc sets.
        return DirectedGraph(3, {(1, 2), (2, 1), (3, 2), (2, 3)})

    @staticmethod
    def block_start(s: int) -> int:
        """Time at which block s begins."""
        if s < 0:
            raise ValueError(f"block index must be nonnegative, got {s}")
        return 2 * s * s + s + 1

    @classmethod
    def block_of(cls, t: int) -> tuple[int, int]:
        """(block index, offset inside the block) for a time t >= 1."""
        if t < _CE_FIRST_TIME:
            raise ValueError(f"time must be at least {_CE_FIRST_TIME}, got {t}")
        s = (math.isqrt(8 * t - 7) - 1) // 4
        return s, t - cls.block_start(s)

    @classmethod
    def _lookup(cls, t: int) -> DirectedGraph:
        s, r = cls.block_of(t)
        if r < 2 * s:
            return _G12
        if r == 2 * s:
            return _G12_21
        if r <= 4 * s + 1:
            return _G32
        return _G23_32


def counterexample_schedule() -> CounterexampleSchedule:
    return CounterexampleSchedule()


def counterexample_initial_state() -> AgentState:
    """The canonical initial data (0, 1, 1) at time 1."""
    return AgentState([0.0, 1.0, 1.0])


def counterexample_sample_times(p_max: int) -> tuple[int, ...]:
    """Sample times t_p = 1 + p (p + 1) / 2 for p = 1..p_max.

    Consecutive samples are p + 1 steps apart; each lands right after a
    block's mutual exchange between agents 2 and 3.
    """
    if p_max < 1:
        raise ValueError(f"p_max must be at least 1, got {p_max}")
    return tuple(1 + p * (p + 1) // 2 for p in range(1, p_max + 1))


def counterexample_limit() -> float:
    """Limit of the gap sequence: one half times prod_{j>=2} (1 - 2^-j)."""
    v = 0.5
    for j in range(2, 64):
        v *= 1.0 - 2.0 ** (-j)
    return v


@dataclass(frozen=True)
class CounterexampleRow:
    p: int
    t: int
    gap: float  # x3 - x1 at the sample time
    predicted: float  # from the product recursion
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol


@dataclass(frozen=True)
class CounterexampleReport:
    p_max: int
    rows: tuple[CounterexampleRow, ...]
    final_gap: float
    recursion_gap: float  # independent recursion value at p_max
    limit_lower_bound: float  # rigorous floor on the limiting gap

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def first_failure(self) -> Optional[int]:
        for r in self.rows:
            if not r.ok:
                return r.p
        return None


def _recursion_tol(p: int) -> float:
    # Accumulated roundoff grows with the run length; stay strict early.
    return 1e-12 if p <= 20 else 1e-9


def verify_counterexample(p_max: int = 64) -> CounterexampleReport:
    """Simulate the schedule and check the gap recursion at the sample times.

    The gap v(p) = x3 - x1 at time t_p must satisfy v(1) = 1/2 and
    v(p) = v(p-1) (2^p - 1) / 2^p.  Each row records the simulated gap,
    the value the recursion predicts from the previous row, and their
    difference.  A mismatch beyond tolerance is reported, not raised.
    """
    if p_max < 1:
        raise ValueError(f"p_max must be at least 1, got {p_max}")
    schedule = counterexample_schedule()
    update = LinearAverage()
    t_samples = counterexample_sample_times(p_max)
    want = {t: p for p, t in enumerate(t_samples, start=1)}
    gaps: dict[int, float] = {}
    steps = t_samples[-1] - _CE_FIRST_TIME
    for t, x in iter_states(schedule, update, counterexample_initial_state(), steps):
        if t in want:
            v = x.values
            gaps[want[t]] = float(v[2] - v[0])
    rows = []
    for p in range(1, p_max + 1):
        gap = gaps[p]
        if p == 1:
            predicted = 0.5
        else:
            predicted = gaps[p - 1] * (2.0**p - 1.0) / 2.0**p
        rows.append(
            CounterexampleRow(
                p=p,
                t=t_samples[p - 1],
                gap=gap,
                predicted=predicted,
                residual=abs(gap - predicted),
                tol=_recursion_tol(p),
            )
        )
    recursion = 0.5
    for j in range(2, p_max + 1):
        recursion *= (2.0**j - 1.0) / 2.0**j
    final = gaps[p_max]
    return CounterexampleReport(
        p_max=p_max,
        rows=tuple(rows),
        final_gap=final,
        recursion_gap=recursion,
        limit_lower_bound=final * (1.0 - 2.0 ** (-p_max)),
    )


# ---------------------------------------------------------------------------
# Random periodic schedules with guaranteed connected windows


def _random_arborescence(n: int, rng: np.random.Generator) -> set[tuple[int, int]]:
    """Arcs of a random spanning tree directed away from a random root."""
    order = [int(v) + 1 for v in rng.permutation(n)]
    arcs: set[tuple[int, int]] = set()
    for i in range(1, n):
        parent = order[int(rng.integers(0, i))]
        arcs.add((parent, order[i]))
    return arcs


_EXTRA_ARC_RATE = 0.15
_WINDOWED_ATTEMPTS = 16


def random_windowed_schedule(
    n: int, T: int, length: int, seed: int = 0
) -> PeriodicSchedule:
    """Random periodic schedule whose every (T+1)-window is weakly connected.

    A rooted spanning tree is planted at every slot that is a multiple of
    T + 1 (consecutive plants, including across the period wrap, are at
    most T + 1 apart, so every window of T + 1 consecutive times sees
    one); independent extra arcs are sprinkled everywhere.  The window
    property is then validated explicitly for every start in one period,
    retrying with a fresh substream in the astronomically unlikely event
    of a failure.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if T < 0:
        raise ValueError(f"window slack T must be nonnegative, got {T}")
    if length < 1:
        raise ValueError(f"period length must be at least 1, got {length}")
    name = f"windowed:n={n},T={T},length={length},seed={seed}"
    for attempt in range(_WINDOWED_ATTEMPTS):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, attempt)))
        graphs = []
        for slot in range(length):
            arcs: set[tuple[int, int]] = set()
            if slot % (T + 1) == 0:
                arcs |= _random_arborescence(n, rng)
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    if k != l and rng.random() < _EXTRA_ARC_RATE:
                        arcs.add((k, l))
            graphs.append(DirectedGraph(n, arcs))
        schedule = PeriodicSchedule(graphs, first_time=0, name=name)
        if all(
            is_weakly_connected_across(schedule, IntervalSpec(t0, t0 + T))
            for t0 in range(length)
        ):
            return schedule
    raise RuntimeError(
        f"failed to build a connected-window schedule after {_WINDOWED_ATTEMPTS} "
        f"attempts (n={n}, T={T}, length={length}, seed={seed})"
    )


# ---------------------------------------------------------------------------
# Bidirectional schedule with stretching silent gaps


class StretchingSchedule(GeneratedSchedule):
    """Bidirectional path edges activated one at a time, ever further apart.

    The g-th active step (g = 1, 2, ...) happens at offset
    (g - 1)(g + 2) / 2 from the first time and turns on both directions
    of path edge 1 + ((g - 1) mod (n - 1)); it is followed by g arc-free
    steps.  Every tail of the schedule eventually cycles through all path
    edges, but no fixed window length does.
    """

    def __init__(self, n: int):
        if n < 2:
            raise ValueError(f"need at least two nodes, got n={n}")
        self.edges = [
            DirectedGraph(n, {(e, e + 1), (e + 1, e)}) for e in range(1, n)
        ]
        self._empty = DirectedGraph(n, ())
        super().__init__(
            fn=self._lookup, n=n, first_time=0, name=f"stretching:n={n}"
        )

    def active_position(self, g: int) -> int:
        """Time of the g-th active step (g >= 1)."""
        if g < 1:
            raise ValueError(f"active step index must be at least 1, got {g}")
        return self.first_time + (g - 1) * (g + 2) // 2

    def arc_free_window(self, T: int) -> IntervalSpec:
        """A window of T consecutive arc-free times (T >= 1)."""
        if T < 1:
            raise ValueError(f"window length must be at least 1, got {T}")
        start = self.active_position(T) + 1
        return IntervalSpec(start, start + T - 1)

    def tail_union(self, start: int) -> DirectedGraph:
        # Active steps recur forever and cycle through all path edges, so
        # every tail union is the full bidirectional path.
        arcs: set[tuple[int, int]] = set()
        for g in self.edges:
            arcs |= g.arcs
        return DirectedGraph(self.n, arcs)

    def _lookup(self, t: int) -> DirectedGraph:
        q = t - self.first_time
        g = (math.isqrt(9 + 8 * q) - 1) // 2
        if (g - 1) * (g + 2) // 2 != q:
            return self._empty
        return self.edges[(g - 1) % (len(self.edges))]


def stretching_bidirectional_schedule(n: int) -> StretchingSchedule:
    return StretchingSchedule(n)
