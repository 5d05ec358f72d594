"""Agent states, update matrices, and one-step update maps.

The discrete-time system acts on n agents whose states are points in R^d
with d in {1, 2}.  Each time step is driven by the current communication
graph: agent k hears from its in-senders (nodes with an arc into k) and
moves to a convex combination of what it hears.  The linear map is given
by a stochastic matrix built from arc weights; the other maps here are
classical nonlinear examples (coupled oscillators in chart coordinates,
odd-gain consensus flows, heading averaging) plus a deliberately
non-contracting reference map (coordinate-wise max).

Two runtime checkers probe the structural assumptions the convergence
theory rests on: that an agent's update depends only on its own state and
its in-senders' states, and that the update lands strictly inside the
convex hull of those states unless they all coincide.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .graphs import Arc, DirectedGraph, WeightedDigraph, as_directed

GainFn = Callable[[float], float]


class AgentState:
    """Immutable snapshot of n agent positions in R^d, d in {1, 2}.

    Accepts a length-n sequence (d = 1) or an (n, d) array.  Coordinates
    must be finite.  The stored array is read-only.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        arr = np.array(points, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] not in (1, 2):
            raise ValueError(
                f"state must be (n,) or (n, d) with d in {{1, 2}}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("state coordinates must be finite")
        arr.flags.writeable = False
        self.points = arr

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def values(self) -> np.ndarray:
        """The scalar states as a flat array (d = 1 only)."""
        if self.d != 1:
            raise ValueError(f"values is for scalar states, this one has d={self.d}")
        return self.points[:, 0]

    def point(self, k: int) -> np.ndarray:
        """Position of agent k (1-based)."""
        return self.points[k - 1]

    def __repr__(self) -> str:
        return f"AgentState({self.points.tolist()!r})"


class StochasticMatrix:
    """Row-stochastic matrix with strictly positive diagonal."""

    __slots__ = ("entries",)

    _ROW_SUM_TOL = 1e-12

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        if np.any(arr < 0.0):
            raise ValueError("matrix entries must be nonnegative")
        sums = arr.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > self._ROW_SUM_TOL)[0]
        if bad.size:
            k = int(bad[0])
            raise ValueError(f"row {k + 1} sums to {sums[k]!r}, not 1")
        if np.any(np.diag(arr) <= 0.0):
            raise ValueError("diagonal entries must be strictly positive")
        arr.flags.writeable = False
        self.entries = arr

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"StochasticMatrix({self.entries.tolist()!r})"


def build_update_matrix(g: Union[DirectedGraph, WeightedDigraph]) -> StochasticMatrix:
    """Stochastic update matrix of a weighted communication graph.

    Row k averages agent k's own state with its in-senders' states:

        A[k, k] = 1 / (1 + S_k),   A[k, i] = w_ik / (1 + S_k)  for senders i,

    where S_k is the total weight into k.  An unweighted graph gets unit
    weights.  The arc-free graph yields the identity.
    """
    wg = g if isinstance(g, WeightedDigraph) else WeightedDigraph.unit(g)
    n = wg.n
    A = np.zeros((n, n))
    for k in range(1, n + 1):
        ins = wg.graph.in_sources(k)
        denom = 1.0 + sum(wg.weight(i, k) for i in ins)
        A[k - 1, k - 1] = 1.0 / denom
        for i in ins:
            A[k - 1, i - 1] = wg.weight(i, k) / denom
    return StochasticMatrix(A)


def linear_step(matrix: StochasticMatrix, state: AgentState) -> AgentState:
    """One linear averaging step x -> A x (applied per coordinate).

    Evaluated in increment form, x_k + sum_l A[k, l] (x_l - x_k), which is
    the same product because rows sum to 1.  This way common-point states
    are bit-exact fixed points and adding a constant shifts the output by
    exactly that constant, even when a float row sum is off by an ulp.
    """
    if matrix.n != state.n:
        raise ValueError(f"matrix is {matrix.n}x{matrix.n} but state has n={state.n}")
    pts = state.points
    diff = pts[None, :, :] - pts[:, None, :]
    return AgentState(pts + np.einsum("kl,kld->kd", matrix.entries, diff))


# ---------------------------------------------------------------------------
# Fixed-step RK4, shared by the two flow-based maps


def _rk4(field: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, substeps: int) -> np.ndarray:
    if substeps < 1:
        raise ValueError(f"substeps must be at least 1, got {substeps}")
    h = 1.0 / substeps
    y = y0
    for _ in range(substeps):
        k1 = field(y)
        k2 = field(y + 0.5 * h * k1)
        k3 = field(y + 0.5 * h * k2)
        k4 = field(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _in_adjacency(g: DirectedGraph) -> np.ndarray:
    """0/1 matrix with entry [k-1, i-1] = 1 when i sends to k."""
    A = np.zeros((g.n, g.n))
    for i, k in g.arcs:
        A[k - 1, i - 1] = 1.0
    return A


def kuramoto_time1(
    g: Union[DirectedGraph, WeightedDigraph], state: AgentState, substeps: int = 100
) -> AgentState:
    """Time-1 map of coupled oscillators in chart coordinates.

    Integrates dx_k/dt = sum over senders i of
    (x_i - x_k) / (sqrt(1 + x_i^2) sqrt(1 + x_k^2)) over one time unit
    with `substeps` classical RK4 steps.  Coupling is unweighted; only the
    arc pattern of `g` matters.
    """
    base = as_directed(g)
    if state.d != 1:
        raise ValueError("oscillator states are scalar chart coordinates")
    if base.n != state.n:
        raise ValueError(f"graph has n={base.n} but state has n={state.n}")
    A = _in_adjacency(base)

    def field(x: np.ndarray) -> np.ndarray:
        r = 1.0 / np.sqrt(1.0 + x * x)
        diff = x[None, :] - x[:, None]  # diff[k, i] = x_i - x_k
        coup = diff * r[None, :] * r[:, None]
        return (A * coup).sum(axis=1)

    return AgentState(_rk4(field, state.values.copy(), substeps))


_GAIN_GRID = np.linspace(0.125, 4.0, 32)


def validate_gain(gain: GainFn, label: str = "gain") -> None:
    """Sample a gain for oddness and strict monotonicity; raise ValueError if it fails.

    Checks gamma(0) = 0, gamma(-s) = -gamma(s) on a grid, and strict
    increase across the grid.  Smoothness is taken on trust.
    """
    g0 = float(gain(0.0))
    if not abs(g0) <= 1e-12:
        raise ValueError(f"{label}: gamma(0) = {g0!r}, expected 0")
    pos = np.array([float(gain(s)) for s in _GAIN_GRID])
    neg = np.array([float(gain(-s)) for s in _GAIN_GRID])
    asym = np.abs(pos + neg)
    if np.any(asym > 1e-9 * np.maximum(1.0, np.abs(pos))):
        s = _GAIN_GRID[int(np.argmax(asym))]
        raise ValueError(f"{label}: not odd, gamma({s}) + gamma({-s}) != 0")
    seq = np.concatenate([-pos[::-1], [g0], pos])
    if np.any(np.diff(seq) <= 0.0):
        raise ValueError(f"{label}: not strictly increasing on the sample grid")


GAIN_LIBRARY: dict[str, GainFn] = {
    "identity": lambda s: s,
    "cubic": lambda s: s**3,
    "arctan": math.atan,
}


def _resolve_gains(
    g: DirectedGraph, gains: Union[GainFn, Mapping[Arc, GainFn]], validate: bool
) -> dict[Arc, GainFn]:
    if callable(gains):
        if validate:
            validate_gain(gains)
        return {a: gains for a in g.arcs}
    table = dict(gains)
    missing = set(g.arcs) - set(table)
    if missing:
        raise ValueError(f"no gain supplied for arcs {sorted(missing)}")
    if validate:
        for a in sorted(g.arcs):
            validate_gain(table[a], label=f"gain for arc {a}")
    return {a: table[a] for a in g.arcs}


def nonlinear_consensus_time1(
    g: Union[DirectedGraph, WeightedDigraph],
    state: AgentState,
    gains: Union[GainFn, Mapping[Arc, GainFn]],
    substeps: int = 100,
    validate: bool = True,
) -> AgentState:
    """Time-1 map of dx_k/dt = sum over senders i of gamma_ik(x_i - x_k).

    Each arc (i, k) carries an odd, strictly increasing gain; a single
    callable is shared by all arcs.  Integration is fixed-step RK4.
    """
    base = as_directed(g)
    if state.d != 1:
        raise ValueError("consensus-flow states are scalar")
    if base.n != state.n:
        raise ValueError(f"graph has n={base.n} but state has n={state.n}")
    table = _resolve_gains(base, gains, validate)
    arcs = sorted(table.items())

    def field(x: np.ndarray) -> np.ndarray:
        f = np.zeros_like(x)
        for (i, k), gamma in arcs:
            f[k - 1] += gamma(x[i - 1] - x[k - 1])
        return f

    return AgentState(_rk4(field, state.values.copy(), substeps))


_HALF_PI = math.pi / 2.0


def vicsek_step(g: Union[DirectedGraph, WeightedDigraph], state: AgentState) -> AgentState:
    """Heading update: each agent takes the angle of the summed unit vectors
    of itself and its senders.

    Headings must lie in the open interval (-pi/2, pi/2); inputs outside
    it are rejected rather than wrapped, and outputs use the principal
    arctangent branch so they stay in the same interval.  The angle is
    computed relative to each agent's own heading (the circular mean is
    rotation invariant), so a neighborhood at a common heading keeps that
    heading bit-exactly.
    """
    base = as_directed(g)
    if state.d != 1:
        raise ValueError("headings are scalar angles")
    if base.n != state.n:
        raise ValueError(f"graph has n={base.n} but state has n={state.n}")
    theta = state.values
    if np.any(np.abs(theta) >= _HALF_PI):
        k = int(np.argmax(np.abs(theta)))
        raise ValueError(
            f"heading of agent {k + 1} is {theta[k]!r}, outside the open "
            f"interval (-pi/2, pi/2)"
        )
    out = np.empty_like(theta)
    for k in base.nodes:
        idx = [k - 1] + [i - 1 for i in base.in_sources(k)]
        rel = theta[idx] - theta[k - 1]
        out[k - 1] = theta[k - 1] + math.atan2(np.sin(rel).sum(), np.cos(rel).sum())
    return AgentState(out)


def max_step(g: Union[DirectedGraph, WeightedDigraph], state: AgentState) -> AgentState:
    """Coordinate-wise maximum over each agent's closed in-neighborhood.

    A reference map that respects the communication pattern but sits on
    the boundary of the neighborhood hull instead of strictly inside it;
    useful as a negative example for the convexity checker.
    """
    base = as_directed(g)
    if base.n != state.n:
        raise ValueError(f"graph has n={base.n} but state has n={state.n}")
    out = np.empty_like(state.points)
    for k in base.nodes:
        idx = [k - 1] + [i - 1 for i in base.in_sources(k)]
        out[k - 1] = state.points[idx].max(axis=0)
    return AgentState(out)


# ---------------------------------------------------------------------------
# Update-map objects: a uniform one-step interface for the simulator


class UpdateMap(ABC):
    """One synchronous update x(t+1) = step(t, G(t), x(t))."""

    name: str = "update"
    supported_dims: tuple[int, ...] = (1,)
    #: True when the map is produced by numerical integration, in which
    #: case equality-style checks allow a small tolerance instead of
    #: bit-identical agreement.
    integrator_backed: bool = False
    #: Open coordinate interval the map is defined on, or None for all reals.
    domain: Optional[tuple[float, float]] = None

    def _check(self, graph, state: AgentState) -> None:
        if state.d not in self.supported_dims:
            raise ValueError(f"{self.name} does not support d={state.d}")
        if as_directed(graph).n != state.n:
            raise ValueError(
                f"graph has n={as_directed(graph).n} but state has n={state.n}"
            )

    @abstractmethod
    def step(self, t: int, graph, state: AgentState) -> AgentState:
        raise NotImplementedError


class LinearAverage(UpdateMap):
    """Weighted averaging through the stochastic update matrix.

    Weighted graphs use their own weights; unweighted graphs get
    `default_weight` on every arc.  Matrices are cached per graph, and an
    arc-free graph is an exact no-op.
    """

    name = "linear"
    supported_dims = (1, 2)

    def __init__(self, default_weight: float = 1.0):
        if not (default_weight > 0.0 and math.isfinite(default_weight)):
            raise ValueError(f"default weight must be positive, got {default_weight}")
        self.default_weight = default_weight
        self._cache: dict = {}

    def matrix_for(self, graph) -> StochasticMatrix:
        M = self._cache.get(graph)
        if M is None:
            wg = (
                graph
                if isinstance(graph, WeightedDigraph)
                else WeightedDigraph.unit(graph, self.default_weight)
            )
            M = build_update_matrix(wg)
            self._cache[graph] = M
        return M

    def step(self, t: int, graph, state: AgentState) -> AgentState:
        self._check(graph, state)
        if not as_directed(graph).arcs:
            return state
        return linear_step(self.matrix_for(graph), state)


class KuramotoTime1(UpdateMap):
    """Coupled-oscillator time-1 map (see kuramoto_time1)."""

    name = "kuramoto"
    integrator_backed = True

    def __init__(self, substeps: int = 100):
        if substeps < 1:
            raise ValueError(f"substeps must be at least 1, got {substeps}")
        self.substeps = substeps

    def step(self, t: int, graph, state: AgentState) -> AgentState:
        self._check(graph, state)
        if not as_directed(graph).arcs:
            return state
        return kuramoto_time1(graph, state, self.substeps)


class NonlinearConsensus(UpdateMap):
    """Odd-gain consensus flow time-1 map (see nonlinear_consensus_time1).

    Gains are validated once, at construction.  A mapping of per-arc
    gains must cover every arc of every graph the map is stepped with.
    """

    name = "nonlinear"
    integrator_backed = True

    def __init__(
        self,
        gains: Union[GainFn, Mapping[Arc, GainFn]] = GAIN_LIBRARY["identity"],
        substeps: int = 100,
    ):
        if substeps < 1:
            raise ValueError(f"substeps must be at least 1, got {substeps}")
        if callable(gains):
            validate_gain(gains)
        else:
            gains = dict(gains)
            for a, fn in sorted(gains.items()):
                validate_gain(fn, label=f"gain for arc {a}")
        self.gains = gains
        self.substeps = substeps

    def step(self, t: int, graph, state: AgentState) -> AgentState:
        self._check(graph, state)
        if not as_directed(graph).arcs:
            return state
        return nonlinear_consensus_time1(
            graph, state, self.gains, self.substeps, validate=False
        )


class VicsekHeading(UpdateMap):
    """Heading averaging on the open interval (-pi/2, pi/2) (see vicsek_step)."""

    name = "vicsek"
    domain = (-_HALF_PI, _HALF_PI)

    def step(self, t: int, graph, state: AgentState) -> AgentState:
        self._check(graph, state)
        return vicsek_step(graph, state)


class MaxUpdate(UpdateMap):
    """Coordinate-wise neighborhood maximum (see max_step)."""

    name = "max"
    supported_dims = (1, 2)

    def step(self, t: int, graph, state: AgentState) -> AgentState:
        self._check(graph, state)
        return max_step(graph, state)


# ---------------------------------------------------------------------------
# Assumption checkers


@dataclass(frozen=True)
class LocalityViolation:
    agent: int
    trial: int
    delta: float
    baseline: tuple[float, ...]
    perturbed: tuple[float, ...]


@dataclass(frozen=True)
class LocalityReport:
    map_name: str
    trials: int
    seed: int
    tol: float
    violations: tuple[LocalityViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_communication_assumption(
    update_map: UpdateMap,
    graph,
    state: AgentState,
    trials: int = 20,
    seed: int = 0,
    t: int = 0,
) -> LocalityReport:
    """Probe whether each agent's update uses only its own and its senders' states.

    For every agent k, the states of all agents outside k's closed
    in-neighborhood are randomized `trials` times; component k of the
    output must not move.  Deterministic algebraic maps are held to
    bit-identical agreement, integrator-backed maps to 1e-12.

    Note that time-1 maps of coupled flows genuinely fail this test on
    graphs with multi-hop paths: during the unit interval a sender's own
    motion relays information from further away.  The checker reports
    what the map actually does.
    """
    base = as_directed(graph)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    tol = 1e-12 if update_map.integrator_backed else 0.0
    baseline = update_map.step(t, graph, state).points
    rng = np.random.default_rng(seed)
    if update_map.domain is not None:
        lo, hi = update_map.domain
        span = hi - lo
        lo, hi = lo + 0.01 * span, hi - 0.01 * span
    violations: list[LocalityViolation] = []
    for k in base.nodes:
        closed = {k} | set(base.in_sources(k))
        outside = [j - 1 for j in base.nodes if j not in closed]
        if not outside:
            continue
        for trial in range(trials):
            pts = state.points.copy()
            if update_map.domain is not None:
                pts[outside] = rng.uniform(lo, hi, size=(len(outside), state.d))
            else:
                pts[outside] += rng.uniform(-1.0, 1.0, size=(len(outside), state.d))
            out = update_map.step(t, graph, AgentState(pts)).points
            delta = float(np.max(np.abs(out[k - 1] - baseline[k - 1])))
            if delta > tol:
                violations.append(
                    LocalityViolation(
                        agent=k,
                        trial=trial,
                        delta=delta,
                        baseline=tuple(map(float, baseline[k - 1])),
                        perturbed=tuple(map(float, out[k - 1])),
                    )
                )
    return LocalityReport(
        map_name=update_map.name,
        trials=trials,
        seed=seed,
        tol=tol,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class ConvexityViolation:
    agent: int
    sample: int
    reason: str
    output: tuple[float, ...]
    neighborhood: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class ConvexityReport:
    map_name: str
    samples: int
    seed: int
    violations: tuple[ConvexityViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


_STRICT_MARGIN = 1e-9


def _strict_violation_1d(out: float, nb: np.ndarray) -> Optional[str]:
    lo, hi = float(nb.min()), float(nb.max())
    eps = _STRICT_MARGIN * (hi - lo)
    if out <= lo + eps:
        return f"output {out!r} not strictly above neighborhood min {lo!r}"
    if out >= hi - eps:
        return f"output {out!r} not strictly below neighborhood max {hi!r}"
    return None


def _strict_violation_2d(out: np.ndarray, nb: np.ndarray) -> Optional[str]:
    # Local lazy import: the hull helpers live with the monitoring code.
    from .lyapunov import hull_vertices_2d

    verts = hull_vertices_2d(nb)
    dia = 0.0
    for a in range(len(verts)):
        for b in range(a + 1, len(verts)):
            dia = max(dia, float(np.hypot(*(verts[a] - verts[b]))))
    eps = _STRICT_MARGIN * dia
    if len(verts) == 2:
        # Degenerate hull: relative interior of a segment.
        a, b = verts
        ab = b - a
        L2 = float(ab @ ab)
        s = float((out - a) @ ab) / L2
        perp = float(np.hypot(*(out - (a + s * ab))))
        if perp > eps:
            return f"output {out.tolist()} off the segment spanned by the neighborhood"
        if s * math.sqrt(L2) <= eps or (1.0 - s) * math.sqrt(L2) <= eps:
            return f"output {out.tolist()} at or beyond a segment endpoint"
        return None
    # Proper polygon: demand inward depth > eps at every edge (vertices are CCW).
    m = len(verts)
    for a in range(m):
        p, q = verts[a], verts[(a + 1) % m]
        edge = q - p
        depth = float(edge[0] * (out[1] - p[1]) - edge[1] * (out[0] - p[0])) / float(
            np.hypot(*edge)
        )
        if depth <= eps:
            return (
                f"output {out.tolist()} within {eps!r} of the neighborhood hull "
                f"boundary (edge depth {depth!r})"
            )
    return None


def check_strict_convexity(
    update_map: UpdateMap,
    graph,
    samples: int = 100,
    seed: int = 0,
    d: int = 1,
    box: tuple[float, float] = (-10.0, 10.0),
    t: int = 0,
) -> ConvexityReport:
    """Sample random states and test strict neighborhood-hull contraction.

    For each sampled state and each agent k, the updated position must lie
    strictly inside the relative interior of the convex hull of k's closed
    in-neighborhood (within a margin of 1e-9 of the neighborhood diameter,
    so honest strict interiority is not flagged over rounding).  If the
    neighborhood states all coincide the update must reproduce that value
    exactly (1e-12 for integrator-backed maps).
    """
    base = as_directed(graph)
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    if d not in update_map.supported_dims:
        raise ValueError(f"{update_map.name} does not support d={d}")
    lo, hi = float(box[0]), float(box[1])
    if update_map.domain is not None:
        dlo, dhi = update_map.domain
        span = dhi - dlo
        lo, hi = max(lo, dlo + 0.01 * span), min(hi, dhi - 0.01 * span)
    if not lo < hi:
        raise ValueError(f"empty sampling box ({lo}, {hi})")
    eq_tol = 1e-12 if update_map.integrator_backed else 0.0
    rng = np.random.default_rng(seed)
    closed_idx = {
        k: [k - 1] + sorted(i - 1 for i in base.in_sources(k)) for k in base.nodes
    }
    violations: list[ConvexityViolation] = []
    for s in range(samples):
        pts = rng.uniform(lo, hi, size=(base.n, d))
        out = update_map.step(t, graph, AgentState(pts)).points
        for k in base.nodes:
            nb = pts[closed_idx[k]]
            reason: Optional[str] = None
            if np.all(nb == nb[0]):
                delta = float(np.max(np.abs(out[k - 1] - nb[0])))
                if delta > eq_tol:
                    reason = f"consensus neighborhood moved by {delta!r}"
            elif d == 1:
                reason = _strict_violation_1d(float(out[k - 1, 0]), nb[:, 0])
            else:
                reason = _strict_violation_2d(out[k - 1], nb)
            if reason is not None:
                violations.append(
                    ConvexityViolation(
                        agent=k,
                        sample=s,
                        reason=reason,
                        output=tuple(map(float, out[k - 1])),
                        neighborhood=tuple(tuple(map(float, row)) for row in nb),
                    )
                )
    return ConvexityReport(
        map_name=update_map.name,
        samples=samples,
        seed=seed,
        violations=tuple(violations),
    )
