"""Directed communication graphs and connectivity queries.

Nodes are labeled 1..n.  An arc (k, l) means node k sends information to
node l; self-loops are not allowed.  For a node set L, the neighbors of L
are the nodes outside L that send an arc into L.  A graph is weakly
connected when some node has directed paths to every other node; such a
node is called a root.

The module provides:

* immutable graph types (unweighted and arc-weighted),
* the neighbor calculus and reachability queries,
* a subset-pair connectivity oracle (brute force, independent of the
  path-based queries) and a constructive root finder,
* arc unions across time intervals of a graph schedule, and
* a plain-text graph file format.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

NodeSet = frozenset[int]

Arc = tuple[int, int]


class GraphFormatError(ValueError):
    """Malformed graph text.  Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedQueryError(ValueError):
    """The schedule cannot answer the requested interval query."""


@dataclass(frozen=True)
class DirectedGraph:
    """Directed graph on nodes 1..n with arc set `arcs`.

    Instances are immutable and hashable.  Arcs (k, l) are validated to
    have distinct endpoints inside 1..n.
    """

    n: int
    arcs: frozenset[Arc]

    def __init__(self, n: int, arcs: Iterable[Arc] = ()):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "arcs", frozenset((int(k), int(l)) for k, l in arcs))
        if self.n < 1:
            raise ValueError(f"node count must be at least 1, got {n}")
        srcs: dict[int, set[int]] = {k: set() for k in range(1, self.n + 1)}
        outs: dict[int, set[int]] = {k: set() for k in range(1, self.n + 1)}
        for k, l in self.arcs:
            if k == l:
                raise ValueError(f"self-loop ({k}, {l}) is not allowed")
            if not (1 <= k <= self.n and 1 <= l <= self.n):
                raise ValueError(f"arc ({k}, {l}) outside node range 1..{self.n}")
            srcs[l].add(k)
            outs[k].add(l)
        object.__setattr__(self, "_in", {k: frozenset(v) for k, v in srcs.items()})
        object.__setattr__(self, "_out", {k: frozenset(v) for k, v in outs.items()})

    def in_sources(self, k: int) -> NodeSet:
        """Nodes that send an arc into node k."""
        return self._in[k]

    def out_targets(self, k: int) -> NodeSet:
        """Nodes that node k sends an arc to."""
        return self._out[k]

    def has_arc(self, k: int, l: int) -> bool:
        return (k, l) in self.arcs

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, arcs={sorted(self.arcs)!r})"


def empty_graph(n: int) -> DirectedGraph:
    return DirectedGraph(n, ())


class WeightedDigraph:
    """Directed graph with a positive weight on every arc.

    `bounds = (e_min, e_max)` declares the admissible weight range,
    0 < e_min <= e_max; every weight must lie inside it.  When bounds are
    omitted they default to the tight range spanned by the weights (or
    (1, 1) for an arc-free graph).
    """

    __slots__ = ("graph", "weights", "bounds", "_items", "_hash")

    def __init__(
        self,
        graph: DirectedGraph,
        weights: Mapping[Arc, float],
        bounds: Optional[tuple[float, float]] = None,
    ):
        wmap = {(int(k), int(l)): float(w) for (k, l), w in weights.items()}
        if set(wmap) != set(graph.arcs):
            missing = set(graph.arcs) - set(wmap)
            extra = set(wmap) - set(graph.arcs)
            parts = []
            if missing:
                parts.append(f"missing weights for arcs {sorted(missing)}")
            if extra:
                parts.append(f"weights for absent arcs {sorted(extra)}")
            raise ValueError("; ".join(parts))
        for arc, w in wmap.items():
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"weight for arc {arc} must be positive and finite, got {w}")
        if bounds is None:
            if wmap:
                bounds = (min(wmap.values()), max(wmap.values()))
            else:
                bounds = (1.0, 1.0)
        e_min, e_max = float(bounds[0]), float(bounds[1])
        if not (0.0 < e_min <= e_max):
            raise ValueError(f"bounds must satisfy 0 < e_min <= e_max, got {bounds}")
        for arc, w in wmap.items():
            if not (e_min <= w <= e_max):
                raise ValueError(
                    f"weight {w} for arc {arc} outside declared bounds [{e_min}, {e_max}]"
                )
        self.graph = graph
        self.weights = MappingProxyType(wmap)
        self.bounds = (e_min, e_max)
        self._items = tuple(sorted(wmap.items()))
        self._hash = hash((graph, self._items, self.bounds))

    @classmethod
    def unit(cls, graph: DirectedGraph, weight: float = 1.0) -> "WeightedDigraph":
        """Give every arc the same weight (default 1)."""
        return cls(graph, {a: weight for a in graph.arcs}, (weight, weight))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def arcs(self) -> frozenset[Arc]:
        return self.graph.arcs

    def weight(self, k: int, l: int) -> float:
        return self.weights[(k, l)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.graph == other.graph
            and self._items == other._items
            and self.bounds == other.bounds
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"WeightedDigraph(n={self.n}, weights={dict(self._items)!r}, "
            f"bounds={self.bounds!r})"
        )


def as_directed(g: "DirectedGraph | WeightedDigraph") -> DirectedGraph:
    """The underlying unweighted graph."""
    return g.graph if isinstance(g, WeightedDigraph) else g


@dataclass(frozen=True)
class IntervalSpec:
    """Integer time interval [start, end], or [start, infinity) when end is None."""

    start: int
    end: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "start", int(self.start))
        if self.end is not None:
            object.__setattr__(self, "end", int(self.end))
            if self.end < self.start:
                raise ValueError(f"empty interval [{self.start}, {self.end}]")

    @property
    def bounded(self) -> bool:
        return self.end is not None

    def __str__(self) -> str:
        return f"[{self.start}, {self.end if self.bounded else 'inf'}]"


# ---------------------------------------------------------------------------
# Neighbor calculus and reachability


def _check_node_set(g: DirectedGraph, L: Iterable[int]) -> NodeSet:
    s = frozenset(int(k) for k in L)
    for k in s:
        if not (1 <= k <= g.n):
            raise ValueError(f"node {k} outside 1..{g.n}")
    return s


def neighbors(g: "DirectedGraph | WeightedDigraph", L: Iterable[int]) -> NodeSet:
    """Nodes outside L that send an arc into L.

    This is the information-theoretic neighbor set: members of the result
    influence L directly, in one step.  The empty set has no neighbors.
    """
    g = as_directed(g)
    s = _check_node_set(g, L)
    senders: set[int] = set()
    for l in s:
        senders |= g.in_sources(l)
    return frozenset(senders - s)


def is_connected_from(g: "DirectedGraph | WeightedDigraph", k: int) -> bool:
    """True when node k has a directed path to every other node."""
    g = as_directed(g)
    if not (1 <= k <= g.n):
        raise ValueError(f"node {k} outside 1..{g.n}")
    seen = {k}
    frontier = [k]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.out_targets(u):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return len(seen) == g.n


def is_weakly_connected(g: "DirectedGraph | WeightedDigraph") -> bool:
    """True when some node has directed paths to all others."""
    g = as_directed(g)
    return any(is_connected_from(g, k) for k in g.nodes)


def is_bidirectional(g: "DirectedGraph | WeightedDigraph") -> bool:
    """True when the arc set is symmetric: (k, l) present iff (l, k) present."""
    g = as_directed(g)
    return all((l, k) in g.arcs for (k, l) in g.arcs)


_ORACLE_NODE_CAP = 12


def weakly_connected_oracle(g: "DirectedGraph | WeightedDigraph") -> bool:
    """Decide weak connectivity by exhausting subset pairs.

    A graph is weakly connected iff every ordered pair of nonempty
    disjoint node sets (L1, L2) has a neighbor on at least one side.
    This brute-force check runs over all such pairs using bitmask
    arithmetic and shares no code with the path-based queries, so the two
    can be tested against each other.  Capped at 12 nodes.
    """
    g = as_directed(g)
    n = g.n
    if n > _ORACLE_NODE_CAP:
        raise ValueError(
            f"oracle is exponential in the node count and is capped at "
            f"{_ORACLE_NODE_CAP} nodes, got n={n}"
        )
    if n == 1:
        return True
    full = (1 << n) - 1
    src = [0] * n  # src[j] = bitmask of senders into node j+1
    for k, l in g.arcs:
        src[l - 1] |= 1 << (k - 1)
    # senders[mask] = bitmask of all senders into any node of mask
    senders = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        senders[mask] = senders[mask ^ low] | src[low.bit_length() - 1]
    for l1 in range(1, full + 1):
        if senders[l1] & ~l1 & full:
            continue  # L1 has a neighbor, every pair (L1, *) is fine
        comp = full & ~l1
        l2 = comp
        while l2:
            if not (senders[l2] & ~l2 & full):
                return False
            l2 = (l2 - 1) & comp
    return True


def find_root(g: "DirectedGraph | WeightedDigraph") -> Optional[int]:
    """Find a node with directed paths to all others, or None.

    Constructive search: grow two disjoint node sets F1 >= L1 and
    F2 >= L2 such that every node of L_j reaches every node of F_j.  Each
    round picks the lowest-labeled node sending an arc into L2 (or, if
    there is none, into L1, with the roles swapped) and applies one of
    four moves; either the explored region F1 | F2 grows or the live
    region L1 | L2 grows, so the search terminates.  If neither side has
    a neighbor the graph is disconnected and None is returned.
    """
    g = as_directed(g)
    if g.n == 1:
        return 1
    nodes = frozenset(g.nodes)
    L1: NodeSet = frozenset({1})
    F1: NodeSet = frozenset({1})
    L2: NodeSet = frozenset({2})
    F2: NodeSet = frozenset({2})
    while True:
        nb2 = neighbors(g, L2)
        if nb2:
            m = min(nb2)
        else:
            nb1 = neighbors(g, L1)
            if not nb1:
                return None  # (L1, L2) witnesses disconnection
            m = min(nb1)
            L1, F1, L2, F2 = L2, F2, L1, F1  # mirror: pierce side 1 instead
        # m sends an arc into L2, so m reaches everything L2 reaches
        if m in F1:
            if F1 | F2 == nodes:
                return min(L1)
            F1 = F1 | F2
            fresh = min(nodes - F1)
            L2 = F2 = frozenset({fresh})
        elif m not in F2:
            L2 = frozenset({m})
            F2 = F2 | {m}
        else:  # m in F2 - L2
            L2 = L2 | {m}


# ---------------------------------------------------------------------------
# Connectivity across time


def union_across(schedule, interval: IntervalSpec) -> DirectedGraph:
    """Union of the schedule's arc sets over an interval of times.

    Weights are dropped; the result is an unweighted graph on the
    schedule's nodes.  Unbounded intervals are answered exactly for
    periodic and eventually-constant schedules; other schedules raise
    UnsupportedQueryError because an infinite union cannot be scanned.
    """
    first = schedule.first_time
    if interval.start < first:
        raise ValueError(
            f"interval {interval} starts before the schedule's first time {first}"
        )
    a = interval.start
    period = getattr(schedule, "period", None)
    constant_from = getattr(schedule, "constant_from", None)
    if interval.bounded:
        b = interval.end
        if period is not None:
            b = min(b, a + period - 1)
        elif constant_from is not None:
            b = min(b, max(a, constant_from))
        times = range(a, b + 1)
    elif period is not None:
        times = range(a, a + period)
    elif constant_from is not None:
        times = range(a, max(a, constant_from) + 1)
    else:
        closed_form = getattr(schedule, "tail_union", None)
        tail = closed_form(a) if callable(closed_form) else None
        if tail is not None:
            return as_directed(tail)
        raise UnsupportedQueryError(
            f"cannot take the arc union over unbounded {interval}: the schedule "
            "is neither periodic nor eventually constant and has no closed-form "
            "tail union"
        )
    arcs: set[Arc] = set()
    for t in times:
        arcs |= as_directed(schedule.graph_at(t)).arcs
    return DirectedGraph(schedule.n, arcs)


def is_weakly_connected_across(schedule, interval: IntervalSpec) -> bool:
    """True when the arc union over the interval is weakly connected."""
    return is_weakly_connected(union_across(schedule, interval))


# ---------------------------------------------------------------------------
# Relabeling (used by symmetry tests and demos)


def relabel(
    g: "DirectedGraph | WeightedDigraph", perm: Sequence[int]
) -> "DirectedGraph | WeightedDigraph":
    """Apply the node relabeling k -> perm[k-1].  perm must permute 1..n."""
    n = as_directed(g).n
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"perm must be a permutation of 1..{n}, got {list(perm)}")
    if isinstance(g, WeightedDigraph):
        base = DirectedGraph(n, {(perm[k - 1], perm[l - 1]) for k, l in g.arcs})
        weights = {(perm[k - 1], perm[l - 1]): w for (k, l), w in g.weights.items()}
        return WeightedDigraph(base, weights, g.bounds)
    return DirectedGraph(n, {(perm[k - 1], perm[l - 1]) for k, l in g.arcs})


# ---------------------------------------------------------------------------
# Text format
#
#   # comment
#   n=4
#   arc 2 1 0.5
#   arc 1 2 1
#   arc 3 2 5
#
# Weights are optional but all-or-none.  Unweighted files parse to a
# DirectedGraph, weighted files to a WeightedDigraph.

_N_LINE = re.compile(r"^n\s*=\s*(\d+)$")


def parse_graph_text(
    text: str, bounds: Optional[tuple[float, float]] = None
) -> "DirectedGraph | WeightedDigraph":
    """Parse the graph text format.  Raises GraphFormatError with a line number."""
    n: Optional[int] = None
    arcs: dict[Arc, Optional[float]] = {}
    weighted: Optional[bool] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _N_LINE.match(line)
            if not m:
                raise GraphFormatError(lineno, f"expected 'n=<count>' first, got {raw.strip()!r}")
            n = int(m.group(1))
            if n < 1:
                raise GraphFormatError(lineno, f"node count must be at least 1, got {n}")
            continue
        fields = line.split()
        if fields[0] != "arc" or len(fields) not in (3, 4):
            raise GraphFormatError(
                lineno, f"expected 'arc <from> <to> [<weight>]', got {raw.strip()!r}"
            )
        try:
            k, l = int(fields[1]), int(fields[2])
        except ValueError:
            raise GraphFormatError(lineno, f"arc endpoints must be integers: {raw.strip()!r}")
        if k == l:
            raise GraphFormatError(lineno, f"self-loop ({k}, {l}) is not allowed")
        if not (1 <= k <= n and 1 <= l <= n):
            raise GraphFormatError(lineno, f"arc ({k}, {l}) outside node range 1..{n}")
        if (k, l) in arcs:
            raise GraphFormatError(lineno, f"duplicate arc ({k}, {l})")
        if len(fields) == 4:
            try:
                w = float(fields[3])
            except ValueError:
                raise GraphFormatError(lineno, f"bad weight {fields[3]!r}")
            if not w > 0.0:
                raise GraphFormatError(lineno, f"weight must be positive, got {fields[3]}")
            if weighted is False:
                raise GraphFormatError(lineno, "mixed weighted and unweighted arcs")
            weighted = True
            arcs[(k, l)] = w
        else:
            if weighted is True:
                raise GraphFormatError(lineno, "mixed weighted and unweighted arcs")
            weighted = False
            arcs[(k, l)] = None
    if n is None:
        raise GraphFormatError(1, "empty input: expected 'n=<count>'")
    base = DirectedGraph(n, arcs.keys())
    if weighted:
        return WeightedDigraph(base, {a: w for a, w in arcs.items()}, bounds)
    return base


def format_graph_text(g: "DirectedGraph | WeightedDigraph") -> str:
    """Render a graph in the text format (round-trips through the parser)."""
    lines = [f"n={as_directed(g).n}"]
    if isinstance(g, WeightedDigraph):
        for (k, l), w in sorted(g.weights.items()):
            lines.append(f"arc {k} {l} {w!r}")
    else:
        for k, l in sorted(g.arcs):
            lines.append(f"arc {k} {l}")
    return "\n".join(lines) + "\n"


def read_graph_file(
    path, bounds: Optional[tuple[float, float]] = None
) -> "DirectedGraph | WeightedDigraph":
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read(), bounds)
