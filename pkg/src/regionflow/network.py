"""Flow network model: arc-pair storage, preflows, residual updates and cuts.

Arcs are stored in pairs: arc ``a`` and its reverse ``a ^ 1``.  The capacity
array always holds *residual* capacities of the current network; a preflow
applied to the network is folded into those capacities and into the excess
array, so a network is always "the residual network with zero flow".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

INT64_MAX = 2**63 - 1


class FlowError(Exception):
    """Base class for solver errors."""


class ArcNotFound(FlowError, KeyError):
    pass


class PreflowViolation(FlowError):
    pass


class NotOptimal(FlowError):
    pass


class CostMismatch(FlowError):
    pass


class CapacityOverflow(FlowError, OverflowError):
    pass


def _checked(value: int) -> int:
    if value > INT64_MAX or value < -INT64_MAX:
        raise CapacityOverflow(f"value {value} does not fit into 64 bits")
    return value


@dataclass
class Network:
    n: int
    s: int
    t: int
    tail: list[int] = field(default_factory=list)
    head: list[int] = field(default_factory=list)
    cap: list[int] = field(default_factory=list)
    excess: list[int] = field(default_factory=list)
    flow_value: int = 0

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError("source and sink must differ")
        if not self.excess:
            self.excess = [0] * self.n
        self._out: list[list[int]] | None = None

    @property
    def m(self) -> int:
        return len(self.head)

    def add_arc(self, u: int, v: int, cap: int, rev_cap: int = 0) -> int:
        """Add the pair (u,v),(v,u) and return the id of the forward arc."""
        if cap < 0 or rev_cap < 0:
            raise ValueError("capacities must be nonnegative")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"arc ({u},{v}) outside vertex range")
        a = len(self.head)
        self.tail += [u, v]
        self.head += [v, u]
        self.cap += [_checked(cap), _checked(rev_cap)]
        if self._out is not None:
            self._out[u].append(a)
            self._out[v].append(a + 1)
        return a

    def out_arcs(self, v: int) -> list[int]:
        if self._out is None:
            out: list[list[int]] = [[] for _ in range(self.n)]
            for a, u in enumerate(self.tail):
                out[u].append(a)
            self._out = out
        return self._out[v]

    def find_arc(self, u: int, v: int) -> int:
        for a in self.out_arcs(u):
            if self.head[a] == v:
                return a
        raise ArcNotFound((u, v))

    def nonterminals(self) -> list[int]:
        return [v for v in range(self.n) if v != self.s and v != self.t]

    def copy(self) -> "Network":
        net = Network(self.n, self.s, self.t, list(self.tail), list(self.head),
                      list(self.cap), list(self.excess), self.flow_value)
        return net

    def total_excess(self) -> int:
        return sum(e for v, e in enumerate(self.excess) if v != self.s and v != self.t)


class Preflow(dict):
    """Sparse antisymmetric arc flow: ``f[a] == -f[a ^ 1]``; missing arcs carry 0."""

    def __missing__(self, a):
        return 0

    def push(self, a: int, delta: int) -> None:
        self[a] = self[a] + delta
        self[a ^ 1] = self[a ^ 1] - delta

    @classmethod
    def from_capacities(cls, before: list[int], after: list[int],
                        arc_ids: Iterable[int] | None = None) -> "Preflow":
        """Flow that turns residual capacities ``before`` into ``after``."""
        f = cls()
        arcs = range(0, len(before), 2) if arc_ids is None else arc_ids
        for a in arcs:
            d = before[a] - after[a]
            if d:
                f[a] = d
                f[a ^ 1] = -d
        return f


@dataclass
class Violation:
    kind: str  # "capacity" | "antisymmetry" | "preflow"
    where: int | tuple[int, int]
    detail: str = ""


@dataclass
class CutResult:
    side: list[bool]  # True: source side
    cut_cost: int
    flow_value: int

    def source_set(self) -> list[int]:
        return [v for v, x in enumerate(self.side) if x]


def residual_capacity(net: Network, flow: Preflow, u: int, v: int,
                      arc: int | None = None) -> int:
    """c(u,v) - f(u,v); ``arc`` selects a specific parallel arc instance."""
    if arc is None:
        arc = net.find_arc(u, v)
    elif net.tail[arc] != u or net.head[arc] != v:
        raise ArcNotFound((u, v))
    return net.cap[arc] - flow[arc]


def init(net: Network):
    """Saturate every arc leaving the source and fold it into excess.

    Returns the residual network and the all-zero labeling with d(s) = n.
    """
    from .labeling import Labeling

    g = net.copy()
    for a in g.out_arcs(g.s):
        c = g.cap[a]
        if c <= 0:
            continue
        v = g.head[a]
        g.cap[a] = 0
        g.cap[a ^ 1] = _checked(g.cap[a ^ 1] + c)
        if v == g.t:
            g.flow_value = _checked(g.flow_value + c)
        elif v != g.s:
            g.excess[v] = _checked(g.excess[v] + c)
    lab = Labeling.zeros(g.n, dinf=g.n, metric="prd")
    lab.d[g.s] = g.n
    return g, lab


def verify_preflow(net: Network, flow: Preflow) -> Violation | None:
    """First violated constraint of ``flow`` in ``net``, or None."""
    for a in sorted(flow):
        if flow[a] != -flow.get(a ^ 1, 0):
            return Violation("antisymmetry", a, f"f={flow[a]}, f(rev)={flow.get(a ^ 1, 0)}")
    for a in sorted(flow):
        if flow[a] > net.cap[a]:
            return Violation("capacity", a, f"f={flow[a]} > c={net.cap[a]}")
    inflow = [0] * net.n
    for a, x in flow.items():
        inflow[net.head[a]] += x
    for v in range(net.n):
        if v == net.s or v == net.t:
            continue
        if net.excess[v] + inflow[v] < 0:
            return Violation("preflow", v, f"e_f={net.excess[v] + inflow[v]}")
    return None


def flow_value(net: Network, flow: Preflow) -> int:
    return sum(x for a, x in flow.items() if net.head[a] == net.t)


def apply_flow(net: Network, flow: Preflow) -> Network:
    """Residual network of ``net`` w.r.t. ``flow``; the flow value accumulates."""
    bad = verify_preflow(net, flow)
    if bad is not None:
        raise PreflowViolation(f"{bad.kind} violation at {bad.where}: {bad.detail}")
    g = net.copy()
    for a, x in flow.items():
        if not x:
            continue
        g.cap[a] -= x
        v = g.head[a]
        if v == g.t:
            g.flow_value = _checked(g.flow_value + x)
        elif v != g.s:
            g.excess[v] = _checked(g.excess[v] + x)
    return g


def reaches_sink(net: Network) -> list[bool]:
    """Vertices with a positive-residual path to t."""
    into: list[list[int]] = [[] for _ in range(net.n)]
    for a, c in enumerate(net.cap):
        if c > 0:
            into[net.head[a]].append(net.tail[a])
    seen = [False] * net.n
    seen[net.t] = True
    q = deque([net.t])
    while q:
        v = q.popleft()
        for u in into[v]:
            if not seen[u]:
                seen[u] = True
                q.append(u)
    return seen


def cut_cost(original: Network, side: list[bool]) -> int:
    """Cost of the cut given by ``side`` (True = source side) in ``original``."""
    cost = 0
    for a in range(original.m):
        if side[original.tail[a]] and not side[original.head[a]]:
            cost += original.cap[a]
    for v in range(original.n):
        if not side[v] and v != original.t and v != original.s:
            cost += original.excess[v]
    return cost


def extract_cut(net: Network, original: Network) -> CutResult:
    """Minimum cut (V\\T, T) of a residual network holding a maximum preflow."""
    to_t = reaches_sink(net)
    for v in range(net.n):
        if v != net.s and v != net.t and net.excess[v] > 0 and to_t[v]:
            raise NotOptimal(f"vertex {v} carries excess {net.excess[v]} and reaches the sink")
    side = [not x for x in to_t]
    side[net.s] = True
    cost = cut_cost(original, side)
    if cost != net.flow_value:
        raise CostMismatch(f"cut cost {cost} != flow value {net.flow_value}")
    return CutResult(side, cost, net.flow_value)
