"""Region reduction: decide cut sides of region vertices from one region flow.

A region vertex reachable from the source after the region flow is on the
source side of every minimum cut (strong source); one that reaches the sink
is on the sink side of every minimum cut (strong sink).  A vertex that can
reach neither the sink nor the boundary may be put on the source side
(weak source); one that neither the source nor the boundary reaches may be
put on the sink side (weak sink).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .ard import augment
from .network import Network, Preflow, init
from .oracle import oracle_mincut_sets
from .partition import Partition, RegionNetwork, build_region_network

STRONG_SOURCE = "strong-source"
STRONG_SINK = "strong-sink"
WEAK_SOURCE = "weak-source"
WEAK_SINK = "weak-sink"


@dataclass
class NodeClass:
    flags: dict[int, set[str]] = field(default_factory=dict)  # global id -> flags

    def of(self, v: int) -> set[str]:
        return self.flags.get(v, set())

    def with_flag(self, flag: str) -> list[int]:
        return sorted(v for v, f in self.flags.items() if flag in f)

    def decided(self) -> list[int]:
        """Vertices whose side in the sink-maximal cut is known."""
        return sorted(v for v, f in self.flags.items() if f & {STRONG_SINK, WEAK_SOURCE})

    def decided_fraction(self) -> float:
        return len(self.decided()) / len(self.flags) if self.flags else 0.0

    def merge(self, other: "NodeClass") -> None:
        for v, f in other.flags.items():
            self.flags.setdefault(v, set()).update(f)


def _reach(rn: RegionNetwork, starts, forward: bool) -> list[bool]:
    """Residual reachability from ``starts`` (forward) or to ``starts`` (backward)."""
    seen = [False] * rn.nv
    q = deque()
    for x in starts:
        if not seen[x]:
            seen[x] = True
            q.append(x)
    cap, head, out = rn.cap, rn.head, rn.out
    while q:
        v = q.popleft()
        for a in out[v]:
            u = head[a]
            c = cap[a] if forward else cap[a ^ 1]
            if c > 0 and not seen[u]:
                seen[u] = True
                q.append(u)
    return seen


def _from_source(rn: RegionNetwork) -> list[bool]:
    # s reaches v iff an excess vertex reaches v (source arcs are folded into excess)
    starts = [v for v in range(rn.r) if rn.excess[v] > 0] + [rn.s]
    return _reach(rn, starts, True)


def region_reduce(rn: RegionNetwork) -> tuple[NodeClass, Preflow, dict]:
    """Classify the region vertices; ``rn`` must keep boundary-to-region capacities.

    Returns the classes, the source-side flow (global arc ids) that is valid
    in the full network, and the boundary split ``{"BS": [...], "BT": [...]}``.
    """
    r, b = rn.r, rn.b
    cap_before = list(rn.cap)
    R = range(r)
    boundary = range(r, r + b)
    # Augment(s, t)
    augment(rn, R, [rn.t], via_boundary=True)
    src = _from_source(rn)
    to_t = _reach(rn, [rn.t], False)
    BS = [w for w in boundary if src[w]]
    BT = [w for w in boundary if to_t[w]]
    # Augment(s, B^S): excess of region vertices to the source boundary set
    if BS:
        augment(rn, R, BS, via_boundary=True)
    flow = Preflow()
    for a in range(0, len(rn.cap), 2):
        d = cap_before[a] - rn.cap[a]
        if d:
            flow[rn.garc[a]] = d
            flow[rn.garc[a] + 1] = -d
    # Augment(B^T, t) with unlimited boundary supply; classification only
    if BT:
        big = sum(rn.cap) + 1
        augment(rn, BT, [rn.t], via_boundary=True, supply=big)
    src = _from_source(rn)
    to_t = _reach(rn, [rn.t], False)
    to_b = _reach(rn, list(boundary), False)
    from_b = _reach(rn, list(boundary), True)
    cls = NodeClass()
    for v in R:
        f: set[str] = set()
        if src[v]:
            f.add(STRONG_SOURCE)
        if to_t[v]:
            f.add(STRONG_SINK)
        if not f:
            if not to_b[v]:
                f.add(WEAK_SOURCE)
            if not from_b[v]:
                f.add(WEAK_SINK)
        cls.flags[rn.gid[v]] = f
    assert not (set(BS) & set(BT))
    split = {"BS": [rn.gid[w] for w in BS], "BT": [rn.gid[w] for w in BT]}
    rn.cap[:] = cap_before
    return cls, flow, split


def verify_classification(net: Network, cls: NodeClass) -> str | None:
    """None if every flag agrees with the oracle's canonical cuts, else a counterexample."""
    if not cls.flags:
        return None
    lo, hi = oracle_mincut_sets(net)
    for v in sorted(cls.flags):
        f = cls.flags[v]
        if STRONG_SOURCE in f and STRONG_SINK in f:
            return f"vertex {v} is both strong source and strong sink"
        if STRONG_SOURCE in f and not lo[v]:
            return f"vertex {v} flagged strong source but not in the minimal source set"
        if STRONG_SINK in f and hi[v]:
            return f"vertex {v} flagged strong sink but in the maximal source set"
        if WEAK_SOURCE in f and not hi[v]:
            return f"vertex {v} flagged weak source but not in the maximal source set"
        if WEAK_SINK in f and lo[v]:
            return f"vertex {v} flagged weak sink but in the minimal source set"
    return None


def _apply(g: Network, flow: Preflow) -> None:
    for a, x in flow.items():
        if x > 0:
            g.cap[a] -= x
            g.cap[a ^ 1] += x
            u, v = g.tail[a], g.head[a]
            g.excess[u] -= x
            if v == g.t:
                g.flow_value += x
            else:
                g.excess[v] += x


@dataclass
class ReducedInstance:
    net: Network  # decided vertices isolated, ids unchanged
    offset: int  # cut cost contributed by the decided part
    classes: NodeClass
    residual: Network  # residual network after all region flows
    per_region: list[NodeClass]


def reduce_network(net: Network, part: Partition) -> ReducedInstance:
    """Run region reduction over all regions and contract strong vertices.

    Regions are processed in ascending id on the residual network left by
    the previous ones, so the combined region flows form one valid preflow.
    The minimum cut cost of ``net`` equals ``offset`` plus that of the
    reduced network.
    """
    g, _ = init(net)
    part.attach(g)
    classes = NodeClass()
    per_region = []
    for k in range(part.K):
        rn = build_region_network(g, part, k, metric="ard", zero_incoming=False)
        cls, flow, _ = region_reduce(rn)
        _apply(g, flow)
        classes.merge(cls)
        per_region.append(cls)
    side = {}
    for v, f in classes.flags.items():
        if STRONG_SOURCE in f:
            side[v] = True
        elif STRONG_SINK in f:
            side[v] = False
    side[g.s], side[g.t] = True, False
    red = Network(g.n, g.s, g.t)
    offset = g.flow_value
    for a in range(0, g.m, 2):
        for e in (a, a + 1):
            c = g.cap[e]
            if c <= 0:
                continue
            u, v = g.tail[e], g.head[e]
            su, sv = side.get(u), side.get(v)
            if su is False or sv is True:
                continue  # never crosses from source side to sink side
            if su is True and sv is False:
                offset += c
            elif su is True:
                red.excess[v] += c
            elif sv is False:
                red.add_arc(u, red.t, c)
            else:
                red.add_arc(u, v, c)
    for v in g.nonterminals():
        e = g.excess[v]
        if side.get(v) is False:
            offset += e
        elif side.get(v) is None:
            red.excess[v] += e
    return ReducedInstance(red, offset, classes, g, per_region)
