"""Distance labelings for both metrics and the label-improvement heuristics.

Two metrics are supported:

* ``prd``: plain distance to the sink, ``d_inf = n``; a labeling is valid if
  ``d(u) <= d(v) + 1`` on every positive-residual arc.
* ``ard``: region distance (number of inter-region arcs on a path to the
  sink), ``d_inf = |boundary|``; inter-region arcs allow ``d(u) <= d(v) + 1``,
  every other arc requires ``d(u) <= d(v)``.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .network import Network
from .partition import Partition, RegionNetwork


class PreconditionViolated(ValueError):
    pass


@dataclass
class Labeling:
    d: list[int]
    dinf: int
    metric: str = "prd"

    @classmethod
    def zeros(cls, n: int, dinf: int, metric: str = "prd") -> "Labeling":
        return cls([0] * n, dinf, metric)

    def copy(self) -> "Labeling":
        return Labeling(list(self.d), self.dinf, self.metric)

    def __getitem__(self, v):
        return self.d[v]


class LabelHistogram:
    """Counts per label value ``0..dinf`` over a tracked vertex set."""

    def __init__(self, dinf: int, labels: Iterable[int] = ()):
        self.dinf = dinf
        self.counts = [0] * (dinf + 1)
        self.total = 0
        for x in labels:
            self.add(x)

    def add(self, x: int) -> None:
        self.counts[x] += 1
        self.total += 1

    def remove(self, x: int) -> None:
        self.counts[x] -= 1
        self.total -= 1
        assert self.counts[x] >= 0

    def move(self, old: int, new: int) -> None:
        if old != new:
            self.counts[old] -= 1
            self.counts[new] += 1

    def find_gap(self) -> int | None:
        """Lowest empty label g > 0 with some finite label above it."""
        c = self.counts
        top = self.dinf - 1
        while top > 0 and c[top] == 0:
            top -= 1
        for g in range(1, top):
            if c[g] == 0:
                return g
        return None

    def raise_above(self, g: int) -> None:
        """Move every count in (g, dinf) to the dinf bin."""
        moved = sum(self.counts[g + 1:self.dinf])
        for x in range(g + 1, self.dinf):
            self.counts[x] = 0
        self.counts[self.dinf] += moved


def _arc_slack(metric: str, part: Partition | None, u: int, v: int, net: Network) -> int:
    if metric == "prd":
        return 1
    if part is not None and u not in (net.s, net.t) and v not in (net.s, net.t) \
            and part.is_inter(u, v):
        return 1
    return 0


def check_valid(net: Network, lab: Labeling, part: Partition | None = None):
    """None if ``lab`` is valid in ``net``, else the first violating arc ``(a, u, v)``."""
    d = lab.d
    if d[net.t] != 0:
        return (-1, net.t, net.t)
    for a in range(net.m):
        if net.cap[a] <= 0:
            continue
        u, v = net.tail[a], net.head[a]
        if u == net.s:
            continue  # d(s) is pinned to d_inf
        if d[u] > d[v] + _arc_slack(lab.metric, part, u, v, net):
            return (a, u, v)
    return None


def _reverse_residual(net: Network):
    into: list[list[int]] = [[] for _ in range(net.n)]
    for a, c in enumerate(net.cap):
        if c > 0:
            into[net.head[a]].append(a)
    return into


def bfs_distance(net: Network) -> list[int]:
    """Exact distance to the sink over positive-residual arcs; n if unreachable."""
    into = _reverse_residual(net)
    dist = [net.n] * net.n
    dist[net.t] = 0
    q = deque([net.t])
    while q:
        v = q.popleft()
        for a in into[v]:
            u = net.tail[a]
            if dist[u] == net.n:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def true_region_distance(net: Network, part: Partition) -> list[int]:
    """Minimal number of inter-region arcs on a residual path to t (0/1 BFS)."""
    part.attach(net)
    dinf = part.dinf_ard
    into = _reverse_residual(net)
    INF = float("inf")
    dist = [INF] * net.n
    dist[net.t] = 0
    dq = deque([net.t])
    while dq:
        v = dq.popleft()
        dv = dist[v]
        for a in into[v]:
            u = net.tail[a]
            w = 1 if part.is_inter(u, v) else 0
            if dv + w < dist[u]:
                dist[u] = dv + w
                if w:
                    dq.append(u)
                else:
                    dq.appendleft(u)
    return [dinf if x == INF else min(int(x), dinf) for x in dist]


def region_relabel(rn: RegionNetwork, variant: str | None = None,
                   labels: Sequence[int] | None = None) -> list[int]:
    """Exact labels of the region vertices given the boundary labels as seeds.

    Returns a full local label list; boundary, source and sink entries are
    copied unchanged.  ARD: ``min{k : u -> T_k}``; PRD: BFS distance where a
    boundary seed ``w`` starts at ``d(w)``.
    """
    variant = variant or rn.metric
    lab = list(rn.label if labels is None else labels)
    r, dinf = rn.r, rn.dinf
    new = lab[:]
    for u in range(r):
        new[u] = dinf
    step = 1 if variant == "prd" else 0
    # seeds sorted once: (level, vertex)
    seeds = sorted((lab[w] + (1 - step), w) for w in range(r, r + rn.b) if lab[w] < dinf)
    level_of = {rn.t: 0}
    buckets: dict[int, list[int]] = {0: [rn.t]}
    for lvl, w in seeds:
        buckets.setdefault(lvl, []).append(w)
    head, cap, tail, out = rn.head, rn.cap, rn.tail, rn.out
    done = [False] * rn.nv
    pending = sorted(buckets)
    i = 0
    while i < len(pending):
        lvl = pending[i]
        i += 1
        if lvl >= dinf:
            break
        q = deque(buckets.pop(lvl))
        nxt = []
        while q:
            v = q.popleft()
            if done[v]:
                continue
            done[v] = True
            for a in out[v]:
                b_ = a ^ 1  # arc (u, v)
                u = head[a]
                if u >= r or done[u] or cap[b_] <= 0 or new[u] <= lvl + step:
                    continue
                nl = lvl + step
                if nl >= dinf:
                    continue
                new[u] = nl
                if step:
                    nxt.append(u)
                else:
                    q.append(u)
        if nxt:
            lv = lvl + 1
            if lv in buckets:
                buckets[lv].extend(nxt)
            else:
                buckets[lv] = nxt
                # keep the pending levels ordered
                j = i
                while j < len(pending) and pending[j] < lv:
                    j += 1
                pending.insert(j, lv)
    return new


def global_gap(lab: Labeling, hist: LabelHistogram,
               vertices: Iterable[int] | None = None) -> Labeling:
    """Raise every label above an empty histogram bin to d_inf."""
    g = hist.find_gap()
    if g is None:
        return lab
    out = lab.copy()
    vs = range(len(out.d)) if vertices is None else vertices
    for v in vs:
        if g < out.d[v] < out.dinf:
            out.d[v] = out.dinf
    hist.raise_above(g)
    return out


def region_gap(rn: RegionNetwork, labels: list[int], g: int) -> list[int]:
    """Lift region labels strictly inside (g, next boundary label above g)."""
    if g <= 0:
        raise PreconditionViolated("gap label must be positive")
    r, b, dinf = rn.r, rn.b, rn.dinf
    for v in range(r + b):
        if labels[v] == g:
            raise PreconditionViolated(f"vertex {rn.gid[v]} has the gap label {g}")
    d_next = min((labels[w] for w in range(r, r + b) if labels[w] > g), default=dinf)
    target = min(d_next + 1, dinf)
    out = list(labels)
    for v in range(r):
        if g < out[v] < d_next:
            out[v] = target
    return out


@dataclass
class BoundaryGraph:
    """Shared boundary data: boundary vertices, their regions and labels,
    and the inter-region arcs with residual capacities."""
    vertices: list[int]
    region_of: dict[int, int] | Sequence[int]
    arcs: list[tuple[int, int, int]]  # (u, v, residual capacity)


def boundary_relabel(bg: BoundaryGraph, labels: dict[int, int] | Sequence[int],
                     dinf: int) -> dict[int, int]:
    """Lower bound from the condensed boundary graph, combined with max().

    Groups are (region, label) pairs.  Within a region consecutive labels are
    joined by zero-length arcs from the lower to the higher group; residual
    inter-region arcs have unit length.  Distances are measured to the label-0
    groups.
    """
    groups: dict[tuple[int, int], int] = {}
    gid_of: dict[int, int] = {}
    per_region: dict[int, set[int]] = {}
    for v in bg.vertices:
        lv = labels[v]
        if lv >= dinf:
            continue
        key = (bg.region_of[v], lv)
        if key not in groups:
            groups[key] = len(groups)
            per_region.setdefault(key[0], set()).add(lv)
        gid_of[v] = groups[key]
    # reverse adjacency: for an arc X -> Y of length w store (X, w) at Y
    radj: list[list[tuple[int, int]]] = [[] for _ in groups]
    for k, lbls in per_region.items():
        ls = sorted(lbls)
        for lo, hi in zip(ls, ls[1:]):
            radj[groups[(k, hi)]].append((groups[(k, lo)], 0))
    for u, v, c in bg.arcs:
        if c > 0 and u in gid_of and v in gid_of:
            radj[gid_of[v]].append((gid_of[u], 1))
    INF = dinf
    dist = [INF] * len(groups)
    heap = []
    for (k, lv), g in groups.items():
        if lv == 0:
            dist[g] = 0
            heap.append((0, g))
    heapq.heapify(heap)
    while heap:
        dg, g = heapq.heappop(heap)
        if dg > dist[g]:
            continue
        for x, w in radj[g]:
            nd = dg + w
            if nd < dist[x]:
                dist[x] = nd
                heapq.heappush(heap, (nd, x))
    out = {}
    for v in bg.vertices:
        lv = labels[v]
        if v in gid_of:
            out[v] = max(lv, min(dist[gid_of[v]], dinf))
        else:
            out[v] = lv
    return out


def lift_interior(rn: RegionNetwork, labels: list[int]) -> list[int]:
    """Restore region validity after boundary labels of region vertices rose.

    Every region vertex gets at least the largest label of a region vertex
    from which it is reachable inside the region (ARD metric only).
    """
    r = rn.r
    out = list(labels)
    order = sorted(range(r), key=lambda v: -out[v])
    seen = [False] * r
    head, cap, outa = rn.head, rn.cap, rn.out
    for src in order:
        if seen[src]:
            continue
        lvl = out[src]
        seen[src] = True
        stack = [src]
        while stack:
            v = stack.pop()
            for a in outa[v]:
                u = head[a]
                if u < r and not seen[u] and cap[a] > 0:
                    seen[u] = True
                    if out[u] < lvl:
                        out[u] = lvl
                    stack.append(u)
    return out
