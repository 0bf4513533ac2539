"""Fixed vertex partitions and region networks.

A region network for region R holds the vertices R, its boundary B^R and the
two terminals.  Local vertex ids are: region vertices ``0..r-1`` (ascending
global id), boundary vertices ``r..r+b-1`` (ascending global id), then the
source and the sink.  Local arcs keep the global pairing (local ``2i`` maps to
a global forward arc, ``2i+1`` to its reverse).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Sequence

from .network import Network


class ShapeMismatch(ValueError):
    pass


@dataclass
class Partition:
    region_of: list[int]  # -1 for the terminals
    K: int
    members: list[list[int]] = field(default_factory=list)
    region_boundary: list[list[int]] = field(default_factory=list)
    boundary: list[int] = field(default_factory=list)
    inter_arcs: list[int] = field(default_factory=list)
    _attached: int | None = None

    def __post_init__(self):
        if not self.members:
            self.members = [[] for _ in range(self.K)]
            for v, k in enumerate(self.region_of):
                if k >= 0:
                    self.members[k].append(v)

    def attach(self, net: Network) -> "Partition":
        """Derive B^R, the global boundary and the inter-region arc set."""
        if len(self.region_of) != net.n:
            raise ShapeMismatch(f"partition covers {len(self.region_of)} vertices, network has {net.n}")
        for v in (net.s, net.t):
            if self.region_of[v] != -1:
                raise ShapeMismatch("terminals must not be assigned to a region")
        if self._attached == id(net):
            return self
        rb: list[set[int]] = [set() for _ in range(self.K)]
        inter = []
        ro = self.region_of
        for a in range(net.m):
            u, w = net.tail[a], net.head[a]
            ku, kw = ro[u], ro[w]
            if ku >= 0 and kw >= 0 and ku != kw:
                rb[ku].add(w)
                inter.append(a)
        self.region_boundary = [sorted(x) for x in rb]
        self.boundary = sorted(set().union(*rb)) if rb else []
        self.inter_arcs = inter
        self._attached = id(net)
        return self

    @property
    def dinf_ard(self) -> int:
        # a single region has no boundary; 1 keeps label 0 finite
        return max(len(self.boundary), 1)

    def is_inter(self, u: int, v: int) -> bool:
        ku, kv = self.region_of[u], self.region_of[v]
        return ku >= 0 and kv >= 0 and ku != kv

    def describe(self) -> list[str]:
        """Sidecar text: one line per region, ``k: a-b c-d ...`` id ranges."""
        lines = []
        for k, mem in enumerate(self.members):
            ranges = []
            for v in mem:
                if ranges and ranges[-1][1] == v - 1:
                    ranges[-1][1] = v
                else:
                    ranges.append([v, v])
            body = " ".join(f"{a}-{b}" if a != b else f"{a}" for a, b in ranges)
            lines.append(f"{k}: {body}".rstrip())
        return lines

    @classmethod
    def from_sidecar(cls, lines: Sequence[str], n: int) -> "Partition":
        region_of = [-1] * n
        K = 0
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            head, _, body = line.partition(":")
            k = int(head)
            K = max(K, k + 1)
            for tok in body.split():
                a, _, b = tok.partition("-")
                for v in range(int(a), int(b or a) + 1):
                    region_of[v] = k
        return cls(region_of, K)


def _terminal_layout(count: int, net: Network | None):
    if net is None:
        ids = list(range(count))
        return ids, count + 2
    ids = net.nonterminals()
    if len(ids) != count:
        raise ShapeMismatch(f"expected {count} non-terminal vertices, network has {len(ids)}")
    return ids, net.n


def partition_grid(dims: Sequence[int], slices: Sequence[int],
                   net: Network | None = None) -> Partition:
    """Axis-aligned blocks; the first dimension varies fastest in vertex order.

    Without ``net`` the grid occupies ids ``0..N-1`` and the terminals are
    ``N`` (source) and ``N+1`` (sink), the generator layout.
    """
    if len(dims) != len(slices):
        raise ShapeMismatch("dims and slices differ in length")
    count = 1
    for d, s in zip(dims, slices):
        if s < 1 or s > d:
            raise ShapeMismatch(f"cannot slice dimension {d} into {s} parts")
        count *= d
    ids, n = _terminal_layout(count, net)
    region_of = [-1] * n
    K = 1
    for s in slices:
        K *= s
    for i, v in enumerate(ids):
        rem, k, radix = i, 0, 1
        for d, s in zip(dims, slices):
            c = rem % d
            rem //= d
            k += (c * s // d) * radix
            radix *= s
        region_of[v] = k
    return Partition(region_of, K)


def partition_by_id(n: int, K: int, net: Network | None = None) -> Partition:
    """Contiguous blocks of ceil(n/K) non-terminal vertices."""
    if K < 1:
        raise ValueError("K must be positive")
    ids, total = _terminal_layout(n, net)
    size = max(1, ceil(n / K))
    region_of = [-1] * total
    for i, v in enumerate(ids):
        region_of[v] = i // size
    return Partition(region_of, K)


@dataclass
class RegionNetwork:
    region: int
    r: int
    b: int
    gid: list[int]
    tail: list[int]
    head: list[int]
    cap: list[int]
    garc: list[int]
    excess: list[int]
    label: list[int]
    dinf: int
    metric: str
    inter: list[bool] = field(default_factory=list)  # per local arc: crosses regions
    out: list[list[int]] = field(default_factory=list)
    # backend state kept across discharges (paged with the region)
    forest_mark: list[int] = field(default_factory=list)
    forest_parent: list[int] = field(default_factory=list)
    # PRD current arcs, valid while the label equals the recorded one
    prd_cur: list[int] = field(default_factory=list)
    prd_cur_label: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.out:
            self.out = [[] for _ in range(self.nv)]
            for a, u in enumerate(self.tail):
                self.out[u].append(a)

    @property
    def nv(self) -> int:
        return self.r + self.b + 2

    @property
    def s(self) -> int:
        return self.r + self.b

    @property
    def t(self) -> int:
        return self.r + self.b + 1

    def is_inner(self, v: int) -> bool:
        return v < self.r

    def is_bnd(self, v: int) -> bool:
        return self.r <= v < self.r + self.b

    def active(self, v: int) -> bool:
        return v < self.r and self.excess[v] > 0 and self.label[v] < self.dinf

    def has_active(self) -> bool:
        return any(self.excess[v] > 0 and self.label[v] < self.dinf for v in range(self.r))

    def local_of(self) -> dict[int, int]:
        return {g: i for i, g in enumerate(self.gid)}


def build_region_network(net: Network, part: Partition, k: int,
                         labels: Sequence[int] | None = None,
                         metric: str = "prd", dinf: int | None = None,
                         zero_incoming: bool = True) -> RegionNetwork:
    """Region network of region ``k``; incoming boundary arcs get capacity 0.

    ``zero_incoming=False`` keeps the (B^R, R) capacities, which the
    reduction pre-pass needs.
    """
    part.attach(net)
    R = part.members[k]
    BR = part.region_boundary[k]
    gid = list(R) + list(BR) + [net.s, net.t]
    loc = {g: i for i, g in enumerate(gid)}
    r, b = len(R), len(BR)
    ro = part.region_of
    pairs = set()
    for u in R:
        for a in net.out_arcs(u):
            pairs.add(a & ~1)
    if dinf is None:
        dinf = net.n if metric == "prd" else part.dinf_ard
    tail, head, cap, garc, inter = [], [], [], [], []
    for p in sorted(pairs):
        u, v = net.tail[p], net.head[p]
        lu, lv = loc.get(u), loc.get(v)
        if lu is None or lv is None:
            continue
        if lu >= r and lv >= r:
            continue  # (B^R,B^R) and terminal-terminal pairs
        c_f, c_b = net.cap[p], net.cap[p + 1]
        if zero_incoming:
            if r <= lu < r + b:
                c_f = 0
            if r <= lv < r + b:
                c_b = 0
        x = ro[u] >= 0 and ro[v] >= 0 and ro[u] != ro[v]
        tail += [lu, lv]
        head += [lv, lu]
        cap += [c_f, c_b]
        garc += [p, p + 1]
        inter += [x, x]
    excess = [net.excess[g] for g in R] + [0] * (b + 2)
    if labels is None:
        label = [0] * (r + b) + [dinf, 0]
    else:
        label = [labels[g] for g in gid[:r + b]] + [dinf, 0]
    return RegionNetwork(k, r, b, gid, tail, head, cap, garc, excess, label,
                         dinf, metric, inter)
