"""Reference max-flow (Dinic) used only to check the region solvers.

This module shares no code with the discharge implementations.  Excess at a
vertex is modeled as an extra source arc ``s -> v`` with capacity equal to
the excess.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .network import Network, Preflow

MAX_VERTICES = 10_000
MAX_ARCS = 100_000


class OracleTooLarge(ValueError):
    pass


@dataclass
class OracleResult:
    value: int
    flow: Preflow
    min_source: list[bool]  # vertices reachable from s in the final residual
    max_source: list[bool]  # vertices that cannot reach t


def _guard(net: Network, limit_v: int, limit_a: int) -> None:
    if net.n > limit_v or net.m > limit_a:
        raise OracleTooLarge(f"{net.n} vertices / {net.m} arcs exceed the oracle limit "
                             f"({limit_v} / {limit_a})")


def _solve(net: Network, limit_v=MAX_VERTICES, limit_a=MAX_ARCS) -> OracleResult:
    _guard(net, limit_v, limit_a)
    n, s, t = net.n, net.s, net.t
    head = list(net.head)
    cap = list(net.cap)
    for v in range(n):
        e = net.excess[v]
        if v not in (s, t) and e > 0:
            head += [v, s]
            cap += [e, 0]
    adj = [[] for _ in range(n)]
    for a in range(len(head)):
        tail = head[a ^ 1]
        adj[tail].append(a)
    orig = list(cap)
    value = 0
    while True:
        level = [-1] * n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for a in adj[u]:
                v = head[a]
                if cap[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        if level[t] < 0:
            break
        it = [0] * n
        while True:
            # iterative blocking-flow DFS
            stack = []
            u = s
            found = False
            while True:
                if u == t:
                    found = True
                    break
                while it[u] < len(adj[u]):
                    a = adj[u][it[u]]
                    v = head[a]
                    if cap[a] > 0 and level[v] == level[u] + 1:
                        break
                    it[u] += 1
                if it[u] == len(adj[u]):
                    level[u] = -1
                    if not stack:
                        break
                    a = stack.pop()
                    u = head[a ^ 1]
                    it[u] += 1
                    continue
                a = adj[u][it[u]]
                stack.append(a)
                u = head[a]
            if not found:
                break
            delta = min(cap[a] for a in stack)
            for a in stack:
                cap[a] -= delta
                cap[a ^ 1] += delta
            value += delta
    flow = Preflow()
    for a in range(0, net.m, 2):
        d = orig[a] - cap[a]
        if d:
            flow[a] = d
            flow[a + 1] = -d
    # value counts flow leaving s; flow already at t from the source arcs is included
    min_src = [False] * n
    min_src[s] = True
    q = deque([s])
    while q:
        u = q.popleft()
        for a in adj[u]:
            v = head[a]
            if cap[a] > 0 and not min_src[v]:
                min_src[v] = True
                q.append(v)
    reach_t = [False] * n
    reach_t[t] = True
    q = deque([t])
    while q:
        v = q.popleft()
        for a in adj[v]:
            # arc a leaves v; its reverse a^1 enters v from head[a]
            u = head[a]
            if cap[a ^ 1] > 0 and not reach_t[u]:
                reach_t[u] = True
                q.append(u)
    max_src = [not x for x in reach_t]
    return OracleResult(value, flow, min_src, max_src)


def _cost(net: Network, side: list[bool]) -> int:
    c = 0
    for a in range(net.m):
        if side[net.tail[a]] and not side[net.head[a]]:
            c += net.cap[a]
    for v in range(net.n):
        if v not in (net.s, net.t) and not side[v]:
            c += net.excess[v]
    return c


def oracle_maxflow(net: Network, **limits) -> tuple[int, Preflow]:
    """Maximum preflow value (including any flow already recorded in ``net``)."""
    res = _solve(net, **limits)
    return res.value + net.flow_value, res.flow


def oracle_mincut_sets(net: Network, **limits) -> tuple[list[bool], list[bool]]:
    """Minimal and maximal source sets over all minimum cuts."""
    res = _solve(net, **limits)
    total = res.value + net.flow_value
    for side in (res.min_source, res.max_source):
        c = _cost(net, side) + net.flow_value
        if c != total:
            raise AssertionError(f"oracle cut cost {c} != flow {total}")
    return res.min_source, res.max_source


def oracle_reach(net: Network, X, Y) -> bool:
    """Whether some vertex of ``X`` reaches ``Y`` over positive residual arcs."""
    Y = set(Y)
    seen = set(X)
    if seen & Y:
        return True
    q = deque(seen)
    out = [[] for _ in range(net.n)]
    for a in range(net.m):
        if net.cap[a] > 0:
            out[net.tail[a]].append(net.head[a])
    while q:
        u = q.popleft()
        for v in out[u]:
            if v not in seen:
                if v in Y:
                    return True
                seen.add(v)
                q.append(v)
    return False
