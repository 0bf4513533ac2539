"""Discharge results and the structural property checker shared by PRD and ARD."""

from __future__ import annotations

from dataclasses import dataclass, field

from .partition import RegionNetwork


@dataclass
class DischargeResult:
    flow: list[int]  # per local arc, antisymmetric
    labels: list[int]
    old_labels: list[int]
    sink_flow: int = 0
    # (start, end, amount, local arcs) per augmented path, when recorded
    paths: list[tuple[int, int, int, list[int]]] | None = None
    pushes: int = 0
    relabels: int = 0

    def boundary_flow(self, rn: RegionNetwork) -> list[tuple[int, int]]:
        """(local arc, amount) for positive flow from the region into B^R."""
        out = []
        r, b = rn.r, rn.b
        for a, x in enumerate(self.flow):
            if x > 0 and r <= rn.head[a] < r + b:
                out.append((a, x))
        return out


def snapshot(rn: RegionNetwork):
    return list(rn.cap), list(rn.label), rn.excess[rn.t]


def finish(rn: RegionNetwork, cap0: list[int], labels0: list[int], sink0: int,
           **kw) -> DischargeResult:
    flow = [c0 - c for c0, c in zip(cap0, rn.cap)]
    return DischargeResult(flow, list(rn.label), labels0,
                           rn.excess[rn.t] - sink0, **kw)


@dataclass
class PropertyReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        self.failures.append(msg)


def valid_in_region(rn: RegionNetwork, labels: list[int], metric: str) -> str | None:
    """First violated validity inequality in the residual region network."""
    if labels[rn.t] != 0:
        return "d(t) != 0"
    for a, c in enumerate(rn.cap):
        if c <= 0:
            continue
        u, v = rn.tail[a], rn.head[a]
        if u == rn.s:
            continue
        slack = 1 if (metric == "prd" or rn.inter[a]) else 0
        if labels[u] > labels[v] + slack:
            return f"arc {rn.gid[u]}->{rn.gid[v]}: d={labels[u]} > {labels[v]}+{slack}"
    return None


def check_discharge(rn: RegionNetwork, res: DischargeResult, metric: str,
                    full: bool = True) -> PropertyReport:
    """Verify optimality, monotony, validity and flow direction of (f', d', d).

    ``rn`` must hold the post-discharge residual state.  ``full=False``
    skips optimality (partial ARD discharges).
    """
    rep = PropertyReport()
    d, d1 = res.old_labels, res.labels
    r, b, dinf = rn.r, rn.b, rn.dinf
    if full:
        for v in range(r):
            if rn.excess[v] > 0 and d1[v] < dinf:
                rep.fail(f"optimality: vertex {rn.gid[v]} active (e={rn.excess[v]}, d={d1[v]})")
                break
    for v in range(r):
        if d1[v] < d[v]:
            rep.fail(f"monotony: d'({rn.gid[v]})={d1[v]} < d={d[v]}")
            break
    for w in range(r, r + b):
        if d1[w] != d[w]:
            rep.fail(f"monotony: boundary label of {rn.gid[w]} changed")
            break
    msg = valid_in_region(rn, d1, metric)
    if msg:
        rep.fail("validity: " + msg)
    if metric == "prd":
        for a, x in enumerate(res.flow):
            if x > 0 and not d1[rn.tail[a]] > d[rn.head[a]]:
                rep.fail(f"flow direction on {rn.gid[rn.tail[a]]}->{rn.gid[rn.head[a]]}")
                break
    else:
        if res.paths is None:
            rep.fail("flow direction: no path decomposition recorded")
            return rep
        total = [0] * len(res.flow)
        for start, end, amount, arcs in res.paths:
            if start >= r or not (end == rn.t or r <= end < r + b):
                rep.fail(f"flow direction: path {start}->{end} has wrong endpoints")
                break
            if end != rn.t and not d1[start] > d[end]:
                rep.fail(f"flow direction: path from {rn.gid[start]} (d'={d1[start]}) "
                         f"to {rn.gid[end]} (d={d[end]})")
                break
            for a in arcs:
                total[a] += amount
                total[a ^ 1] -= amount
        if total != res.flow:
            rep.fail("flow direction: path flows do not sum to the discharge flow")
    return rep
