"""Push-relabel region discharge with a highest-label core solver.

Labels of a region can reach ``n`` while a region only has ``|V^R|``
vertices, so buckets live in a doubly-linked list of occupied label values
instead of an array indexed by label.
"""

from __future__ import annotations

from .discharge import DischargeResult, finish, snapshot
from .labeling import region_relabel
from .partition import RegionNetwork


class NotApplicable(ValueError):
    pass


class _Bucket:
    __slots__ = ("label", "prev", "next", "active", "inactive", "seeds")

    def __init__(self, label):
        self.label = label
        self.prev = self.next = None
        self.active: dict[int, None] = {}
        self.inactive: dict[int, None] = {}
        self.seeds = 0

    def empty(self) -> bool:
        return not self.active and not self.inactive and not self.seeds


class BucketList:
    """Occupied labels in ascending order, each with active/inactive vertex sets."""

    def __init__(self):
        self.low: _Bucket | None = None
        self.high: _Bucket | None = None
        self.hi_active: _Bucket | None = None
        self.by_label: dict[int, _Bucket] = {}

    def _bucket(self, label: int, hint: _Bucket | None = None) -> _Bucket:
        b = self.by_label.get(label)
        if b is not None:
            return b
        b = _Bucket(label)
        self.by_label[label] = b
        # find the predecessor, walking from the hint when it is below
        p = hint if hint is not None and hint.label < label and hint.label in self.by_label \
            and self.by_label[hint.label] is hint else None
        if p is None:
            if self.high is not None and self.high.label < label:
                p = self.high
            else:
                p = None
                q = self.low
                while q is not None and q.label < label:
                    p, q = q, q.next
        else:
            while p.next is not None and p.next.label < label:
                p = p.next
        b.prev = p
        b.next = p.next if p is not None else self.low
        if b.prev is None:
            self.low = b
        else:
            b.prev.next = b
        if b.next is None:
            self.high = b
        else:
            b.next.prev = b
        return b

    def _unlink(self, b: _Bucket) -> None:
        if b.prev is None:
            self.low = b.next
        else:
            b.prev.next = b.next
        if b.next is None:
            self.high = b.prev
        else:
            b.next.prev = b.prev
        if self.hi_active is b:
            self.hi_active = b.prev
        del self.by_label[b.label]

    def add_seed(self, label: int) -> None:
        self._bucket(label).seeds += 1

    def add(self, v: int, label: int, active: bool, hint: _Bucket | None = None) -> None:
        b = self._bucket(label, hint)
        if active:
            b.active[v] = None
            if self.hi_active is None or self.hi_active.label < label:
                self.hi_active = b
        else:
            b.inactive[v] = None

    def remove(self, v: int, label: int) -> tuple[bool, _Bucket | None]:
        """Remove ``v``; returns (bucket became empty, predecessor bucket)."""
        b = self.by_label[label]
        b.active.pop(v, None)
        b.inactive.pop(v, None)
        prev = b.prev
        if b.empty():
            self._unlink(b)
            return True, prev
        return False, b

    def activate(self, v: int, label: int) -> None:
        b = self.by_label[label]
        b.inactive.pop(v, None)
        b.active[v] = None
        if self.hi_active is None or self.hi_active.label < label:
            self.hi_active = b

    def deactivate(self, v: int, label: int) -> None:
        b = self.by_label[label]
        b.active.pop(v, None)
        b.inactive[v] = None

    def highest_active(self) -> int | None:
        b = self.hi_active
        while b is not None and not b.active:
            b = b.prev
        self.hi_active = b
        if b is None:
            return None
        return next(reversed(b.active))

    def labels(self) -> list[int]:
        out, b = [], self.low
        while b is not None:
            out.append(b.label)
            b = b.next
        return out

    def check(self, rn: RegionNetwork) -> None:
        """Debug consistency check against the region labels."""
        seen = set()
        b, last = self.low, -1
        while b is not None:
            assert b.label > last and not b.empty()
            last = b.label
            for v in list(b.active) + list(b.inactive):
                assert rn.label[v] == b.label, (v, rn.label[v], b.label)
                assert (v in b.active) == (rn.excess[v] > 0)
                seen.add(v)
            b = b.next
        want = {v for v in range(rn.r) if rn.label[v] < rn.dinf}
        assert seen == want


def push(rn: RegionNetwork, u: int, a: int) -> int:
    """Push along local arc ``a`` out of ``u``; returns the amount moved."""
    if rn.tail[a] != u:
        raise NotApplicable("arc does not leave u")
    v = rn.head[a]
    if not rn.active(u) or rn.cap[a] <= 0 or rn.label[u] != rn.label[v] + 1:
        raise NotApplicable(f"push {u}->{v} not applicable")
    delta = min(rn.excess[u], rn.cap[a])
    rn.cap[a] -= delta
    rn.cap[a ^ 1] += delta
    rn.excess[u] -= delta
    rn.excess[v] += delta
    return delta


def relabel(rn: RegionNetwork, u: int) -> int:
    """Set d(u) to one plus the lowest residual neighbor label (capped)."""
    if not rn.active(u):
        raise NotApplicable(f"vertex {u} is not active")
    best = rn.dinf
    for a in rn.out[u]:
        if rn.cap[a] > 0:
            lv = rn.label[rn.head[a]]
            if lv < rn.label[u]:
                raise NotApplicable(f"vertex {u} has an admissible arc")
            best = min(best, lv + 1)
    rn.label[u] = best
    return best


def prd_discharge(rn: RegionNetwork, *, region_gap: bool = True,
                  relabel_first: bool = False, debug: bool = False) -> DischargeResult:
    """Discharge every active region vertex, highest label first."""
    cap0, lab0, sink0 = snapshot(rn)
    r, b, dinf = rn.r, rn.b, rn.dinf
    label, excess, cap, head, out = rn.label, rn.excess, rn.cap, rn.head, rn.out
    if relabel_first:
        exact = region_relabel(rn, "prd")
        for v in range(r):
            if exact[v] > label[v]:
                label[v] = exact[v]
    bl = BucketList()
    for w in range(r, r + b):
        if label[w] < dinf:
            bl.add_seed(label[w])
    for v in range(r):
        if label[v] < dinf:
            bl.add(v, label[v], excess[v] > 0)
    if len(rn.prd_cur) != r:
        rn.prd_cur = [0] * r
        rn.prd_cur_label = [-1] * r
    cur, cur_label = rn.prd_cur, rn.prd_cur_label
    for v in range(r):
        if cur_label[v] != label[v]:
            cur[v] = 0
    pushes = relabels = 0
    while True:
        v = bl.highest_active()
        if v is None:
            break
        arcs = out[v]
        while True:
            dv = label[v]
            i = cur[v]
            na = len(arcs)
            while i < na:
                a = arcs[i]
                if cap[a] > 0:
                    u = head[a]
                    if label[u] == dv - 1:
                        ex = excess[v]
                        c = cap[a]
                        delta = ex if ex < c else c
                        cap[a] = c - delta
                        cap[a ^ 1] += delta
                        excess[v] = ex - delta
                        if u < r and excess[u] == 0 and label[u] < dinf:
                            bl.activate(u, label[u])
                        excess[u] += delta
                        pushes += 1
                        if ex == delta:
                            break
                i += 1
            cur[v] = i
            if excess[v] == 0:
                bl.deactivate(v, dv)
                break
            best = dinf
            for a in arcs:
                if cap[a] > 0:
                    lu = label[head[a]] + 1
                    if lu < best:
                        best = lu
            if debug and best <= dv:
                raise AssertionError(f"relabel of {rn.gid[v]} does not raise label {dv}")
            relabels += 1
            cur[v] = 0
            emptied, hint = bl.remove(v, dv)
            label[v] = best
            if best < dinf:
                bl.add(v, best, True, hint)
            if emptied and region_gap and 0 < dv < dinf:
                _apply_gap(bl, rn, dv, cur)
            if label[v] >= dinf:
                break
        if debug:
            bl.check(rn)
    for v in range(r):
        cur_label[v] = label[v]
    return finish(rn, cap0, lab0, sink0, pushes=pushes, relabels=relabels)


def _apply_gap(bl: BucketList, rn: RegionNetwork, g: int, cur: list[int]) -> None:
    """Bucket-level region gap: lift region vertices in (g, d_next)."""
    dinf = rn.dinf
    q = bl.low
    while q is not None and q.label <= g:
        q = q.next
    movers = []
    d_next = dinf
    while q is not None:
        if q.seeds:
            d_next = q.label
            break
        movers.append(q)
        q = q.next
    if not movers:
        return
    target = min(d_next + 1, dinf)
    label = rn.label
    for bk in movers:
        act, ina = list(bk.active), list(bk.inactive)
        bl._unlink(bk)
        for v in act + ina:
            cur[v] = 0
        for v in act:
            label[v] = target
            if target < dinf:
                bl.add(v, target, True)
        for v in ina:
            label[v] = target
            if target < dinf:
                bl.add(v, target, False)
