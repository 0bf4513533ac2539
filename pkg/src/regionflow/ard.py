"""Augmenting-path region discharge.

Stage ``k`` pushes excess of the region to ``T_k = {t} + {w in B^R : d(w) < k}``.
Two backends share one interface: ``basic`` runs a multi-source Dinic per
stage, ``forest`` keeps one search tree per boundary label (plus the sink
tree) across discharges and repairs it with orphan adoption.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .discharge import DischargeResult, finish, snapshot
from .labeling import region_relabel
from .partition import RegionNetwork

FREE = -2
SINK_TREE = -1


class ForestInconsistency(AssertionError):
    pass


@dataclass
class StageTargets:
    """Nested target sets of one region network."""
    rn: RegionNetwork

    def members(self, k: int) -> set[int]:
        rn = self.rn
        return {rn.t} | {w for w in range(rn.r, rn.r + rn.b) if rn.label[w] < k}

    def stages(self, max_stage: int) -> list[int]:
        """Stage indices at which the target set grows (always includes 0)."""
        rn = self.rn
        ks = {0}
        for w in range(rn.r, rn.r + rn.b):
            k = rn.label[w] + 1
            if k <= max_stage and rn.label[w] < rn.dinf:
                ks.add(k)
        return sorted(ks)


def augment(rn: RegionNetwork, X, Y, paths: list | None = None, *,
            via_boundary: bool = False, supply: int | None = None) -> int:
    """Push excess of ``X`` (region vertices) to ``Y`` along residual paths.

    Paths only pass through region vertices, or also through boundary
    vertices with ``via_boundary``.  With ``supply`` every source instead
    offers that many units and excesses are left untouched (used for
    reachability bookkeeping only).  Returns the amount moved; on return no
    vertex of ``X`` with excess reaches ``Y``.
    """
    r = rn.r
    inner = rn.r + rn.b if via_boundary else r
    cap, head, tail, out = rn.cap, rn.head, rn.tail, rn.out
    is_target = [False] * rn.nv
    for y in Y:
        is_target[y] = True
    sources = sorted(x for x in X if x < inner and not is_target[x])
    if supply is None:
        excess = rn.excess
    else:
        excess = [0] * rn.nv
        for x in sources:
            excess[x] = supply
    INF = rn.nv + 1
    moved = 0
    while True:
        if not any(excess[x] > 0 for x in sources):
            return moved
        # backward BFS levels over region vertices
        dist = [INF] * rn.nv
        q = deque()
        for y in range(rn.nv):
            if is_target[y]:
                dist[y] = 0
                q.append(y)
        while q:
            v = q.popleft()
            dv = dist[v] + 1
            for a in out[v]:
                u = head[a]
                if u < inner and dist[u] == INF and cap[a ^ 1] > 0:
                    dist[u] = dv
                    q.append(u)
        if all(dist[x] == INF or excess[x] <= 0 for x in sources):
            return moved
        cur = [0] * rn.nv
        for x in sources:
            while excess[x] > 0 and dist[x] < INF:
                path: list[int] = []
                v = x
                while not is_target[v]:
                    arcs = out[v]
                    i = cur[v]
                    dv = dist[v] - 1
                    while i < len(arcs):
                        a = arcs[i]
                        if cap[a] > 0 and dist[head[a]] == dv:
                            break
                        i += 1
                    cur[v] = i
                    if i < len(arcs):
                        path.append(arcs[i])
                        v = head[arcs[i]]
                        continue
                    dist[v] = INF  # dead end
                    if not path:
                        break
                    v = tail[path.pop()]
                    cur[v] += 1
                if not is_target[v]:
                    break
                delta = excess[x]
                for a in path:
                    if cap[a] < delta:
                        delta = cap[a]
                for a in path:
                    cap[a] -= delta
                    cap[a ^ 1] += delta
                if supply is None:
                    excess[x] -= delta
                    excess[v] += delta
                else:
                    excess[x] -= delta
                moved += delta
                if paths is not None:
                    paths.append((x, v, delta, path))


def ard_discharge(rn: RegionNetwork, max_stage: int | None = None, *,
                  backend: str = "basic", record: bool = False) -> DischargeResult:
    """Stages ``0..max_stage`` then exact region labels (ARD metric)."""
    if max_stage is None or max_stage > rn.dinf:
        max_stage = rn.dinf
    if max_stage < 0:
        raise ValueError("max_stage must be nonnegative")
    cap0, lab0, sink0 = snapshot(rn)
    paths = [] if record else None
    if backend == "forest":
        forest_discharge(rn, max_stage, paths)
    elif backend == "basic":
        st = StageTargets(rn)
        R = range(rn.r)
        for k in st.stages(max_stage):
            if not any(rn.excess[v] > 0 for v in R):
                break
            augment(rn, R, st.members(k), paths)
        rn.label[:] = region_relabel(rn, "ard")
    else:
        raise ValueError(f"unknown ARD backend {backend!r}")
    return finish(rn, cap0, lab0, sink0, paths=paths)


class SearchForest:
    """Search trees toward the sink (mark -1) and toward each boundary label.

    ``mark[v]`` of a region vertex is the label of the tree root it hangs
    from, so its ARD label is ``mark + 1``; ``parent[v]`` is the local arc to
    its tree parent.  State lives in the region network so it is paged with
    the region.
    """

    def __init__(self, rn: RegionNetwork):
        self.rn = rn
        r = rn.r
        if len(rn.forest_mark) != r:
            rn.forest_mark = [FREE] * r
            rn.forest_parent = [-1] * r
        self.mark = rn.forest_mark
        self.parent = rn.forest_parent
        self.stamp = [0] * r
        self.clock = 0

    def is_root(self, x: int, L: int) -> bool:
        rn = self.rn
        if L == SINK_TREE:
            return x == rn.t
        return rn.r <= x < rn.r + rn.b and rn.label[x] == L

    def validate(self) -> int:
        """Free every vertex whose chain to its root broke; returns the count."""
        rn = self.rn
        r, mark, parent, cap, head, label = rn.r, self.mark, self.parent, rn.cap, rn.head, rn.label
        state = [0] * r  # 0 unknown, 1 valid, 2 invalid, 3 on stack
        freed = 0
        for v0 in range(r):
            if state[v0]:
                continue
            chain = []
            v = v0
            ok = False
            while True:
                if state[v] == 1:
                    ok = True
                    break
                if state[v] in (2, 3):
                    break
                L = mark[v]
                a = parent[v]
                if L == FREE or a < 0 or label[v] != L + 1 or cap[a] <= 0:
                    chain.append(v)
                    break
                state[v] = 3
                chain.append(v)
                x = head[a]
                if x >= r:
                    ok = self.is_root(x, L)
                    break
                if mark[x] != L:
                    break
                v = x
            for y in chain:
                state[y] = 1 if ok else 2
        for v in range(r):
            if state[v] == 2 and mark[v] != FREE:
                mark[v] = FREE
                parent[v] = -1
                freed += 1
        return freed

    def _rooted(self, x: int, L: int) -> bool:
        """Whether region vertex ``x`` of tree ``L`` still hangs from a root."""
        rn, mark, parent, head = self.rn, self.mark, self.parent, self.rn.head
        walk = []
        ok = False
        y = x
        while True:
            if self.stamp[y] == self.clock:
                ok = True
                break
            a = parent[y]
            if a < 0 or mark[y] != L:
                break
            walk.append(y)
            z = head[a]
            if z >= rn.r:
                ok = self.is_root(z, L)
                break
            y = z
        if ok:
            for y in walk:
                self.stamp[y] = self.clock
        return ok

    def grow(self, L: int, queue: deque, found: deque) -> None:
        """Extend tree ``L`` backward from the open vertices in ``queue``."""
        rn = self.rn
        r, mark, parent, cap, head, out, excess = (rn.r, self.mark, self.parent,
                                                   rn.cap, rn.head, rn.out, rn.excess)
        while queue:
            x = queue.popleft()
            if x < r and mark[x] != L:
                continue
            for a in out[x]:
                u = head[a]
                if u >= r or cap[a ^ 1] <= 0:
                    continue
                mu = mark[u]
                if mu == L or (mu != FREE and mu < L):
                    continue
                if mu != FREE:
                    raise ForestInconsistency(
                        f"tree {L} reached vertex {rn.gid[u]} marked {mu}")
                mark[u] = L
                parent[u] = a ^ 1
                queue.append(u)
                if excess[u] > 0:
                    found.append(u)

    def augment_from(self, u: int, L: int, paths) -> list[int]:
        """Push the excess of ``u`` to its root; returns new orphans."""
        rn = self.rn
        cap, head, parent = rn.cap, rn.head, self.parent
        chain = []
        x = u
        while x < rn.r:
            a = parent[x]
            chain.append(a)
            x = head[a]
        delta = rn.excess[u]
        for a in chain:
            if cap[a] < delta:
                delta = cap[a]
        orphans = []
        for a in chain:
            cap[a] -= delta
            cap[a ^ 1] += delta
            if cap[a] == 0:
                orphans.append(rn.tail[a])
        rn.excess[u] -= delta
        rn.excess[x] += delta
        if paths is not None:
            paths.append((u, x, delta, chain))
        return orphans

    def adopt(self, orphans: list[int], L: int, reopen: deque) -> None:
        rn = self.rn
        r, mark, parent, cap, head, out = rn.r, self.mark, self.parent, rn.cap, rn.head, rn.out
        q = deque(orphans)
        for v in orphans:
            parent[v] = -1
        self.clock += 1
        while q:
            v = q.popleft()
            if mark[v] != L or parent[v] >= 0:
                continue
            best = -1
            for a in out[v]:
                if cap[a] <= 0:
                    continue
                x = head[a]
                if x >= r:
                    if self.is_root(x, L):
                        best = a
                        break
                elif mark[x] == L and self._rooted(x, L):
                    if best < 0 or x < head[best]:
                        best = a
            if best >= 0:
                parent[v] = best
                self.stamp[v] = self.clock
                continue
            for a in out[v]:
                x = head[a]
                if x < r and mark[x] == L:
                    if parent[x] == (a ^ 1):
                        parent[x] = -1
                        q.append(x)
                    if cap[a] > 0:
                        reopen.append(x)
                elif x >= r and cap[a] > 0 and self.is_root(x, L):
                    reopen.append(x)
            mark[v] = FREE

    def labels(self) -> list[int]:
        rn = self.rn
        return [rn.dinf if m == FREE else m + 1 for m in self.mark]


def forest_grow_augment(forest: SearchForest, rn: RegionNetwork, L: int,
                        augment_on: bool, paths=None) -> int:
    """Grow tree ``L`` (root label ``L``, -1 for the sink tree) and drain its excess."""
    r = rn.r
    queue = deque()
    if L == SINK_TREE:
        queue.append(rn.t)
    else:
        queue.extend(w for w in range(r, r + rn.b) if rn.label[w] == L)
    found = deque()
    for v in range(r):
        if forest.mark[v] == L:
            queue.append(v)
            if rn.excess[v] > 0:
                found.append(v)
    moved = 0
    forest.grow(L, queue, found)
    if not augment_on:
        return 0
    while found:
        u = found.popleft()
        while rn.excess[u] > 0 and forest.mark[u] == L:
            before = rn.excess[u]
            orphans = forest.augment_from(u, L, paths)
            moved += before - rn.excess[u]
            if orphans:
                reopen = deque()
                forest.adopt(orphans, L, reopen)
                forest.grow(L, reopen, found)
    return moved


def forest_discharge(rn: RegionNetwork, max_stage: int, paths=None) -> None:
    forest = SearchForest(rn)
    forest.validate()
    trees = [SINK_TREE] + sorted({rn.label[w] for w in range(rn.r, rn.r + rn.b)
                                  if rn.label[w] < rn.dinf})
    for L in trees:
        forest_grow_augment(forest, rn, L, L + 1 <= max_stage, paths)
    lab = forest.labels()
    rn.label[:rn.r] = lab
