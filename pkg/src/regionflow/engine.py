"""Sequential and parallel sweep drivers.

Each region lives in a page holding its region network: interior labels and
excesses, intra-region residual capacities and the discharge backend state.
Everything regions share sits in small shared tables: labels and excesses
of boundary vertices and residual capacities of inter-region arcs.  A page
is refreshed from the shared tables when it is loaded and its boundary
flows are written back after its discharge.  In-memory and streaming runs
go through the same code, so they produce identical results.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .ard import ard_discharge
from .labeling import (BoundaryGraph, LabelHistogram, Labeling, boundary_relabel,
                       bfs_distance, check_valid, lift_interior, region_relabel,
                       true_region_distance)
from .network import CutResult, Network, extract_cut, init
from .pager import Pager, RegionPage
from .partition import Partition, build_region_network
from .prd import prd_discharge


class SweepBoundExceeded(RuntimeError):
    pass


@dataclass
class SolverConfig:
    variant: str = "ard"  # "ard" | "prd"
    backend: str = "basic"  # ARD backend: "basic" | "forest"
    partial: bool = True  # ARD partial discharges (max_stage = sweep index)
    global_gap: bool = True
    region_gap: bool = True
    boundary_relabel: bool = True
    stream: bool = False
    tmpdir: str | None = None
    workers: int = 1  # threads for parallel sweeps
    check: bool = False  # validate the global state after every sweep
    max_extra_sweeps: int = 64
    on_sweep: Callable | None = None
    # replaces the built-in discharge: f(region network, sweep) -> DischargeResult
    discharge: Callable | None = None


@dataclass
class SweepRecord:
    sweep: int
    active_regions: int
    discharges: int
    skipped: int
    label_increase: int
    flow_value: int
    label_sum: int
    bytes_in: int
    bytes_out: int
    ms: float
    cpu_ms: float


@dataclass
class SweepStats:
    sweeps: int = 0
    extra_sweeps: int = 0
    bound: int = 0
    records: list[SweepRecord] = field(default_factory=list)
    bytes_in: int = 0
    bytes_out: int = 0
    max_resident: int = 0
    violations: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    canceled: int = 0  # boundary pushes undone by parallel fusion

    CSV_COLUMNS = ("sweep", "active_regions", "flow_value", "label_sum",
                   "bytes_in", "bytes_out", "ms")

    def write_csv(self, path_or_stream) -> None:
        own = isinstance(path_or_stream, str)
        fh = open(path_or_stream, "w", newline="") if own else path_or_stream
        try:
            w = csv.writer(fh)
            w.writerow(self.CSV_COLUMNS)
            for r in self.records:
                w.writerow([r.sweep, r.active_regions, r.flow_value, r.label_sum,
                            r.bytes_in, r.bytes_out, f"{r.ms:.3f}"])
        finally:
            if own:
                fh.close()


class Solver:
    def __init__(self, net: Network, part: Partition, config: SolverConfig | None = None,
                 parallel: bool = False):
        cfg = self.cfg = config or SolverConfig()
        if cfg.variant not in ("ard", "prd"):
            raise ValueError(f"unknown variant {cfg.variant!r}")
        if parallel and cfg.stream:
            raise ValueError("parallel sweeps need every region resident; streaming is sequential")
        self.parallel = parallel
        self.original = net
        g, _ = init(net)
        self.g = g
        self.part = part.attach(g)
        self.ard = cfg.variant == "ard"
        self.dinf = part.dinf_ard if self.ard else g.n
        self.bset = set(part.boundary)
        self.label_b = {w: 0 for w in part.boundary}
        self.excess_b = {w: g.excess[w] for w in part.boundary}
        self.cap_inter = {a: g.cap[a] for a in part.inter_arcs}
        self.flow_value = g.flow_value
        self.gap_events: list[int] = []
        nonterm = g.n - 2
        self.hist_all = LabelHistogram(self.dinf, [0] * nonterm)
        self.gap_hist = (LabelHistogram(self.dinf, [0] * len(part.boundary))
                         if self.ard else self.hist_all)
        self.pager = Pager(cfg.stream, cfg.tmpdir)
        self.stats = SweepStats()
        B = len(part.boundary)
        if self.ard:
            self.stats.bound = 2 * B * B + 1 + (self.dinf if cfg.partial else 0)
        else:
            self.stats.bound = 2 * g.n * g.n
        zero = [0] * g.n
        self.own_b: list[list[int]] = []
        self.out_inter: list[list[int]] = []
        self.top: list[int] = []
        for k in range(part.K):
            rn = build_region_network(g, part, k, zero, cfg.variant, self.dinf)
            self.own_b.append([v for v in range(rn.r) if rn.gid[v] in self.bset])
            self.out_inter.append([a for a in range(len(rn.tail))
                                   if rn.inter[a] and rn.tail[a] < rn.r])
            self.top.append(self._top(rn))
            self.pager.store(RegionPage(rn))
        self._base: dict[int, tuple[dict[int, int], dict[int, int]]] = {}
        self._gap_hit: set[int] = set()

    # ----- page refresh and write-back -------------------------------------

    def _top(self, rn) -> int:
        """Lowest label of an active region vertex (d_inf if none)."""
        best = self.dinf
        for v in range(rn.r):
            if rn.excess[v] > 0 and rn.label[v] < best:
                best = rn.label[v]
        return best

    def region_active(self, k: int) -> bool:
        if self.top[k] < self.dinf:
            return True
        rn_gid = self.part.members[k]
        return any(self.excess_b[w] > 0 and self.label_b[w] < self.dinf
                   for w in rn_gid if w in self.bset)

    def _prepare(self, page: RegionPage, labels_b, excess_b, cap_inter) -> list[int]:
        """Bring a loaded page up to date; returns interior labels as counted
        in the histograms."""
        rn = page.rn
        k, r, dinf = rn.region, rn.r, self.dinf
        label, gid = rn.label, rn.gid
        gapped = False
        for g in self.gap_events[page.gap_epoch:]:
            for v in range(r):
                if g < label[v] < dinf:
                    label[v] = dinf
                    gapped = True
        page.gap_epoch = len(self.gap_events)
        if gapped:
            self._gap_hit.add(k)
        for v in self.own_b[k]:
            label[v] = labels_b[gid[v]]
            rn.excess[v] = excess_b[gid[v]]
        counted = label[:r]
        for i in range(r, r + rn.b):
            label[i] = labels_b[gid[i]]
            rn.excess[i] = 0
        rn.excess[rn.t] = 0
        base_cap = {}
        stamps = rn.prd_cur_label
        for a in self.out_inter[k]:
            c = cap_inter[rn.garc[a]]
            if c > rn.cap[a] and stamps:
                # a push from the neighbor reopened this arc behind the current arc
                stamps[rn.tail[a]] = -1
            rn.cap[a] = c
            base_cap[a] = c
        base_ex = {v: rn.excess[v] for v in self.own_b[k]}
        self._base[k] = (base_cap, base_ex)
        if self.ard and self.cfg.boundary_relabel:
            label[:] = lift_interior(rn, label)
        return counted

    def _discharge(self, page: RegionPage, sweep: int):
        rn = page.rn
        if self.cfg.discharge is not None:
            return self.cfg.discharge(rn, sweep)
        if self.ard:
            ms = sweep if self.cfg.partial else None
            return ard_discharge(rn, ms, backend=self.cfg.backend)
        relabel = page.fresh or rn.region in self._gap_hit
        self._gap_hit.discard(rn.region)
        return prd_discharge(rn, region_gap=self.cfg.region_gap, relabel_first=relabel)

    def _relabel_hist(self, old: int, new: int, boundary: bool) -> None:
        self.hist_all.move(old, new)
        if self.ard and boundary:
            self.gap_hist.move(old, new)

    def _commit(self, page: RegionPage, counted: list[int]) -> int:
        """Write back boundary flows, labels and sink flow; returns label increase."""
        rn = page.rn
        k = rn.region
        base_cap, base_ex = self._base.pop(k)
        for a in self.out_inter[k]:
            x = base_cap[a] - rn.cap[a]
            if x:
                ga = rn.garc[a]
                self.cap_inter[ga] -= x
                self.cap_inter[ga ^ 1] += x
        for i in range(rn.r, rn.r + rn.b):
            if rn.excess[i]:
                self.excess_b[rn.gid[i]] += rn.excess[i]
                rn.excess[i] = 0
        own = set(self.own_b[k])
        for v in own:
            w = rn.gid[v]
            self.excess_b[w] += rn.excess[v] - base_ex[v]
            self.label_b[w] = rn.label[v]
        self.flow_value += rn.excess[rn.t]
        rn.excess[rn.t] = 0
        inc = 0
        for v in range(rn.r):
            if counted[v] != rn.label[v]:
                inc += rn.label[v] - counted[v]
                self._relabel_hist(counted[v], rn.label[v], v in own)
        self.top[k] = self._top(rn)
        page.fresh = False
        return inc

    # ----- heuristics at the sweep level ------------------------------------

    def _global_gap(self) -> None:
        if not self.cfg.global_gap:
            return
        g = self.gap_hist.find_gap()
        if g is None:
            return
        self.gap_events.append(g)
        for w, lw in self.label_b.items():
            if g < lw < self.dinf:
                self.label_b[w] = self.dinf
        self.hist_all.raise_above(g)
        if self.ard:
            self.gap_hist.raise_above(g)
        for k in range(self.part.K):
            if self.top[k] > g:
                self.top[k] = self.dinf

    def _boundary_relabel(self) -> int:
        if not (self.ard and self.cfg.boundary_relabel) or not self.label_b:
            return 0
        g = self.g
        arcs = [(g.tail[a], g.head[a], self.cap_inter[a]) for a in self.part.inter_arcs]
        bg = BoundaryGraph(self.part.boundary, self.part.region_of, arcs)
        new = boundary_relabel(bg, self.label_b, self.dinf)
        inc = 0
        for w, lw in new.items():
            old = self.label_b[w]
            if lw != old:
                inc += lw - old
                self._relabel_hist(old, lw, True)
                self.label_b[w] = lw
        return inc

    # ----- sweeps -------------------------------------------------------------

    def _sweep_sequential(self, sweep: int) -> tuple[int, int, int, int]:
        done = skipped = inc = 0
        active = 0
        for k in range(self.part.K):
            if not self.region_active(k):
                skipped += 1
                continue
            active += 1
            page = self.pager.load(k)
            counted = self._prepare(page, self.label_b, self.excess_b, self.cap_inter)
            self._discharge(page, sweep)
            inc += self._commit(page, counted)
            self.pager.save(page)
            done += 1
            self._global_gap()
        return active, done, skipped, inc

    def _sweep_parallel(self, sweep: int) -> tuple[int, int, int, int]:
        ks = [k for k in range(self.part.K) if self.region_active(k)]
        skipped = self.part.K - len(ks)
        snap_l, snap_e, snap_c = dict(self.label_b), dict(self.excess_b), dict(self.cap_inter)
        pages, counted = {}, {}
        for k in ks:
            pages[k] = self.pager.load(k)
            counted[k] = self._prepare(pages[k], snap_l, snap_e, snap_c)

        def run(k):
            return self._discharge(pages[k], sweep)

        if self.cfg.workers > 1 and len(ks) > 1:
            with ThreadPoolExecutor(self.cfg.workers) as ex:
                list(ex.map(run, ks))
        else:
            for k in ks:
                run(k)
        # fused labels: discharged regions report their own vertices
        fused = dict(snap_l)
        for k in ks:
            rn = pages[k].rn
            for v in self.own_b[k]:
                fused[rn.gid[v]] = rn.label[v]
        for k in ks:
            self._cancel_invalid(pages[k], fused)
        inc = 0
        for k in ks:
            inc += self._commit(pages[k], counted[k])
            self.pager.save(pages[k])
        self._global_gap()
        return len(ks), len(ks), skipped, inc

    def _cancel_invalid(self, page: RegionPage, fused: dict[int, int]) -> None:
        """Undo boundary pushes u->v whose fused labels violate d'(v) <= d'(u)+1."""
        rn = page.rn
        base_cap = self._base[rn.region][0]
        for a in self.out_inter[rn.region]:
            x = base_cap[a] - rn.cap[a]
            if x <= 0:
                continue
            u, v = rn.tail[a], rn.head[a]
            if fused[rn.gid[v]] <= fused[rn.gid[u]] + 1:
                continue
            rn.cap[a] += x
            rn.cap[a ^ 1] -= x
            rn.excess[u] += x
            rn.excess[v] -= x
            self.stats.canceled += 1
            if rn.prd_cur_label:
                rn.prd_cur_label[u] = -1

    def _extra_sweep(self) -> bool:
        changed = False
        for k in range(self.part.K):
            page = self.pager.load(k)
            counted = self._prepare(page, self.label_b, self.excess_b, self.cap_inter)
            rn = page.rn
            exact = region_relabel(rn, self.cfg.variant)
            for v in range(rn.r):
                if exact[v] > rn.label[v]:
                    rn.label[v] = exact[v]
            before = list(rn.label[:rn.r])
            if self._commit(page, counted) or before != counted:
                changed = True
            self.pager.save(page)
            self._global_gap()
        if self._boundary_relabel():
            changed = True
        return changed

    def any_active(self) -> bool:
        return any(self.region_active(k) for k in range(self.part.K))

    def run(self) -> tuple[CutResult, SweepStats]:
        st = self.stats
        sweep = 0
        try:
            while self.any_active():
                sweep += 1
                if sweep > st.bound:
                    raise SweepBoundExceeded(
                        f"{self.cfg.variant} needed more than {st.bound} sweeps")
                t0, c0 = time.perf_counter(), time.process_time()
                b_in, b_out = self.pager.bytes_in, self.pager.bytes_out
                if self.parallel:
                    active, done, skipped, inc = self._sweep_parallel(sweep)
                else:
                    active, done, skipped, inc = self._sweep_sequential(sweep)
                inc += self._boundary_relabel()
                rec = SweepRecord(sweep, active, done, skipped, inc, self.flow_value,
                                  self.label_sum(), self.pager.bytes_in - b_in,
                                  self.pager.bytes_out - b_out,
                                  1000 * (time.perf_counter() - t0),
                                  1000 * (time.process_time() - c0))
                st.records.append(rec)
                if self.cfg.check:
                    self.check_state(f"sweep {sweep}")
                if self.cfg.on_sweep is not None:
                    self.cfg.on_sweep(self, rec)
            st.sweeps = sweep
            while st.extra_sweeps < self.cfg.max_extra_sweeps and self._extra_sweep():
                st.extra_sweeps += 1
            if st.extra_sweeps > 4:
                st.flags.append(f"labels needed {st.extra_sweeps} extra sweeps to settle")
            resid, labels = self.assemble()
            cut = extract_cut(resid, self.original)
            self._check_cut_labels(cut, labels)
        finally:
            st.bytes_in, st.bytes_out = self.pager.bytes_in, self.pager.bytes_out
            st.max_resident = self.pager.max_resident
            self.pager.close()
        return cut, st

    def label_sum(self) -> int:
        return sum(i * c for i, c in enumerate(self.hist_all.counts))

    # ----- global views --------------------------------------------------------

    def assemble(self) -> tuple[Network, list[int]]:
        """Global residual network and labeling, loading every page once."""
        g = self.g
        net = g.copy()
        net.flow_value = self.flow_value
        labels = [0] * g.n
        labels[g.s] = self.dinf
        for k in range(self.part.K):
            page = self.pager.load(k)
            counted = self._prepare(page, self.label_b, self.excess_b, self.cap_inter)
            rn = page.rn
            for a in range(0, len(rn.tail), 2):
                if not rn.inter[a]:
                    net.cap[rn.garc[a]] = rn.cap[a]
                    net.cap[rn.garc[a] + 1] = rn.cap[a + 1]
            for v in range(rn.r):
                net.excess[rn.gid[v]] = rn.excess[v]
                labels[rn.gid[v]] = rn.label[v]
            fresh = page.fresh
            self._commit(page, counted)
            page.fresh = fresh
            self.pager.save(page)
        for a, c in self.cap_inter.items():
            net.cap[a] = c
        for w, e in self.excess_b.items():
            net.excess[w] = e
        return net, labels

    def check_state(self, where: str) -> None:
        net, labels = self.assemble()
        lab = Labeling(labels, self.dinf, self.cfg.variant)
        bad = check_valid(net, lab, self.part)
        if bad is not None:
            self.stats.violations.append(f"{where}: invalid labeling at arc {bad}")
        true = (true_region_distance(net, self.part) if self.ard else bfs_distance(net))
        for v in net.nonterminals():
            if labels[v] > true[v]:
                self.stats.violations.append(
                    f"{where}: label {labels[v]} of {v} exceeds distance {true[v]}")
                break
        for v in net.nonterminals():
            if net.excess[v] < 0:
                self.stats.violations.append(f"{where}: negative excess at {v}")
                break
        if any(c < 0 for c in net.cap):
            self.stats.violations.append(f"{where}: negative residual capacity")

    def _check_cut_labels(self, cut: CutResult, labels: list[int]) -> None:
        """Vertices labeled d_inf can not reach t, so they belong to the source side."""
        if self.ard and not self.part.boundary:
            return
        for v, lv in enumerate(labels):
            if lv >= self.dinf and not cut.side[v]:
                self.stats.violations.append(f"vertex {v} labeled d_inf on the sink side")
                break


def run_sequential(net: Network, part: Partition, variant: str = "ard",
                   config: SolverConfig | None = None) -> tuple[CutResult, SweepStats]:
    cfg = config or SolverConfig()
    cfg.variant = variant
    return Solver(net, part, cfg).run()


def run_parallel(net: Network, part: Partition, variant: str = "ard",
                 config: SolverConfig | None = None) -> tuple[CutResult, SweepStats]:
    cfg = config or SolverConfig()
    cfg.variant = variant
    return Solver(net, part, cfg, parallel=True).run()
