import random

import pytest

from conftest import diamond, nx_maxflow, random_region_instance
from regionflow.ard import ard_discharge
from regionflow.engine import Solver, SolverConfig, run_parallel, run_sequential
from regionflow.generators import gen_grid
from regionflow.network import Network, init
from regionflow.oracle import oracle_maxflow
from regionflow.pager import PageCorrupted, RegionPage, pager_load, pager_save
from regionflow.partition import Partition, build_region_network, partition_by_id, partition_grid
from regionflow.prd import prd_discharge

VARIANTS = ("ard", "prd")


@pytest.mark.parametrize("variant", VARIANTS)
def test_one_region_problem_needs_at_most_two_sweeps(variant):
    net = gen_grid(8, 8, 8, 150, seed=5)
    part = partition_grid((8, 8), (1, 1), net)
    cut, st = run_sequential(net, part, variant)
    assert st.sweeps <= 2
    assert cut.flow_value == oracle_maxflow(net)[0]


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("parallel", (False, True))
def test_diamond_two_regions(variant, parallel):
    net = diamond()
    part = partition_by_id(2, 2, net)
    cut, _ = Solver(net, part, SolverConfig(variant=variant, check=True), parallel).run()
    assert cut.flow_value == 4 and cut.cut_cost == 4


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("variant", VARIANTS)
def test_grid_matches_oracle(seed, variant):
    net = gen_grid(30, 30, 8, 150, seed)
    part = partition_grid((30, 30), (2, 2), net)
    cut, st = run_sequential(net, part, variant)
    assert cut.flow_value == cut.cut_cost == nx_maxflow(net)
    assert st.sweeps <= st.bound


def test_parallel_without_interaction_equals_sequential():
    # two disjoint grids side by side: no arc crosses the regions
    a = gen_grid(6, 6, 4, 50, seed=1)
    net = Network(74, 72, 73)
    for off in (0, 36):
        for x in range(0, a.m, 2):
            u, v = a.tail[x], a.head[x]
            u = 72 if u == a.s else 73 if u == a.t else u + off
            v = 72 if v == a.s else 73 if v == a.t else v + off
            net.add_arc(u, v, a.cap[x], a.cap[x + 1])
        for v in range(36):
            net.excess[v + off] = a.excess[v]
    part = partition_by_id(72, 2, net)
    for variant in VARIANTS:
        seq, _ = run_sequential(net, part, variant)
        par, st = run_parallel(net, part, variant)
        assert seq.flow_value == par.flow_value and st.canceled == 0


def test_conflicting_push_is_canceled():
    # 1 -> 2 crosses into a region where 2 cannot reach the sink
    net = Network(6, 4, 5)
    net.add_arc(1, 2, 3)
    net.add_arc(5, 3, 3, 3)
    net.excess[:4] = [1, 3, 3, 5]
    part = Partition([0, 0, 1, 1, -1, -1], 2)
    cut, st = Solver(net, part, SolverConfig(variant="prd", check=True), parallel=True).run()
    assert st.canceled >= 1
    assert not st.violations
    assert cut.flow_value == oracle_maxflow(net)[0] == 3


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("variant", VARIANTS)
def test_parallel_grid_matches_oracle(seed, variant):
    net = gen_grid(20, 20, 8, 150, seed)
    part = partition_grid((20, 20), (3, 3), net)
    cut, st = Solver(net, part, SolverConfig(variant=variant, check=True, workers=4), True).run()
    assert cut.flow_value == oracle_maxflow(net)[0]
    assert not st.violations and st.sweeps <= st.bound


def _rn_pair(seed, metric):
    g, part, lab, k, _ = random_region_instance(seed, metric)
    return (build_region_network(g, part, k, labels=lab, metric=metric),
            build_region_network(g, part, k, labels=lab, metric=metric))


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("metric", VARIANTS)
def test_paged_discharge_is_bit_identical(seed, metric):
    plain, paged = _rn_pair(seed, metric)
    paged = pager_load(pager_save(RegionPage(paged))).rn
    run = prd_discharge if metric == "prd" else ard_discharge
    r1, r2 = run(plain), run(paged)
    assert (r1.flow, r1.labels) == (r2.flow, r2.labels)
    assert pager_save(RegionPage(plain)) == pager_save(RegionPage(paged))


def test_empty_region_page_round_trips():
    net = Network(3, 0, 2)
    part = Partition([-1, -1, -1], 1)
    part.attach(net)
    rn = build_region_network(net, part, 0)
    data = pager_save(RegionPage(rn))
    assert pager_save(pager_load(data)) == data


def test_corrupted_page_detected():
    net = gen_grid(3, 3)
    part = partition_grid((3, 3), (1, 1), net).attach(net)
    data = bytearray(pager_save(RegionPage(build_region_network(net, part, 0))))
    data[20] ^= 0xFF
    with pytest.raises(PageCorrupted):
        pager_load(bytes(data))


@pytest.mark.parametrize("variant", VARIANTS)
def test_stream_keeps_one_region_resident(variant, tmp_path):
    net = gen_grid(16, 16, 8, 150, seed=2)
    part = partition_grid((16, 16), (2, 2), net)
    mem, s1 = run_sequential(net, part, variant)
    cfg = SolverConfig(stream=True, tmpdir=str(tmp_path))
    out, s2 = run_sequential(net, part, variant, cfg)
    assert (mem.flow_value, mem.cut_cost, s1.sweeps) == (out.flow_value, out.cut_cost, s2.sweeps)
    assert s2.max_resident == 1 and s2.bytes_in > 0 and s2.bytes_out > 0


def test_stream_and_parallel_are_exclusive():
    net = diamond()
    with pytest.raises(ValueError):
        Solver(net, partition_by_id(2, 2, net), SolverConfig(stream=True), parallel=True)


def test_stats_csv_columns(tmp_path):
    net = gen_grid(6, 6, 4, 150, seed=3)
    _, st = run_sequential(net, partition_grid((6, 6), (2, 2), net), "ard")
    path = tmp_path / "s.csv"
    st.write_csv(str(path))
    rows = path.read_text().splitlines()
    assert rows[0] == "sweep,active_regions,flow_value,label_sum,bytes_in,bytes_out,ms"
    assert len(rows) == 1 + len(st.records)


@pytest.mark.parametrize("backend", ("basic", "forest"))
@pytest.mark.parametrize("partial", (True, False))
def test_ard_options_agree(backend, partial):
    net = gen_grid(14, 14, 8, 150, seed=9)
    part = partition_grid((14, 14), (2, 2), net)
    cfg = SolverConfig(backend=backend, partial=partial, check=True)
    cut, st = run_sequential(net, part, "ard", cfg)
    assert cut.flow_value == oracle_maxflow(net)[0] and not st.violations
