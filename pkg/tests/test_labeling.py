import random

import pytest

from conftest import random_network
from regionflow.generators import gen_grid
from regionflow.labeling import (BoundaryGraph, LabelHistogram, Labeling, PreconditionViolated,
                                 bfs_distance, boundary_relabel, check_valid, global_gap,
                                 region_gap, region_relabel, true_region_distance)
from regionflow.network import Network, init
from regionflow.partition import Partition, build_region_network, partition_by_id, partition_grid


def _path():
    # s=0, u1=1, u2=2, t=3; regions {u1}, {u2}
    net = Network(4, 0, 3)
    net.add_arc(1, 2, 5)
    net.add_arc(2, 3, 7)
    return net, Partition([-1, 0, 1, -1], 2).attach(net)


def test_zero_labeling_valid_both_metrics(rng):
    net = random_network(rng, 10, 25)
    part = partition_by_id(8, 3, net).attach(net)
    assert check_valid(net, Labeling.zeros(net.n, net.n, "prd")) is None
    assert check_valid(net, Labeling.zeros(net.n, part.dinf_ard, "ard"), part) is None


def test_ard_intra_region_arc_is_strict():
    net = Network(4, 0, 3)
    a = net.add_arc(1, 2, 1)
    part = Partition([-1, 0, 0, -1], 1).attach(net)
    lab = Labeling([0, 1, 0, 0], 2, "ard")
    assert check_valid(net, lab, part) == (a, 1, 2)
    # the same labels are fine under PRD
    assert check_valid(net, Labeling([0, 1, 0, 0], 4, "prd")) is None


def test_region_distance_on_path():
    net, part = _path()
    d = true_region_distance(net, part)
    assert d[2] == 0 and d[1] == 1


def test_region_distance_unreachable_and_single_region():
    net = Network(4, 0, 3)
    net.add_arc(1, 3, 2)
    part = Partition([-1, 0, 1, -1], 2).attach(net)
    d = true_region_distance(net, part)
    assert d[2] == part.dinf_ard and d[1] == 0
    g = gen_grid(5, 5, 8, 20, 4)
    one = partition_grid((5, 5), (1, 1), g).attach(g)
    reach = bfs_distance(g)
    d = true_region_distance(g, one)
    assert all(d[v] == 0 for v in g.nonterminals() if reach[v] < g.n)


@pytest.mark.parametrize("seed", range(40))
def test_prd_relabel_single_region_is_bfs(seed):
    rng = random.Random(seed)
    net = random_network(rng, 12, 30)
    g, _ = init(net)
    part = partition_by_id(10, 1, g).attach(g)
    rn = build_region_network(g, part, 0, metric="prd")
    lab = region_relabel(rn, "prd")
    dist = bfs_distance(g)
    for i in range(rn.r):
        assert lab[i] == dist[rn.gid[i]]


@pytest.mark.parametrize("seed", range(40))
def test_ard_relabel_is_min_stage(seed):
    rng = random.Random(seed)
    net = random_network(rng, 14, 35)
    g, _ = init(net)
    part = partition_by_id(12, 3, g).attach(g)
    d = true_region_distance(g, part)
    for k in range(part.K):
        rn = build_region_network(g, part, k, labels=d, metric="ard")
        lab = region_relabel(rn, "ard")
        # with exact boundary labels the region relabel reproduces the exact distance
        for i in range(rn.r):
            assert lab[i] == d[rn.gid[i]]


@pytest.mark.parametrize("seed", range(20))
def test_region_relabel_is_valid(seed):
    rng = random.Random(seed)
    net = random_network(rng, 20, 50)
    g, _ = init(net)
    part = partition_by_id(18, 1, g).attach(g)
    rn = build_region_network(g, part, 0, metric="prd")
    loc = region_relabel(rn, "prd")
    full = [0] * g.n
    for i, v in enumerate(rn.gid):
        full[v] = loc[i]
    full[g.t] = 0
    assert check_valid(g, Labeling(full, g.n, "prd")) is None


def test_global_gap_rule():
    lab = Labeling([0, 1, 3, 3], 10)
    out = global_gap(lab, LabelHistogram(10, lab.d))
    assert out.d == [0, 1, 10, 10]
    same = Labeling([0, 1, 2, 2], 10)
    assert global_gap(same, LabelHistogram(10, same.d)).d == [0, 1, 2, 2]


@pytest.mark.parametrize("seed", range(30))
def test_global_gap_keeps_lower_bound(seed):
    rng = random.Random(seed)
    net = random_network(rng, 14, 30)
    g, _ = init(net)
    dist = bfs_distance(g)
    inner = g.nonterminals()
    lab = Labeling([0] * g.n, g.n)
    for v in inner:
        lab.d[v] = max(0, dist[v] - rng.randint(0, 2)) if dist[v] < g.n else rng.randint(0, g.n)
    hist = LabelHistogram(g.n, [lab.d[v] for v in inner] + [0])
    out = global_gap(lab, hist, inner)
    if check_valid(g, lab) is None:
        assert check_valid(g, out) is None
        assert all(out.d[v] <= dist[v] for v in inner)


def _two_region_rn(labels):
    # region {1,2}, boundary {3,4}
    net = Network(6, 0, 5)
    net.add_arc(1, 3, 1)
    net.add_arc(2, 4, 1)
    part = Partition([-1, 0, 0, 1, 1, -1], 2).attach(net)
    return build_region_network(net, part, 0, labels=labels, metric="prd", dinf=6)


def test_region_gap_empty_interval():
    rn = _two_region_rn([0, 1, 4, 0, 3, 0])
    loc = list(rn.label)
    assert region_gap(rn, loc, 2) == loc


def test_region_gap_disconnection():
    rn = _two_region_rn([0, 1, 3, 0, 0, 0])
    out = region_gap(rn, list(rn.label), 2)
    assert out[1] == rn.dinf and out[0] == 1


def test_region_gap_precondition():
    rn = _two_region_rn([0, 2, 3, 0, 0, 0])
    with pytest.raises(PreconditionViolated):
        region_gap(rn, list(rn.label), 2)


def _bg(net, part):
    arcs = [(net.tail[a], net.head[a], net.cap[a]) for a in part.inter_arcs]
    return BoundaryGraph(part.boundary, part.region_of, arcs)


def test_boundary_relabel_equal_labels_collapse():
    net = Network(6, 0, 5)
    net.add_arc(1, 3, 1, 1)
    net.add_arc(2, 4, 1, 1)
    net.add_arc(3, 5, 1)
    part = Partition([-1, 0, 0, 1, 1, -1], 2).attach(net)
    out = boundary_relabel(_bg(net, part), [0] * 6, part.dinf_ard)
    assert all(x <= 1 for x in out.values())


def test_boundary_relabel_unreachable_group_rises():
    net = Network(6, 0, 5)
    net.add_arc(1, 3, 1)
    net.add_arc(4, 2, 1)
    part = Partition([-1, 0, 0, 1, 1, -1], 2).attach(net)
    labels = [0, 1, 0, 1, 0, 0]
    out = boundary_relabel(_bg(net, part), labels, part.dinf_ard)
    # 1 and 3 only connect to each other; nothing at label 0 below them
    assert out[1] == part.dinf_ard and out[4] == 0


@pytest.mark.parametrize("seed", range(60))
def test_boundary_relabel_max_is_valid_lower_bound(seed):
    rng = random.Random(seed)
    net = random_network(rng, 16, 40)
    g, _ = init(net)
    part = partition_by_id(14, rng.randint(2, 5), g).attach(g)
    dinf = part.dinf_ard
    true = true_region_distance(g, part)
    d = [x // 2 for x in true]
    d[g.s] = dinf
    assert check_valid(g, Labeling(d, dinf, "ard"), part) is None
    out = boundary_relabel(_bg(g, part), d, dinf)
    for v, x in out.items():
        assert d[v] <= x <= true[v]
    for u, v, c in _bg(g, part).arcs:
        if c > 0:
            assert out[u] <= out[v] + 1
