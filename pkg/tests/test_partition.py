import random

import pytest

from conftest import random_network
from regionflow.generators import gen_grid
from regionflow.network import Network
from regionflow.partition import (Partition, ShapeMismatch, build_region_network,
                                  partition_by_id, partition_grid)


def _scan_boundary(net, part):
    bnd = set()
    for a in range(net.m):
        u, v = net.tail[a], net.head[a]
        if part.is_inter(u, v):
            bnd.add(v)
    return sorted(bnd)


def test_grid_6x6_four_regions_of_nine():
    part = partition_grid((6, 6), (2, 2))
    assert part.K == 4
    assert [len(m) for m in part.members] == [9, 9, 9, 9]
    # top-left block is x<3, y<3
    assert part.members[0] == [y * 6 + x for y in range(3) for x in range(3)]


def test_single_row_single_region_has_no_boundary():
    net = gen_grid(7, 1, 4)
    part = partition_grid((7, 1), (1, 1), net).attach(net)
    assert part.K == 1 and part.boundary == []


def test_column_regions_boundary_matches_arc_scan():
    net = gen_grid(4, 4, 4)
    part = partition_grid((4, 4), (4, 1), net).attach(net)
    assert [sorted(m) for m in part.members] == [[x + 4 * y for y in range(4)] for x in range(4)]
    assert part.boundary == _scan_boundary(net, part)
    assert part.boundary == list(range(16))


def test_partition_by_id_blocks():
    p = partition_by_id(10, 2)
    assert p.members == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    assert [len(m) for m in partition_by_id(5, 3).members] == [2, 2, 1]


def test_singleton_regions_boundary():
    rng = random.Random(1)
    net = random_network(rng, 12, 30)
    part = partition_by_id(10, 10, net).attach(net)
    assert all(len(m) == 1 for m in part.members)
    assert part.boundary == _scan_boundary(net, part)


def test_shape_mismatch():
    net = gen_grid(3, 3)
    with pytest.raises(ShapeMismatch):
        partition_grid((4, 3), (1, 1), net)
    with pytest.raises(ShapeMismatch):
        Partition([0] * 5, 1).attach(net)


def test_region_network_path():
    # s=0, u1=1, u2=2, t=3; regions {u1}, {u2}
    net = Network(4, 0, 3)
    a = net.add_arc(1, 2, 5, 4)
    net.add_arc(2, 3, 7)
    part = Partition([-1, 0, 1, -1], 2).attach(net)
    rn = build_region_network(net, part, 0)
    assert rn.gid == [1, 2, 0, 3]
    loc = rn.garc.index(a)
    assert rn.cap[loc] == 5 and rn.cap[loc ^ 1] == 0
    assert rn.inter[loc]


def test_region_network_without_boundary_is_induced():
    net = gen_grid(4, 4, 4, seed=3)
    part = partition_grid((4, 4), (1, 1), net).attach(net)
    rn = build_region_network(net, part, 0)
    assert rn.b == 0 and rn.r == 16
    assert sorted(rn.garc) == list(range(net.m))
    assert [rn.cap[i] for i in sorted(range(len(rn.garc)), key=rn.garc.__getitem__)] == net.cap


def test_sidecar_round_trip():
    part = partition_grid((5, 4), (2, 2))
    back = Partition.from_sidecar(part.describe(), 22)
    assert back.region_of == part.region_of
