import io
import os
from collections import Counter

import pytest

from regionflow.dimacs import (DimacsError, check_cut_cost, load_split, parse_dimacs, read_cut,
                               read_part, split, write_cut, write_dimacs)
from regionflow.engine import run_sequential
from regionflow.generators import gen_grid
from regionflow.network import Network
from regionflow.partition import Partition, partition_grid

DIAMOND = """c diamond
p max 4 5
n 1 s
n 4 t
a 1 2 2
a 1 3 2
a 2 4 1
a 3 4 3
a 2 3 1
"""


def test_parse_diamond():
    net = parse_dimacs(io.StringIO(DIAMOND))
    assert (net.n, net.s, net.t) == (4, 0, 3)
    # source arcs fold into excess; every other line is one pair with reverse cap 0
    assert net.excess == [0, 2, 2, 0]
    assert net.m == 6 and net.cap == [1, 0, 3, 0, 1, 0]


@pytest.mark.parametrize("text,msg", [
    ("p max 2 1\nn 1 s\nn 2 t\na 1 2 -3\n", "negative"),
    ("p max 3 0\nn 1 s\n", "source or sink"),
    ("p max 3 1\nn 1 s\nn 3 t\na 1 2\n", "malformed"),
    ("p max 3 2\nn 1 s\nn 3 t\na 1 2 1\n", "declares"),
    ("p max 3 0\nn 1 s\nn 1 s\nn 3 t\n", "duplicate"),
    ("x\n", "unknown"),
])
def test_malformed_input(text, msg):
    with pytest.raises(DimacsError, match=msg):
        parse_dimacs(io.StringIO(text))


def test_error_carries_line_number():
    with pytest.raises(DimacsError) as exc:
        parse_dimacs(io.StringIO("p max 2 1\nn 1 s\nn 2 t\na 1 2 x\n"))
    assert exc.value.line == 4


def test_write_parse_round_trip():
    net = gen_grid(7, 5, 8, 150, seed=3)
    buf = io.StringIO()
    write_dimacs(net, buf)
    back = parse_dimacs(io.StringIO(buf.getvalue()), pair_arcs=True)
    assert (back.tail, back.head, back.cap, back.excess) == (net.tail, net.head, net.cap, net.excess)
    again = io.StringIO()
    write_dimacs(back, again)
    assert again.getvalue() == buf.getvalue()


def test_node_excess_extension():
    net = parse_dimacs(io.StringIO("p max 3 0\nn 1 s\nn 3 t\nn 2 e 4\n"))
    assert net.excess[1] == 4
    net = parse_dimacs(io.StringIO("p max 3 0\nn 1 s\nn 3 t\nn 2 e -4\n"))
    assert net.cap[net.find_arc(1, 2)] == 4


def _multiset(net):
    return Counter((net.tail[a], net.head[a], net.cap[a]) for a in range(net.m))


def test_split_path_two_regions(tmp_path):
    text = "p max 4 3\nn 1 s\nn 4 t\na 1 2 5\na 2 3 4\na 3 4 6\n"
    part = Partition([-1, 0, 1, -1], 2)
    rep = split(io.StringIO(text), part, str(tmp_path))
    assert rep.arcs_per_region == [1, 1] and rep.boundary_arcs == 1
    region, _, _, _, recs = read_part(rep.boundary_file)
    assert region == -1
    assert [(u, v, c) for u, v, c, _ in recs] == [(1, 2, 4)]


def test_split_single_region_has_empty_boundary(tmp_path):
    net = gen_grid(4, 4)
    buf = io.StringIO()
    write_dimacs(net, buf)
    rep = split(io.StringIO(buf.getvalue()), partition_grid((4, 4), (1, 1), net), str(tmp_path))
    assert len(rep.part_files) == 1 and rep.boundary_arcs == 0


def test_split_merge_reproduces_arcs_and_flow(tmp_path):
    net = gen_grid(9, 8, 8, 150, seed=1)
    buf = io.StringIO()
    write_dimacs(net, buf)
    text = buf.getvalue()
    part = partition_grid((9, 8), (3, 2), net).attach(net)
    rep = split(io.StringIO(text), part, str(tmp_path))
    flat = parse_dimacs(io.StringIO(text))
    merged, mpart = load_split(str(tmp_path))
    assert _multiset(merged) == _multiset(flat) and merged.excess == flat.excess
    assert mpart.region_of == part.region_of
    inter = sum(1 for a in range(0, flat.m, 2) if part.is_inter(flat.tail[a], flat.head[a]))
    assert rep.peak_buffer <= inter
    a, _ = run_sequential(flat, part, "ard")
    b, _ = run_sequential(merged, mpart, "ard", )
    assert a.flow_value == b.flow_value


def test_cut_file_and_streaming_check(tmp_path):
    net = gen_grid(10, 10, 8, 150, seed=4)
    buf = io.StringIO()
    write_dimacs(net, buf)
    cut, _ = run_sequential(net, partition_grid((10, 10), (2, 2), net), "prd")
    cbuf = io.StringIO()
    write_cut(cut, cbuf)
    flow, cost, side = read_cut(io.StringIO(cbuf.getvalue()))
    assert flow == cost == cut.cut_cost
    # the checker consumes an iterator of lines and never builds a network
    lines = iter(buf.getvalue().splitlines())
    assert check_cut_cost(lines, side) == cut.cut_cost


def test_multigraph_default_keeps_reverse_lines_separate():
    text = "p max 4 2\nn 1 s\nn 4 t\na 2 3 5\na 3 2 7\n"
    net = parse_dimacs(io.StringIO(text))
    assert net.m == 4
    paired = parse_dimacs(io.StringIO(text), pair_arcs=True)
    assert paired.m == 2 and paired.cap == [5, 7]
