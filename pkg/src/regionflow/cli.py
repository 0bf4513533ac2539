"""Command-line frontend: ``regionflow <subcommand> ...``.

Exit codes: 0 success, 1 solver or input error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
import time

from .adversary import replay_adversarial_prd
from .dimacs import (DimacsError, check_cut_cost, load_split, parse_dimacs, read_cut,
                     split, write_cut, write_dimacs)
from .engine import SolverConfig, Solver
from .generators import gen_adversarial_prd, gen_grid
from .network import FlowError, Network
from .oracle import oracle_maxflow
from .partition import Partition, ShapeMismatch, partition_by_id, partition_grid
from .reduction import reduce_network

_GRID_TAG = re.compile(r"^c\s+grid\s+(\d+)\s+(\d+)")
_ADV_TAG = re.compile(r"^c\s+adversarial\s+k\s+(\d+)\s+excess\s+(\d+)")


class UsageError(Exception):
    pass


def _onoff(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _read_lines(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path) as fh:
        return fh.read().splitlines()


def _grid_dims(lines, override: str | None):
    if override:
        return _parse_shape(override)
    for line in lines:
        m = _GRID_TAG.match(line)
        if m:
            return int(m.group(1)), int(m.group(2))
        if line.startswith("p"):
            break
    return None


def _parse_shape(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad shape {text!r}, expected e.g. 2x2")


def _partition(spec: str | None, net: Network, lines, dims: str | None) -> Partition:
    """``spec`` is a sidecar file, a block grid like ``2x2`` or a region count."""
    spec = spec or "1"
    try:
        if os.path.isfile(spec):
            with open(spec) as fh:
                part = Partition.from_sidecar(fh.read().splitlines(), net.n)
        elif "x" in spec.lower():
            shape = _grid_dims(lines, dims)
            if shape is None:
                raise UsageError("grid region spec needs a 'c grid W H' comment or --dims")
            part = partition_grid(shape, _parse_shape(spec), net)
        elif spec.isdigit():
            part = partition_by_id(net.n - 2, int(spec), net)
        else:
            raise UsageError(f"--regions: no such file and not a region spec: {spec!r}")
        return part.attach(net)
    except ShapeMismatch as exc:
        raise UsageError(f"--regions: {exc}")


def _load(args) -> tuple[Network, Partition | None, list[str]]:
    if os.path.isdir(args.input):
        net, part = load_split(args.input)
        return net, part.attach(net), []
    lines = _read_lines(args.input)
    net = parse_dimacs(lines, pair_arcs=args.pair_arcs)
    return net, None, lines


# ----- subcommands ------------------------------------------------------------


def cmd_gen(args, out) -> int:
    if args.kind == "grid":
        if len(args.size) != 2:
            raise UsageError("gen grid needs W H")
        w, h = args.size
        net = gen_grid(w, h, args.conn, args.strength, args.seed)
        comment = f"grid {w} {h} conn {args.conn} strength {args.strength} seed {args.seed}"
        part = None
        if args.sidecar:
            part = partition_grid((w, h), _parse_shape(args.regions or "1x1"))
    else:
        if len(args.size) != 1:
            raise UsageError("gen adversarial needs K")
        inst = gen_adversarial_prd(args.size[0], args.excess)
        net, part = inst.net, inst.part
        comment = f"adversarial k {inst.k} excess {args.excess}"
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            write_dimacs(net, fh, comment)
    else:
        write_dimacs(net, out, comment)
    if args.sidecar and part is not None:
        with open(args.sidecar, "w") as fh:
            fh.write("\n".join(part.describe()) + "\n")
    return 0


def _adversarial_replay(lines):
    net = parse_dimacs(lines, pair_arcs=True)
    for line in lines:
        m = _ADV_TAG.match(line)
        if m:
            inst = gen_adversarial_prd(int(m.group(1)), int(m.group(2)))
            if (inst.net.tail, inst.net.head, inst.net.cap, inst.net.excess) != (
                    net.tail, net.head, net.cap, net.excess):
                break
            return inst
    raise UsageError("--schedule adversarial needs an unmodified 'gen adversarial' file")


def cmd_solve(args, out) -> int:
    if args.cut and args.reduce:
        raise UsageError("--cut is not available with --reduce")
    net, part, lines = _load(args)
    if part is None:
        part = _partition(args.regions, net, lines, args.dims)
    if args.schedule == "adversarial":
        if args.algo != "prd" or args.mode != "seq" or args.reduce:
            raise UsageError("--schedule adversarial replays sequential PRD only")
        inst = _adversarial_replay(lines)
        stats = replay_adversarial_prd(inst)
        cut = None
    else:
        offset = 0
        if args.reduce:
            red = reduce_network(net, part)
            offset, target = red.offset, red.net
            part = Partition(list(part.region_of), part.K).attach(target)
        else:
            target = net
        if args.mode == "par" and args.stream:
            raise UsageError("--stream works with --mode seq only")
        cfg = SolverConfig(variant=args.algo, backend=args.backend, partial=args.partial_discharge,
                           boundary_relabel=args.boundary_relabel, stream=args.stream,
                           workers=args.workers)
        cut, stats = Solver(target, part, cfg, parallel=args.mode == "par").run()
        if offset:
            side = list(cut.side)
            cut = type(cut)(side, cut.cut_cost + offset, cut.flow_value + offset)
    if cut is not None:
        out.write(f"flow {cut.flow_value}\ncut {cut.cut_cost}\n")
    out.write(f"sweeps {stats.sweeps}\n")
    if stats.extra_sweeps:
        out.write(f"extra_sweeps {stats.extra_sweeps}\n")
    for flag in stats.flags:
        out.write(f"note {flag}\n")
    if args.stats:
        stats.write_csv(args.stats)
    if args.cut and cut is not None:
        with open(args.cut, "w") as fh:
            write_cut(cut, fh)
    return 0


def cmd_split(args, out) -> int:
    lines = _read_lines(args.input)
    net = parse_dimacs(lines)
    part = _partition(args.regions, net, lines, args.dims)
    rep = split(lines, part, args.output)
    out.write(f"regions {len(rep.part_files)}\n")
    for k, c in enumerate(rep.arcs_per_region):
        out.write(f"region {k}: {c} arcs\n")
    out.write(f"boundary: {rep.boundary_arcs} arcs\npeak_buffer {rep.peak_buffer}\n")
    return 0


def cmd_reduce(args, out) -> int:
    net, part, lines = _load(args)
    if part is None:
        part = _partition(args.regions, net, lines, args.dims)
    red = reduce_network(net, part)
    total = 0
    for k, cls in enumerate(red.per_region):
        total += len(cls.decided())
        out.write(f"region {k}: {100 * cls.decided_fraction():.1f}% decided\n")
    n = len(net.nonterminals())
    out.write(f"total: {100 * total / n if n else 0:.1f}% decided\n")
    return 0


def cmd_verify(args, out) -> int:
    lines = _read_lines(args.input)
    net = parse_dimacs(lines, pair_arcs=args.pair_arcs)
    value, _ = oracle_maxflow(net)
    out.write(f"oracle {value}\n")
    if not args.cut:
        return 0
    with open(args.cut) as fh:
        flow, cost, side = read_cut(fh)
    checked = check_cut_cost(lines, side)
    out.write(f"reported flow {flow} cut {cost}; recomputed cut {checked}\n")
    ok = flow == value and cost == value and checked == value
    out.write("ok\n" if ok else "MISMATCH\n")
    return 0 if ok else 1


BENCH_COLUMNS = ("size", "conn", "strength", "regions", "seed", "algo", "mode",
                 "flow", "sweeps", "bytes_in", "bytes_out", "ms")


def cmd_bench(args, out) -> int:
    w = csv.writer(out)
    w.writerow(BENCH_COLUMNS)
    for size in args.sizes:
        for conn in args.conn:
            for strength in args.strength:
                for slices in args.regions:
                    for seed in args.seeds:
                        net = gen_grid(size, size, conn, strength, seed)
                        for algo in args.algos.split(","):
                            if algo not in ("ard", "prd"):
                                raise UsageError(f"unknown algorithm {algo!r}")
                            part = partition_grid((size, size), (slices, slices), net)
                            cfg = SolverConfig(variant=algo, stream=args.stream)
                            t0 = time.perf_counter()
                            cut, st = Solver(net, part, cfg, parallel=args.mode == "par").run()
                            ms = 1000 * (time.perf_counter() - t0)
                            w.writerow([size, conn, strength, slices * slices, seed, algo,
                                        args.mode, cut.flow_value, st.sweeps, st.bytes_in,
                                        st.bytes_out, f"{ms:.1f}"])
    return 0


# ----- argument parsing -------------------------------------------------------


def _input_args(p, regions=True):
    p.add_argument("input", nargs="?", default="-",
                   help="DIMACS file ('-' for stdin) or a split directory")
    p.add_argument("--pair-arcs", action="store_true",
                   help="merge consecutive reverse arc lines into one pair")
    if regions:
        p.add_argument("--regions", help="sidecar file, block grid like 2x2, or a region count")
        p.add_argument("--dims", help="grid shape WxH when the input has no grid comment")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regionflow", description="Region discharge max-flow toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate an instance as DIMACS")
    p.add_argument("kind", choices=("grid", "adversarial"))
    p.add_argument("size", nargs="+", type=int, help="W H for grid, K for adversarial")
    p.add_argument("--conn", type=int, default=8)
    p.add_argument("--strength", type=int, default=150)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--excess", type=int, default=1)
    p.add_argument("--regions", help="block grid for the sidecar, e.g. 2x2")
    p.add_argument("--sidecar", help="write the partition sidecar here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run a region discharge solver")
    _input_args(p)
    p.add_argument("--algo", choices=("ard", "prd"), default="ard")
    p.add_argument("--mode", choices=("seq", "par"), default="seq")
    p.add_argument("--stream", action="store_true", help="keep one region in memory")
    p.add_argument("--partial-discharge", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--boundary-relabel", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--backend", choices=("basic", "forest"), default="basic")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--schedule", choices=("default", "adversarial"), default="default")
    p.add_argument("--reduce", action="store_true", help="run region reduction first")
    p.add_argument("--stats", help="write per-sweep CSV here")
    p.add_argument("--cut", help="write the cut file here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("split", help="split a DIMACS file into region part files")
    _input_args(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("reduce", help="report decided vertices per region")
    _input_args(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="compare with the oracle and check a cut file")
    _input_args(p, regions=False)
    p.add_argument("--cut", help="cut file written by solve --cut")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="parameter sweep over random grids, CSV to stdout")
    p.add_argument("--sizes", type=_ints, default=[20])
    p.add_argument("--conn", type=_ints, default=[4, 8])
    p.add_argument("--strength", type=_ints, default=[150])
    p.add_argument("--regions", type=_ints, default=[2], help="slices per side")
    p.add_argument("--seeds", type=_ints, default=[0])
    p.add_argument("--algos", default="ard,prd")
    p.add_argument("--mode", choices=("seq", "par"), default="seq")
    p.add_argument("--stream", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


def cli_main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"regionflow: error: {exc}", file=sys.stderr)
        return 2
    except (DimacsError, FlowError, OSError, RuntimeError, ValueError) as exc:
        print(f"regionflow: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
