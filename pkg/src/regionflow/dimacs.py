"""DIMACS max-flow text files, region part files and cut files.

DIMACS vertex ids are 1-based; in memory they are shifted to 0-based.
Arcs leaving the source are folded into vertex excess on parse and written
back as ``a <s> <v> <cap>`` lines.

Part files (one per region, plus ``boundary.bin``) are little endian:

    header   4s magic "RFPT", u16 version, i32 region (-1 for boundary),
             i64 n, i64 s, i64 t, i64 record count
    records  i64 tail, i64 head, i64 cap, i64 global arc id

``global arc id`` is the 0-based index of the ``a`` line in the source
file, so sorting all records by it restores the input order.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .network import CutResult, Network
from .partition import Partition

PART_MAGIC = b"RFPT"
PART_VERSION = 1
_PART_HEADER = struct.Struct("<4sHiqqqq")
_RECORD = struct.Struct("<qqqq")


class DimacsError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass
class _Header:
    n: int
    m: int
    s: int | None = None
    t: int | None = None
    node_excess: list[tuple[int, int, int]] = field(default_factory=list)  # (line, id, value)


def _scan(lines: Iterable[str]):
    """Yield ("p", header) once, then ("a", lineno, u, v, cap) for every arc line.

    Terminal and ``n <id> e`` lines must precede the arcs that use them only
    in the sense that they are validated at the end.
    """
    hdr = None
    arcs_seen = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "p":
                if hdr is not None:
                    raise DimacsError("second problem line", lineno)
                if len(tok) != 4 or tok[1] != "max":
                    raise DimacsError("expected 'p max <n> <m>'", lineno)
                hdr = _Header(int(tok[2]), int(tok[3]))
                if hdr.n < 2 or hdr.m < 0:
                    raise DimacsError("bad problem size", lineno)
                yield ("p", hdr)
            elif kind == "n":
                if hdr is None:
                    raise DimacsError("node line before problem line", lineno)
                v = int(tok[1]) - 1
                if not 0 <= v < hdr.n:
                    raise DimacsError(f"vertex {tok[1]} out of range", lineno)
                if len(tok) == 3 and tok[2] in ("s", "t"):
                    which = tok[2]
                    if getattr(hdr, which) is not None:
                        raise DimacsError(f"duplicate terminal '{which}'", lineno)
                    setattr(hdr, which, v)
                elif len(tok) == 4 and tok[2] == "e":
                    hdr.node_excess.append((lineno, v, int(tok[3])))
                else:
                    raise DimacsError("malformed node line", lineno)
            elif kind == "a":
                if hdr is None:
                    raise DimacsError("arc line before problem line", lineno)
                if len(tok) != 4:
                    raise DimacsError("malformed arc line", lineno)
                u, v, c = int(tok[1]) - 1, int(tok[2]) - 1, int(tok[3])
                if not (0 <= u < hdr.n and 0 <= v < hdr.n):
                    raise DimacsError("arc endpoint out of range", lineno)
                if c < 0:
                    raise DimacsError("negative capacity", lineno)
                arcs_seen += 1
                yield ("a", lineno, u, v, c)
            else:
                raise DimacsError(f"unknown line type {kind!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, DimacsError):
                raise
            raise DimacsError(f"malformed line: {line!r}", lineno) from exc
    if hdr is None:
        raise DimacsError("missing problem line")
    if hdr.s is None or hdr.t is None:
        raise DimacsError("missing source or sink")
    if hdr.s == hdr.t:
        raise DimacsError("source and sink coincide")
    if arcs_seen != hdr.m:
        raise DimacsError(f"problem line declares {hdr.m} arcs, found {arcs_seen}")


def parse_dimacs(stream: TextIO | Iterable[str], pair_arcs: bool = False) -> Network:
    """Read a DIMACS max-flow problem.

    Each arc line becomes its own arc pair with reverse capacity 0.  With
    ``pair_arcs`` a line ``a v u`` directly following ``a u v`` fills in the
    reverse capacity of that pair instead.
    """
    hdr = None
    arc_lines = []
    for item in _scan(stream):
        if item[0] == "p":
            hdr = item[1]
        else:
            arc_lines.append(item[2:])
    net = Network(hdr.n, hdr.s, hdr.t)
    source_arcs = []
    i = 0
    while i < len(arc_lines):
        u, v, c = arc_lines[i]
        i += 1
        if u == hdr.s and v != hdr.t and v != hdr.s:
            source_arcs.append((v, c))
            continue
        rc = 0
        if pair_arcs and i < len(arc_lines):
            u2, v2, c2 = arc_lines[i]
            if u2 == v and v2 == u and u2 != hdr.s:
                rc = c2
                i += 1
        net.add_arc(u, v, c, rc)
    for v, c in source_arcs:
        net.excess[v] += c
    for lineno, v, e in hdr.node_excess:
        if v in (hdr.s, hdr.t):
            raise DimacsError("excess on a terminal", lineno)
        if e >= 0:
            net.excess[v] += e
        else:
            net.add_arc(v, hdr.t, -e)
    return net


def write_dimacs(net: Network, stream: TextIO, comment: str | None = None) -> None:
    """Canonical form: every arc pair as two consecutive lines, then excesses.

    Reading it back with ``pair_arcs=True`` reproduces ``net`` exactly.
    """
    if net.flow_value:
        raise ValueError("cannot write a network carrying flow into the sink")
    lines = []
    for a in range(0, net.m, 2):
        u, v = net.tail[a] + 1, net.head[a] + 1
        lines.append(f"a {u} {v} {net.cap[a]}")
        lines.append(f"a {v} {u} {net.cap[a + 1]}")
    for v, e in enumerate(net.excess):
        if e < 0:
            raise ValueError(f"negative excess at vertex {v}")
        if e > 0 and v not in (net.s, net.t):
            lines.append(f"a {net.s + 1} {v + 1} {e}")
    if comment:
        stream.write(f"c {comment}\n")
    stream.write(f"p max {net.n} {len(lines)}\n")
    stream.write(f"n {net.s + 1} s\nn {net.t + 1} t\n")
    stream.write("\n".join(lines))
    stream.write("\n" if lines else "")


# ----- streaming splitter ----------------------------------------------------


@dataclass
class SplitReport:
    part_files: list[str]
    boundary_file: str
    arcs_per_region: list[int]
    boundary_arcs: int
    peak_buffer: int  # most arc records held in memory at once


def _write_part(path: str, region: int, n: int, s: int, t: int, records) -> None:
    with open(path, "wb") as fh:
        fh.write(_PART_HEADER.pack(PART_MAGIC, PART_VERSION, region, n, s, t, len(records)))
        for rec in records:
            fh.write(_RECORD.pack(*rec))


def split(stream: TextIO | Iterable[str], part: Partition, outdir: str) -> SplitReport:
    """One pass over a DIMACS file: intra-region arcs go straight to part
    files, inter-region arcs are held back and written to ``boundary.bin``."""
    os.makedirs(outdir, exist_ok=True)
    it = _scan(stream)
    first = next(it)
    hdr = first[1]
    if len(part.region_of) != hdr.n:
        raise DimacsError(f"partition covers {len(part.region_of)} vertices, file declares {hdr.n}")
    paths = [os.path.join(outdir, f"part{k}.bin") for k in range(part.K)]
    tmp = [open(p + ".tmp", "wb") for p in paths]
    counts = [0] * part.K
    boundary = []
    peak = 0
    ro = part.region_of
    arc_id = 0
    try:
        for _, lineno, u, v, c in it:
            ku, kv = ro[u], ro[v]
            if ku >= 0 and kv >= 0 and ku != kv or (ku < 0 and kv < 0):
                boundary.append((u, v, c, arc_id))
                peak = max(peak, len(boundary))
            else:
                k = ku if ku >= 0 else kv
                tmp[k].write(_RECORD.pack(u, v, c, arc_id))
                counts[k] += 1
            arc_id += 1
    finally:
        for fh in tmp:
            fh.close()
    # terminals are known only after the full pass (the scanner validated them)
    for k, p in enumerate(paths):
        with open(p + ".tmp", "rb") as src, open(p, "wb") as dst:
            dst.write(_PART_HEADER.pack(PART_MAGIC, PART_VERSION, k, hdr.n, hdr.s, hdr.t, counts[k]))
            while True:
                chunk = src.read(1 << 16)
                if not chunk:
                    break
                dst.write(chunk)
        os.remove(p + ".tmp")
    bpath = os.path.join(outdir, "boundary.bin")
    _write_part(bpath, -1, hdr.n, hdr.s, hdr.t, boundary)
    if hdr.node_excess:
        raise DimacsError("node excess lines are not supported by split",
                          hdr.node_excess[0][0])
    with open(os.path.join(outdir, "regions.txt"), "w") as fh:
        fh.write("\n".join(part.describe()) + "\n")
    return SplitReport(paths, bpath, counts, len(boundary), peak)


def read_part(path: str):
    """(region, n, s, t, records) of one part file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _PART_HEADER.size:
        raise DimacsError(f"{path}: truncated part file")
    magic, ver, region, n, s, t, count = _PART_HEADER.unpack_from(data, 0)
    if magic != PART_MAGIC or ver != PART_VERSION:
        raise DimacsError(f"{path}: not a part file (version {ver})")
    if len(data) != _PART_HEADER.size + count * _RECORD.size:
        raise DimacsError(f"{path}: record count does not match file size")
    recs = [_RECORD.unpack_from(data, _PART_HEADER.size + i * _RECORD.size) for i in range(count)]
    return region, n, s, t, recs


def load_split(outdir: str) -> tuple[Network, Partition]:
    """Rebuild the network (as ``parse_dimacs`` would) and partition of a split directory."""
    with open(os.path.join(outdir, "regions.txt")) as fh:
        lines = fh.read().splitlines()
    _, n, s, t, recs = read_part(os.path.join(outdir, "boundary.bin"))
    part = Partition.from_sidecar(lines, n)
    for k in range(part.K):
        recs += read_part(os.path.join(outdir, f"part{k}.bin"))[4]
    recs.sort(key=lambda r: r[3])
    net = Network(n, s, t)
    for u, v, c, _ in recs:
        if u == s and v not in (s, t):
            net.excess[v] += c
        else:
            net.add_arc(u, v, c)
    return net, part


# ----- cut files -----------------------------------------------------------------


def write_cut(cut: CutResult, stream: TextIO) -> None:
    """``f <flow>``, ``c <cost>``, then one 1-based source-side vertex id per line."""
    stream.write(f"f {cut.flow_value}\nc {cut.cut_cost}\n")
    for v in cut.source_set():
        stream.write(f"{v + 1}\n")


def read_cut(stream: TextIO | Iterable[str]) -> tuple[int, int, set[int]]:
    flow = cost = None
    side = set()
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "f":
                flow = int(tok[1])
            elif tok[0] == "c":
                cost = int(tok[1])
            else:
                side.add(int(tok[0]) - 1)
        except (ValueError, IndexError) as exc:
            raise DimacsError(f"malformed cut line {line!r}", lineno) from exc
    if flow is None or cost is None:
        raise DimacsError("cut file lacks the f/c header")
    return flow, cost, side


def check_cut_cost(dimacs: TextIO | Iterable[str], side: set[int]) -> int:
    """Cost of the cut ``side`` recomputed by streaming the DIMACS file once.

    Only the source set is held in memory.
    """
    cost = 0
    it = _scan(dimacs)
    hdr = next(it)[1]
    for _, lineno, u, v, c in it:
        if u in side and v not in side:
            cost += c
    if hdr.s not in side or hdr.t in side:
        raise DimacsError("cut does not separate the source from the sink")
    for _, v, e in hdr.node_excess:
        if e >= 0 and v not in side:
            cost += e
        elif e < 0 and v in side:
            cost += -e
    return cost
