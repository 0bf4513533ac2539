"""Region pages: one contiguous binary block per region, with a checksum.

Layout (little endian): magic ``RFPG``, format version, a fixed header of
scalars, then int64 arrays in a fixed order, then a CRC32 of everything
before it.  Adjacency lists are rebuilt on load from the arc tails, which
reproduces the original arc order exactly.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass

import numpy as np

from .partition import RegionNetwork

MAGIC = b"RFPG"
VERSION = 1
_HEADER = struct.Struct("<4sHiqqqBqB")
_ARRAYS = ("gid", "tail", "head", "cap", "garc", "excess", "label", "inter",
           "forest_mark", "forest_parent", "prd_cur", "prd_cur_label")
_METRICS = ("prd", "ard")


class PageCorrupted(IOError):
    pass


@dataclass
class RegionPage:
    rn: RegionNetwork
    gap_epoch: int = 0  # global gap events already applied
    fresh: bool = True  # not yet discharged


def pager_save(page: RegionPage) -> bytes:
    rn = page.rn
    head = _HEADER.pack(MAGIC, VERSION, rn.region, rn.r, rn.b, rn.dinf,
                        _METRICS.index(rn.metric), page.gap_epoch, int(page.fresh))
    parts = [head]
    for name in _ARRAYS:
        arr = np.asarray(getattr(rn, name), dtype="<i8")
        parts.append(struct.pack("<q", arr.size))
        parts.append(arr.tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def pager_load(data: bytes) -> RegionPage:
    if len(data) < _HEADER.size + 4:
        raise PageCorrupted("page too short")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise PageCorrupted("checksum mismatch")
    magic, ver, region, r, b, dinf, metric, epoch, fresh = _HEADER.unpack_from(body, 0)
    if magic != MAGIC or ver != VERSION:
        raise PageCorrupted(f"bad page header {magic!r} v{ver}")
    off = _HEADER.size
    vals = {}
    for name in _ARRAYS:
        (size,) = struct.unpack_from("<q", body, off)
        off += 8
        arr = np.frombuffer(body, dtype="<i8", count=size, offset=off)
        off += 8 * size
        vals[name] = arr.tolist()
    if off != len(body):
        raise PageCorrupted("trailing bytes in page")
    vals["inter"] = [bool(x) for x in vals["inter"]]
    rn = RegionNetwork(region, r, b, metric=_METRICS[metric], dinf=dinf, **vals)
    return RegionPage(rn, epoch, bool(fresh))


class Pager:
    """Keeps region pages in memory or, when streaming, in files on disk.

    In streaming mode at most one page may be resident: ``load`` fails if
    another page has not been saved back yet.
    """

    def __init__(self, stream: bool = False, tmpdir: str | None = None):
        self.stream = stream
        self.pages: dict[int, RegionPage] = {}
        self.resident: set[int] = set()
        self.max_resident = 0
        self.bytes_in = 0
        self.bytes_out = 0
        self._dir = None
        if stream:
            base = tmpdir or os.environ.get("REGIONFLOW_TMP") or None
            self._dir = tempfile.TemporaryDirectory(prefix="regionflow-", dir=base)

    def _path(self, k: int) -> str:
        return os.path.join(self._dir.name, f"region{k}.page")

    def store(self, page: RegionPage) -> None:
        """Initial placement of a page (not counted as pager traffic)."""
        k = page.rn.region
        if self.stream:
            with open(self._path(k), "wb") as fh:
                fh.write(pager_save(page))
        else:
            self.pages[k] = page

    def load(self, k: int) -> RegionPage:
        if self.stream and self.resident:
            raise RuntimeError(f"region {k} loaded while {sorted(self.resident)} resident")
        self.resident.add(k)
        self.max_resident = max(self.max_resident, len(self.resident))
        if not self.stream:
            return self.pages[k]
        try:
            with open(self._path(k), "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise PageCorrupted(f"cannot read page of region {k}: {exc}") from exc
        self.bytes_in += len(data)
        return pager_load(data)

    def save(self, page: RegionPage) -> None:
        k = page.rn.region
        self.resident.discard(k)
        if not self.stream:
            self.pages[k] = page
            return
        data = pager_save(page)
        self.bytes_out += len(data)
        with open(self._path(k), "wb") as fh:
            fh.write(data)

    def close(self) -> None:
        if self._dir is not None:
            self._dir.cleanup()
            self._dir = None
