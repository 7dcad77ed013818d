"""Binary and CSV file formats.

All binary formats are little-endian with float64 payloads.

``VCSD`` (scattered data)::

    "VCSD" u32 version, u32 d, u32 m, u64 n
    n*d position doubles, n*m value doubles (row-major)
    optional: "RANK" n*u64

``VCTJ`` (trajectories)::

    "VCTJ" u32 version, u32 T, u32 d, u32 m, u64 N
    T step times (double)
    N records: u64 id, u32 first, u32 last, then per alive step d position
    doubles followed by m value doubles

``VCRG`` (raster)::

    "VCRG" u32 version, u32 ndim, ndim*u64 dims, ndim origin doubles,
    ndim extent doubles, prod(dims) doubles in C order
"""

from __future__ import annotations

import csv
import io as _io
import os
import struct

import numpy as np

from .core import PointCloud, TrajectoryDataset, TrajectorySampleSet
from .errors import FormatError
from .evaluation import RasterGrid

VERSION = 1
_VCSD = struct.Struct("<4sIIIQ")
_VCTJ = struct.Struct("<4sIIIIQ")
_TJREC = struct.Struct("<QII")
_RANK = b"RANK"


class _Reader:
    """Bounds-checked cursor over a byte buffer."""

    def __init__(self, buf: bytes, what: str):
        self.buf = memoryview(buf)
        self.pos = 0
        self.what = what

    def take(self, size: int, label: str) -> memoryview:
        if size < 0 or self.pos + size > len(self.buf):
            raise FormatError(f"{self.what}: truncated while reading {label} "
                              f"(need {size} bytes, {len(self.buf) - self.pos} left)", self.pos)
        out = self.buf[self.pos:self.pos + size]
        self.pos += size
        return out

    def unpack(self, st: struct.Struct, label: str):
        return st.unpack(self.take(st.size, label))

    def doubles(self, count: int, label: str) -> np.ndarray:
        return np.frombuffer(self.take(8 * count, label), dtype="<f8").astype(np.float64)

    def remaining(self) -> int:
        return len(self.buf) - self.pos


def _check_magic(got: bytes, want: bytes, what: str) -> None:
    if got != want:
        raise FormatError(f"{what}: bad magic {bytes(got)!r}, expected {want!r}", 0)


def _check_version(v: int, what: str) -> None:
    if v != VERSION:
        raise FormatError(f"{what}: unsupported version {v}", 4)


def _read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# --- VCSD ------------------------------------------------------------------

def encode_vcsd(cloud: PointCloud, ranks=None) -> bytes:
    n, d, m = cloud.n, cloud.d, cloud.m
    parts = [_VCSD.pack(b"VCSD", VERSION, d, m, n),
             np.ascontiguousarray(cloud.positions, dtype="<f8").tobytes(),
             np.ascontiguousarray(cloud.values, dtype="<f8").tobytes()]
    if ranks is not None:
        ranks = np.asarray(ranks)
        if ranks.shape != (n,) or (ranks < 0).any():
            raise ValueError("ranks must be n non-negative integers")
        parts += [_RANK, ranks.astype("<u8").tobytes()]
    return b"".join(parts)


def decode_vcsd(buf: bytes, limit: int = None):
    """Parse a VCSD buffer; returns ``(cloud, ranks or None)``.

    With ``limit`` only the first ``limit`` records are returned, which for a
    rank-ordered file is the rank prefix.
    """
    r = _Reader(buf, "VCSD")
    magic, version, d, m, n = r.unpack(_VCSD, "header")
    _check_magic(magic, b"VCSD", "VCSD")
    _check_version(version, "VCSD")
    if d < 1:
        raise FormatError("VCSD: dimension must be at least 1", 8)
    k = n if limit is None else min(int(limit), n)
    pos_start = r.pos
    r.take(8 * n * d, "positions")
    val_start = r.pos
    r.take(8 * n * m, "values")
    positions = np.frombuffer(r.buf[pos_start:pos_start + 8 * k * d], dtype="<f8").reshape(k, d)
    values = np.frombuffer(r.buf[val_start:val_start + 8 * k * m], dtype="<f8").reshape(k, m)
    ranks = None
    if r.remaining():
        at = r.pos
        if bytes(r.take(4, "rank marker")) != _RANK:
            raise FormatError("VCSD: unexpected trailing bytes (expected RANK section)", at)
        raw = np.frombuffer(r.take(8 * n, "ranks"), dtype="<u8")
        ranks = raw[:k].astype(np.int64)
        if r.remaining():
            raise FormatError("VCSD: trailing bytes after RANK section", r.pos)
    return PointCloud(positions.astype(np.float64), values.astype(np.float64)), ranks


def write_vcsd(path, cloud: PointCloud, ranks=None) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_vcsd(cloud, ranks))


def read_vcsd(path, limit: int = None):
    """Read a VCSD file; see :func:`decode_vcsd`."""
    return decode_vcsd(_read_bytes(path), limit)


def read_vcsd_prefix(path, k: int) -> PointCloud:
    """Load only the first ``k`` records by seeking, without reading the whole file."""
    with open(path, "rb") as fh:
        head = fh.read(_VCSD.size)
        if len(head) < _VCSD.size:
            raise FormatError("VCSD: truncated while reading header", len(head))
        magic, version, d, m, n = _VCSD.unpack(head)
        _check_magic(magic, b"VCSD", "VCSD")
        _check_version(version, "VCSD")
        size = os.fstat(fh.fileno()).st_size
        need = _VCSD.size + 8 * n * (d + m)
        if size < need:
            raise FormatError("VCSD: truncated payload", size)
        k = min(int(k), n)
        pos = np.frombuffer(fh.read(8 * k * d), dtype="<f8").reshape(k, d)
        fh.seek(_VCSD.size + 8 * n * d)
        val = np.frombuffer(fh.read(8 * k * m), dtype="<f8").reshape(k, m)
    return PointCloud(pos.astype(np.float64), val.astype(np.float64))


# --- CSV point clouds ------------------------------------------------------

def read_csv_cloud(path) -> PointCloud:
    """Read a CSV with header ``x0..x{d-1},v0..v{m-1}``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError("CSV: empty file", 0)
    header = [h.strip() for h in rows[0]]
    xs = [i for i, h in enumerate(header) if h.startswith("x")]
    vs = [i for i, h in enumerate(header) if h.startswith("v")]
    if (not xs or [header[i] for i in xs] != [f"x{j}" for j in range(len(xs))]
            or [header[i] for i in vs] != [f"v{j}" for j in range(len(vs))]
            or len(xs) + len(vs) != len(header)):
        raise FormatError("CSV: header must be x0..x{d-1},v0..v{m-1}", 0)
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"CSV: {exc}", 0) from None
    data = data.reshape(-1, len(header))
    return PointCloud(data[:, xs], data[:, vs])


def write_csv_cloud(path, cloud: PointCloud) -> None:
    header = [f"x{j}" for j in range(cloud.d)] + [f"v{j}" for j in range(cloud.m)]
    np.savetxt(path, np.hstack([cloud.positions, cloud.values]), delimiter=",",
               header=",".join(header), comments="", fmt="%.17g")


def read_cloud(path) -> PointCloud:
    """Dispatch on extension: ``.csv`` is parsed as CSV, anything else as VCSD."""
    if str(path).lower().endswith(".csv"):
        return read_csv_cloud(path)
    return read_vcsd(path)[0]


# --- VCTJ ------------------------------------------------------------------

def encode_vctj(data: TrajectoryDataset) -> bytes:
    T, N, d, m = data.n_steps, data.n_trajectories, data.d, data.values.shape[2]
    out = _io.BytesIO()
    out.write(_VCTJ.pack(b"VCTJ", VERSION, T, d, m, N))
    out.write(np.asarray(data.times, dtype="<f8").tobytes())
    for k in range(N):
        a, b = int(data.start[k]), int(data.end[k])
        out.write(_TJREC.pack(int(data.ids[k]), a, b))
        block = np.hstack([data.positions[a:b + 1, k], data.values[a:b + 1, k]])
        out.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    return out.getvalue()


def decode_vctj(buf: bytes) -> TrajectoryDataset:
    r = _Reader(buf, "VCTJ")
    magic, version, T, d, m, N = r.unpack(_VCTJ, "header")
    _check_magic(magic, b"VCTJ", "VCTJ")
    _check_version(version, "VCTJ")
    if T < 1 or d < 1:
        raise FormatError("VCTJ: T and d must be at least 1", 8)
    times = r.doubles(T, "times")
    ids = np.empty(N, dtype=np.int64)
    start = np.empty(N, dtype=np.int64)
    end = np.empty(N, dtype=np.int64)
    pos = np.full((T, N, d), np.nan)
    val = np.full((T, N, m), np.nan)
    for k in range(N):
        at = r.pos
        tid, a, b = r.unpack(_TJREC, f"record {k}")
        if not a <= b < T:
            raise FormatError(f"VCTJ: record {k} has invalid step range [{a}, {b}]", at + 8)
        block = r.doubles((b - a + 1) * (d + m), f"record {k} payload").reshape(b - a + 1, d + m)
        ids[k], start[k], end[k] = tid, a, b
        pos[a:b + 1, k] = block[:, :d]
        val[a:b + 1, k] = block[:, d:]
    if r.remaining():
        raise FormatError("VCTJ: trailing bytes", r.pos)
    return TrajectoryDataset(times, ids, start, end, pos, val)


def write_vctj(path, data: TrajectoryDataset) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_vctj(data))


def read_vctj(path) -> TrajectoryDataset:
    return decode_vctj(_read_bytes(path))


def write_segments_csv(path, result: TrajectorySampleSet) -> None:
    np.savetxt(path, result.segments, delimiter=",", header="id,first,last", comments="", fmt="%d")


def read_segments_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2).reshape(-1, 3)


# --- VCRG ------------------------------------------------------------------

def encode_vcrg(raster: RasterGrid) -> bytes:
    nd = raster.values.ndim
    return b"".join([
        struct.pack("<4sII", b"VCRG", VERSION, nd),
        np.asarray(raster.values.shape, dtype="<u8").tobytes(),
        np.asarray(raster.origin, dtype="<f8").tobytes(),
        np.asarray(raster.extent, dtype="<f8").tobytes(),
        np.ascontiguousarray(raster.values, dtype="<f8").tobytes(),
    ])


def decode_vcrg(buf: bytes, expect_dims=None) -> RasterGrid:
    r = _Reader(buf, "VCRG")
    magic, version, nd = r.unpack(struct.Struct("<4sII"), "header")
    _check_magic(magic, b"VCRG", "VCRG")
    _check_version(version, "VCRG")
    if nd < 1:
        raise FormatError("VCRG: ndim must be at least 1", 8)
    at = r.pos
    dims = tuple(int(x) for x in np.frombuffer(r.take(8 * nd, "dims"), dtype="<u8"))
    if expect_dims is not None and tuple(expect_dims) != dims:
        raise FormatError(f"VCRG: dims {dims} do not match expected {tuple(expect_dims)}", at)
    origin = r.doubles(nd, "origin")
    extent = r.doubles(nd, "extent")
    values = r.doubles(int(np.prod(dims)), "values").reshape(dims)
    if r.remaining():
        raise FormatError("VCRG: trailing bytes", r.pos)
    return RasterGrid(values, origin, extent)


def write_vcrg(path, raster: RasterGrid) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_vcrg(raster))


def read_vcrg(path, expect_dims=None) -> RasterGrid:
    return decode_vcrg(_read_bytes(path), expect_dims)


def write_raster_csv(path, raster: RasterGrid, precision: int = 10) -> None:
    """Plain-text raster: one row per cell with its center coordinates and value."""
    centers = raster.cell_centers()
    nd = centers.shape[1]
    meta = (f"# dims={','.join(map(str, raster.resolution))}"
            f" origin={','.join(repr(float(v)) for v in raster.origin)}"
            f" extent={','.join(repr(float(v)) for v in raster.extent)}")
    header = ",".join([f"x{j}" for j in range(nd)] + ["value"])
    np.savetxt(path, np.hstack([centers, raster.values.reshape(-1, 1)]), delimiter=",",
               header=meta + "\n" + header, comments="", fmt=f"%.{precision}g")


def read_raster_csv(path) -> RasterGrid:
    with open(path) as fh:
        meta = fh.readline()
    if not meta.startswith("# dims="):
        raise FormatError("raster CSV: missing metadata line", 0)
    fields = dict(tok.split("=", 1) for tok in meta[2:].split())
    dims = tuple(int(v) for v in fields["dims"].split(","))
    origin = [float(v) for v in fields["origin"].split(",")]
    extent = [float(v) for v in fields["extent"].split(",")]
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    if data.shape[0] != int(np.prod(dims)):
        raise FormatError("raster CSV: row count does not match dims", 0)
    return RasterGrid(data[:, -1].reshape(dims), origin, extent)
