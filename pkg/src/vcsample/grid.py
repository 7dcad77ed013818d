"""Uniform grid with Morton-ordered buckets for fixed-radius neighbor queries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import GridTooFine, InvalidArgument, RadiusExceedsCell


def max_cells_per_axis(d: int) -> int:
    # keeps the interleaved code inside 63 bits
    return 2 ** min(20, 63 // d)


def morton_encode(coords: np.ndarray, bits: int) -> np.ndarray:
    """Interleave the bits of integer cell coordinates, axis 0 least significant."""
    coords = np.asarray(coords, dtype=np.uint64)
    if coords.ndim == 1:
        coords = coords[None, :]
    d = coords.shape[1]
    code = np.zeros(coords.shape[0], dtype=np.uint64)
    for b in range(bits):
        for a in range(d):
            bit = (coords[:, a] >> np.uint64(b)) & np.uint64(1)
            code |= bit << np.uint64(b * d + a)
    return code.astype(np.int64)


def morton_decode(codes, d: int, bits: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.uint64).reshape(-1)
    out = np.zeros((codes.shape[0], d), dtype=np.int64)
    for b in range(bits):
        for a in range(d):
            bit = (codes >> np.uint64(b * d + a)) & np.uint64(1)
            out[:, a] |= (bit << np.uint64(b)).astype(np.int64)
    return out


def _offsets(d: int) -> np.ndarray:
    """All ``3^d`` offset vectors in {-1, 0, 1}^d, in a fixed order."""
    grids = np.meshgrid(*([np.array([-1, 0, 1])] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


@dataclass(frozen=True, eq=False)
class UniformGrid:
    """Points bucketed into cubic cells of edge ``cell_size``.

    Only occupied cells are stored. They are sorted by Morton code (``keys``),
    and ``point_ids[cell_offsets[c]:cell_offsets[c+1]]`` lists the points of
    occupied cell ``c`` in ascending index order. ``neighbor_cells[c]`` holds
    the occupied cells among the ``3^d`` block around ``c`` (``-1`` padded).
    """

    positions: np.ndarray
    origin: np.ndarray
    cell_size: float
    dims: np.ndarray
    bits: int
    keys: np.ndarray
    cell_offsets: np.ndarray
    point_ids: np.ndarray
    point_cell: np.ndarray
    neighbor_cells: np.ndarray

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def n_cells(self) -> int:
        return len(self.keys)

    def bucket(self, c: int) -> np.ndarray:
        return self.point_ids[self.cell_offsets[c]:self.cell_offsets[c + 1]]

    def cell_coords(self, q) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q, dtype=np.float64))
        c = np.floor((q - self.origin) / self.cell_size)
        c = np.clip(c, 0, self.dims - 1)
        return c.astype(np.int64)

    def arrays(self):
        """Arrays consumed by the compiled kernels."""
        return (self.positions, self.point_ids, self.cell_offsets,
                self.point_cell, self.neighbor_cells)


def build_grid(positions, cell_size: float, origin=None, upper=None) -> UniformGrid:
    """Bucket ``positions`` into a grid of ``cell_size`` covering their bounding box."""
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    if not (cell_size > 0 and math.isfinite(cell_size)):
        raise InvalidArgument(f"cell_size must be positive, got {cell_size}")
    n, d = pos.shape
    lo = pos.min(axis=0) if origin is None else np.asarray(origin, dtype=np.float64)
    hi = pos.max(axis=0) if upper is None else np.asarray(upper, dtype=np.float64)
    cap = max_cells_per_axis(d)
    span = (hi - lo) / cell_size
    if np.any(span >= cap):
        raise GridTooFine(f"cell_size {cell_size} needs more than {cap} cells per axis")
    dims = np.maximum(1, np.ceil(span)).astype(np.int64)
    bits = max(1, int(math.ceil(math.log2(int(dims.max())))))

    coords = np.floor((pos - lo) / cell_size)
    coords = np.clip(coords, 0, dims - 1).astype(np.int64)
    codes = morton_encode(coords, bits)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    keys, starts = np.unique(sorted_codes, return_index=True)
    offsets = np.append(starts, n).astype(np.int64)
    point_cell = np.empty(n, dtype=np.int64)
    point_cell[order] = np.searchsorted(keys, sorted_codes)

    cell_coords = coords[order[starts]]
    nb = cell_coords[:, None, :] + _offsets(d)[None, :, :]
    inside = np.all((nb >= 0) & (nb < dims), axis=2)
    nb_codes = morton_encode(np.clip(nb, 0, dims - 1).reshape(-1, d), bits).reshape(inside.shape)
    loc = np.minimum(np.searchsorted(keys, nb_codes), len(keys) - 1)
    found = inside & (keys[loc] == nb_codes)
    neighbor_cells = np.where(found, loc, -1)
    # compact so valid entries come first; order stays the fixed offset order
    key = np.where(found, 0, 1)
    perm = np.argsort(key, axis=1, kind="stable")
    neighbor_cells = np.take_along_axis(neighbor_cells, perm, axis=1)

    return UniformGrid(pos, lo, float(cell_size), dims, bits, keys,
                       offsets, order.astype(np.int64), point_cell,
                       np.ascontiguousarray(neighbor_cells, dtype=np.int64))


def _cells_around(grid: UniformGrid, q) -> np.ndarray:
    c = grid.cell_coords(q)[0]
    nb = c[None, :] + _offsets(grid.d)
    nb = nb[np.all((nb >= 0) & (nb < grid.dims), axis=1)]
    codes = morton_encode(nb, grid.bits)
    loc = np.minimum(np.searchsorted(grid.keys, codes), grid.n_cells - 1)
    return loc[grid.keys[loc] == codes]


def neighbors(grid: UniformGrid, q, radius: float) -> np.ndarray:
    """Indices ``i`` with ``|q - p_i| < radius``, ascending."""
    if radius > grid.cell_size:
        raise RadiusExceedsCell(f"radius {radius} exceeds cell size {grid.cell_size}")
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    cells = _cells_around(grid, q)
    if len(cells) == 0:
        return np.empty(0, dtype=np.int64)
    cand = np.concatenate([grid.bucket(c) for c in cells])
    diff = grid.positions[cand] - q
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return np.sort(cand[dist < radius])


@numba.njit(cache=True, inline="always")
def dist(positions, i, j):
    s = 0.0
    for a in range(positions.shape[1]):
        t = positions[i, a] - positions[j, a]
        s += t * t
    return math.sqrt(s)


@numba.njit(cache=True)
def query_cells(q, origin, cell_size, dims, bits, keys, out):
    """Occupied cells in the 3^d block around ``q``; writes into ``out``, returns count."""
    d = q.shape[0]
    base = np.empty(d, dtype=np.int64)
    for a in range(d):
        c = math.floor((q[a] - origin[a]) / cell_size)
        if c < 0:
            c = 0
        if c > dims[a] - 1:
            c = dims[a] - 1
        base[a] = c
    total = 1
    for a in range(d):
        total *= 3
    count = 0
    nk = keys.shape[0]
    for o in range(total):
        rem = o
        code = 0
        ok = True
        coord = np.empty(d, dtype=np.int64)
        for a in range(d):
            coord[a] = base[a] + (rem % 3) - 1
            rem //= 3
            if coord[a] < 0 or coord[a] >= dims[a]:
                ok = False
        if not ok:
            continue
        for b in range(bits):
            for a in range(d):
                code |= ((coord[a] >> b) & 1) << (b * d + a)
        loc = np.searchsorted(keys, code)
        if loc < nk and keys[loc] == code:
            out[count] = loc
            count += 1
    return count
