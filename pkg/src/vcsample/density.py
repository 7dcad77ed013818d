"""Point density and the incrementally maintained sample density.

The sample-density numerator of a point is always re-gathered from its
sampled neighbors in a fixed order (cells in grid order, points by index
inside a cell). The stored value is therefore a pure function of the current
sample set: add/remove round-trips are bit-exact, and batched and sequential
selection see identical densities.
"""

from __future__ import annotations

import numba
import numpy as np

from .core import PointCloud
from .errors import AlreadySampled, ConfigMismatch, InvalidArgument, NotSampled
from .grid import UniformGrid, dist, neighbors
from .kernel import KernelSpec, cubic_spline

IMPORTANCE_FLOOR = 1e-12


@numba.njit(cache=True, parallel=True)
def _point_density(positions, point_ids, offsets, point_cell, nbr, h, out):
    n = positions.shape[0]
    for p in numba.prange(n):
        c = point_cell[p]
        acc = 0.0
        for t in range(nbr.shape[1]):
            cc = nbr[c, t]
            if cc < 0:
                break
            for k in range(offsets[cc], offsets[cc + 1]):
                j = point_ids[k]
                r = dist(positions, p, j)
                if r < h:
                    acc += cubic_spline(r, h)
        out[p] = acc


@numba.njit(cache=True)
def _gather_numerator(p, positions, offsets, point_cell, nbr, slots, counts, h):
    c = point_cell[p]
    acc = 0.0
    for t in range(nbr.shape[1]):
        cc = nbr[c, t]
        if cc < 0:
            break
        base = offsets[cc]
        for k in range(base, base + counts[cc]):
            j = slots[k]
            r = dist(positions, p, j)
            if r < h:
                acc += cubic_spline(r, h)
    return acc


@numba.njit(cache=True)
def _insert_slot(s, offsets, point_cell, slots, counts):
    c = point_cell[s]
    base = offsets[c]
    k = base + counts[c]
    while k > base and slots[k - 1] > s:
        slots[k] = slots[k - 1]
        k -= 1
    slots[k] = s
    counts[c] += 1


@numba.njit(cache=True)
def _remove_slot(s, offsets, point_cell, slots, counts):
    c = point_cell[s]
    base = offsets[c]
    end = base + counts[c]
    k = base
    while slots[k] != s:
        k += 1
    while k < end - 1:
        slots[k] = slots[k + 1]
        k += 1
    counts[c] -= 1


@numba.njit(cache=True)
def _affected(sources, positions, point_ids, offsets, point_cell, nbr, h, mark):
    """Points within ``h`` of any source, each listed once, in discovery order."""
    out = np.empty(positions.shape[0], dtype=np.int64)
    m = 0
    for si in range(sources.shape[0]):
        s = sources[si]
        c = point_cell[s]
        for t in range(nbr.shape[1]):
            cc = nbr[c, t]
            if cc < 0:
                break
            for k in range(offsets[cc], offsets[cc + 1]):
                q = point_ids[k]
                if mark[q]:
                    continue
                if dist(positions, s, q) < h:
                    mark[q] = True
                    out[m] = q
                    m += 1
    for i in range(m):
        mark[out[i]] = False
    return out[:m]


@numba.njit(cache=True, parallel=True)
def _regather(targets, positions, offsets, point_cell, nbr, slots, counts, h, num):
    for i in numba.prange(targets.shape[0]):
        p = targets[i]
        num[p] = _gather_numerator(p, positions, offsets, point_cell, nbr, slots, counts, h)


@numba.njit(cache=True)
def apply_samples(ids, add, positions, point_ids, offsets, point_cell, nbr,
                  slots, counts, sampled, h, num, mark):
    """Add (or remove) every id in ``ids`` and refresh affected numerators.

    Returns the affected point ids.
    """
    for i in range(ids.shape[0]):
        s = ids[i]
        if add:
            _insert_slot(s, offsets, point_cell, slots, counts)
            sampled[s] = True
        else:
            _remove_slot(s, offsets, point_cell, slots, counts)
            sampled[s] = False
    targets = _affected(ids, positions, point_ids, offsets, point_cell, nbr, h, mark)
    _regather(targets, positions, offsets, point_cell, nbr, slots, counts, h, num)
    return targets


class DensityField:
    """Per-point density ``rho_P`` and sample-density numerator.

    ``sample_density() = numerator / point_density``. Mutated only through
    :meth:`add_sample`, :meth:`remove_sample` and :meth:`add_samples`.
    """

    def __init__(self, grid: UniformGrid, kernel: KernelSpec, point_density: np.ndarray,
                 raw_point_density: np.ndarray = None, importance: np.ndarray = None):
        self.grid = grid
        self.kernel = kernel
        self.point_density = np.ascontiguousarray(point_density, dtype=np.float64)
        self.raw_point_density = (self.point_density if raw_point_density is None
                                  else raw_point_density)
        self.importance = importance
        n = grid.n
        self.numerator = np.zeros(n)
        self.sampled = np.zeros(n, dtype=np.bool_)
        self._slots = np.full(n, -1, dtype=np.int64)
        self._counts = np.zeros(grid.n_cells, dtype=np.int64)
        self._mark = np.zeros(n, dtype=np.bool_)
        self.last_affected = np.empty(0, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def sample_count(self) -> int:
        return int(self._counts.sum())

    def copy(self) -> "DensityField":
        other = DensityField.__new__(DensityField)
        other.__dict__.update(self.__dict__)
        for name in ("numerator", "sampled", "_slots", "_counts", "_mark"):
            setattr(other, name, getattr(self, name).copy())
        return other

    def _apply(self, ids: np.ndarray, add: bool) -> np.ndarray:
        g = self.grid
        self.last_affected = apply_samples(ids, add, g.positions, g.point_ids, g.cell_offsets, g.point_cell,
                             g.neighbor_cells, self._slots, self._counts, self.sampled,
                             self.kernel.support, self.numerator, self._mark)
        return self.last_affected

    def add_sample(self, s: int) -> np.ndarray:
        s = int(s)
        if self.sampled[s]:
            raise AlreadySampled(f"point {s} is already a sample")
        return self._apply(np.array([s], dtype=np.int64), True)

    def remove_sample(self, s: int) -> np.ndarray:
        s = int(s)
        if not self.sampled[s]:
            raise NotSampled(f"point {s} is not a sample")
        return self._apply(np.array([s], dtype=np.int64), False)

    def add_samples(self, ids) -> np.ndarray:
        """Add several samples at once; returns the points whose numerator changed."""
        ids = np.ascontiguousarray(ids, dtype=np.int64)
        if len(np.unique(ids)) != len(ids) or self.sampled[ids].any():
            raise AlreadySampled("batch contains duplicates or existing samples")
        return self._apply(ids, True)

    def sample_density_at(self, p: int) -> float:
        return float(self.numerator[p] / self.point_density[p])

    def sample_density(self) -> np.ndarray:
        return self.numerator / self.point_density

    def neighborhood(self, p: int) -> np.ndarray:
        return neighbors(self.grid, self.grid.positions[p], self.kernel.support)


def compute_point_density(cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec,
                          importance=None) -> DensityField:
    """Kernel-summed point density, optionally scaled by an importance PMF."""
    if grid.cell_size < kernel.support:
        raise ConfigMismatch(
            f"grid cell size {grid.cell_size} is smaller than kernel support {kernel.support}")
    if grid.n != cloud.n or grid.d != cloud.d:
        raise ConfigMismatch("grid was built for a different point cloud")
    rho = np.empty(cloud.n)
    _point_density(grid.positions, grid.point_ids, grid.cell_offsets, grid.point_cell,
                   grid.neighbor_cells, kernel.support, rho)
    if importance is None:
        return DensityField(grid, kernel, rho)
    imp = np.asarray(getattr(importance, "probabilities", importance), dtype=np.float64)
    if imp.shape != (cloud.n,) or np.any(imp < 0) or not np.all(np.isfinite(imp)):
        raise InvalidArgument("importance must be a finite non-negative value per point")
    imp = np.maximum(imp, IMPORTANCE_FLOOR / cloud.n)
    return DensityField(grid, kernel, rho * imp, raw_point_density=rho, importance=imp)
