"""Local kernel-weighted value entropy and the derived importance PMF."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .core import PointCloud
from .errors import InvalidArgument
from .grid import UniformGrid, dist
from .kernel import KernelSpec, cubic_spline

_CHUNK = 256


@dataclass(frozen=True, eq=False)
class ImportancePMF:
    probabilities: np.ndarray
    source: str = "custom"

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InvalidArgument("probabilities must be finite and non-negative")
        total = p.sum()
        if total <= 0:
            raise InvalidArgument("probabilities must not all be zero")
        if abs(total - 1.0) > 1e-9:
            p = p / total
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return len(self.probabilities)


def value_bins(values: np.ndarray, n_bins: int) -> np.ndarray:
    """Bin index of each value over the global range; the maximum lands in the last bin."""
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.zeros(len(values), dtype=np.int64)
    b = np.floor(n_bins * (values - lo) / (hi - lo))
    return np.clip(b, 0, n_bins - 1).astype(np.int64)


@numba.njit(cache=True, parallel=True)
def _local_entropy(positions, point_ids, offsets, point_cell, nbr, h, bins, n_bins, out):
    n = positions.shape[0]
    nchunks = (n + _CHUNK - 1) // _CHUNK
    log2_max = math.log2(n_bins)
    for ch in numba.prange(nchunks):
        hist = np.zeros(n_bins)
        for p in range(ch * _CHUNK, min(n, (ch + 1) * _CHUNK)):
            hist[:] = 0.0
            total = 0.0
            c = point_cell[p]
            for t in range(nbr.shape[1]):
                cc = nbr[c, t]
                if cc < 0:
                    break
                for k in range(offsets[cc], offsets[cc + 1]):
                    j = point_ids[k]
                    r = dist(positions, p, j)
                    if r < h:
                        w = cubic_spline(r, h)
                        hist[bins[j]] += w
                        total += w
            H = 0.0
            for b in range(n_bins):
                if hist[b] > 0.0:
                    q = hist[b] / total
                    H -= q * math.log2(q)
            out[p] = min(max(H, 0.0), log2_max)


def local_entropy(cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec,
                  value_dim: int, n_bins: int = 64) -> np.ndarray:
    """Shannon entropy (bits) of the kernel-weighted neighborhood histogram of one value dimension."""
    if n_bins < 2:
        raise InvalidArgument("n_bins must be >= 2")
    if not 0 <= value_dim < cloud.m:
        raise InvalidArgument(f"value_dim {value_dim} out of range for m={cloud.m}")
    vals = cloud.values[:, value_dim]
    out = np.zeros(cloud.n)
    if vals.max() <= vals.min():
        return out
    bins = value_bins(vals, n_bins)
    _local_entropy(grid.positions, grid.point_ids, grid.cell_offsets, grid.point_cell,
                   grid.neighbor_cells, kernel.support, bins, n_bins, out)
    return out


def importance_from_entropy(H: np.ndarray, n_bins: int) -> ImportancePMF:
    unnormalized = np.exp2(H) / n_bins
    return ImportancePMF(unnormalized / unnormalized.sum(), source="entropy")


def entropy_importance(cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec,
                       dims=None, n_bins: int = 64) -> ImportancePMF:
    """PMF proportional to ``2^H / n_bins``, ``H`` the max entropy over ``dims`` (default: all)."""
    if dims is None:
        dims = range(cloud.m)
    dims = list(dims)
    if not dims:
        raise InvalidArgument("entropy importance needs at least one value dimension")
    H = np.max([local_entropy(cloud, grid, kernel, k, n_bins) for k in dims], axis=0)
    return importance_from_entropy(H, n_bins)
