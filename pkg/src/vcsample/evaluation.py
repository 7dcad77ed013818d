"""Reconstruction quality and spectral analysis of sample sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.spatial import cKDTree

from .core import PointCloud, SampleResult, default_kernel_size
from .errors import ShapeMismatch, UnsupportedDimension, InvalidArgument
from .grid import build_grid, query_cells
from .kernel import cubic_spline, scaled_kernel_size

N_ANNULI = 64


@dataclass(eq=False)
class RasterGrid:
    """Values on a regular grid of cell centers; ``values.shape == resolution``."""

    values: np.ndarray
    origin: np.ndarray
    extent: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.origin = np.asarray(self.origin, dtype=np.float64).reshape(-1)
        self.extent = np.asarray(self.extent, dtype=np.float64).reshape(-1)
        if len(self.origin) != self.values.ndim or len(self.extent) != self.values.ndim:
            raise ShapeMismatch("origin/extent must have one entry per grid axis")

    @property
    def resolution(self) -> tuple:
        return self.values.shape

    def cell_centers(self) -> np.ndarray:
        axes = [self.origin[a] + (np.arange(r) + 0.5) * self.extent[a] / r
                for a, r in enumerate(self.resolution)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def __eq__(self, other):
        if not isinstance(other, RasterGrid):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.origin, other.origin)
                and np.array_equal(self.extent, other.extent))

    __hash__ = None


def raster_like(bounds, resolution) -> RasterGrid:
    bounds = np.asarray(bounds, dtype=np.float64)
    d = bounds.shape[0]
    res = (resolution,) * d if np.ndim(resolution) == 0 else tuple(resolution)
    if min(res) < 2:
        raise InvalidArgument("raster resolution must be at least 2 per axis")
    return RasterGrid(np.zeros(res), bounds[:, 0], bounds[:, 1] - bounds[:, 0])


@numba.njit(cache=True, parallel=True)
def _shepard(queries, positions, point_ids, offsets, origin, cell_size, dims, bits, keys,
             h, weights, values, out, denom):
    d = queries.shape[1]
    ncell = 1
    for a in range(d):
        ncell *= 3
    for qi in numba.prange(queries.shape[0]):
        cells = np.empty(ncell, dtype=np.int64)
        nc = query_cells(queries[qi], origin, cell_size, dims, bits, keys, cells)
        num = 0.0
        den = 0.0
        for t in range(nc):
            cc = cells[t]
            for k in range(offsets[cc], offsets[cc + 1]):
                j = point_ids[k]
                s = 0.0
                for a in range(d):
                    diff = queries[qi, a] - positions[j, a]
                    s += diff * diff
                r = math.sqrt(s)
                if r < h:
                    w = weights[j] * cubic_spline(r, h)
                    num += w * values[j]
                    den += w
        denom[qi] = den
        out[qi] = num / den if den > 0.0 else 0.0


def reconstruct(cloud: PointCloud, samples: SampleResult, resolution, kernel_size: float = None,
                bounds=None, value_dim: int = 0) -> RasterGrid:
    """Kernel-weighted (Shepard) interpolation of sampled values onto a raster.

    Sample weights from ``samples`` scale each contribution. Cells outside
    every kernel take the value of the nearest sample.
    """
    idx = samples.indices_by_rank
    if len(idx) == 0:
        raise InvalidArgument("cannot reconstruct from an empty sample set")
    if kernel_size is None:
        kernel_size = samples.kernel_size_used
        if not (kernel_size and math.isfinite(kernel_size)):
            kernel_size = scaled_kernel_size(default_kernel_size(cloud), cloud.n, len(idx), cloud.d)
    raster = raster_like(cloud.bbox if bounds is None else bounds, resolution)
    queries = raster.cell_centers()
    pos = np.ascontiguousarray(cloud.positions[idx])
    vals = np.ascontiguousarray(cloud.values[idx, value_dim])
    lo = np.minimum(pos.min(axis=0), queries.min(axis=0))
    hi = np.maximum(pos.max(axis=0), queries.max(axis=0))
    grid = build_grid(pos, kernel_size, origin=lo, upper=hi)
    out = np.empty(len(queries))
    den = np.empty(len(queries))
    _shepard(queries, grid.positions, grid.point_ids, grid.cell_offsets, grid.origin,
             grid.cell_size, grid.dims, grid.bits, grid.keys, float(kernel_size),
             np.ascontiguousarray(samples.weights, dtype=np.float64), vals, out, den)
    empty = den <= 0
    if empty.any():
        _, nearest = cKDTree(pos).query(queries[empty])
        out[empty] = vals[nearest]
    raster.values = out.reshape(raster.resolution)
    return raster


def snr_db(reference: RasterGrid, reconstruction: RasterGrid) -> float:
    """``10 log10(sum ref^2 / sum (ref - rec)^2)``; ``inf`` for a perfect match."""
    ref = reference.values if isinstance(reference, RasterGrid) else np.asarray(reference)
    rec = reconstruction.values if isinstance(reconstruction, RasterGrid) else np.asarray(reconstruction)
    if ref.shape != rec.shape:
        raise ShapeMismatch(f"resolution {ref.shape} vs {rec.shape}")
    noise = np.sum((ref - rec) ** 2)
    if noise == 0:
        return math.inf
    return float(10.0 * np.log10(np.sum(ref ** 2) / noise))


@dataclass(eq=False)
class RadialProfile:
    radius: np.ndarray
    power: np.ndarray
    counts: np.ndarray

    def band(self, lo: float, hi: float) -> float:
        """Mean power over annuli whose index fraction lies in ``[lo, hi)``."""
        n = len(self.power)
        a, b = int(round(lo * n)), int(round(hi * n))
        sel = slice(a, max(b, a + 1))
        c = self.counts[sel]
        # annuli with no frequencies (e.g. the DC-only first ring) carry NaN power
        return float(np.sum(np.where(c > 0, self.power[sel], 0.0) * c) / np.sum(c))


def radial_profile(power: np.ndarray, n_annuli: int = N_ANNULI) -> RadialProfile:
    """Average an unshifted 2-D power spectrum over annuli up to the Nyquist radius; DC excluded."""
    ny, nx = power.shape
    fy = np.fft.fftfreq(ny) * ny
    fx = np.fft.fftfreq(nx) * nx
    r = np.hypot(fy[:, None], fx[None, :])
    r_max = min(nx, ny) / 2.0
    ring = np.floor(r / r_max * n_annuli).astype(np.int64)
    valid = (r > 0) & (ring < n_annuli)
    counts = np.bincount(ring[valid], minlength=n_annuli)
    total = np.bincount(ring[valid], weights=power[valid], minlength=n_annuli)
    with np.errstate(invalid="ignore"):
        mean = total / counts
    centers = (np.arange(n_annuli) + 0.5) * r_max / n_annuli
    return RadialProfile(centers, mean, counts)


def sample_spectrum(positions, resolution: int, bounds=None, n_annuli: int = N_ANNULI):
    """Power spectrum of the binned sample indicator and its radial average.

    Power is normalized by the sample count, so white noise sits near 1.
    Returns ``(RasterGrid of centered power, RadialProfile)``.
    """
    positions = np.asarray(positions, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise UnsupportedDimension("spectra are only computed for 2-D samples")
    if bounds is None:
        bounds = np.stack([positions.min(axis=0), positions.max(axis=0)], axis=1)
    bounds = np.asarray(bounds, dtype=np.float64)
    counts, _, _ = np.histogram2d(positions[:, 0], positions[:, 1], bins=resolution,
                                  range=[tuple(bounds[0]), tuple(bounds[1])])
    power = np.abs(np.fft.fft2(counts)) ** 2 / max(1, len(positions))
    power[0, 0] = 0.0
    profile = radial_profile(power, n_annuli)
    # axes in cycles per domain length, zero frequency at the center
    half = np.array(power.shape, dtype=np.float64) / 2.0
    grid = RasterGrid(np.fft.fftshift(power), -half, 2.0 * half)
    return grid, profile
