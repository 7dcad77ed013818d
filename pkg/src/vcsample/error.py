"""Local value-distribution error: kernel-weighted CDFs compared by 1-D Wasserstein distance."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from .core import PointCloud, SampleResult, SamplerConfig, default_kernel_size
from .errors import EmptyLocalSample, InvalidArgument, NoValueDimensions
from .grid import UniformGrid, build_grid, dist, neighbors
from .kernel import KernelSpec, cubic_spline, eval_kernel, scaled_kernel_size

log = logging.getLogger(__name__)

HISTOGRAM_BINS = 256


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous CDF: 0 left of ``x[0]``, ``F[i]`` on ``[x[i], x[i+1])``, 1 after."""

    x: np.ndarray
    F: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        i = np.searchsorted(self.x, t, side="right") - 1
        out = np.where(i >= 0, self.F[np.maximum(i, 0)], 0.0)
        return float(out) if out.ndim == 0 else out


def step_function(values, weights) -> StepFunction:
    """Weighted empirical CDF of ``values``."""
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    total = weights.sum()
    if not total > 0:
        raise EmptyLocalSample("no positive weight to build a CDF from")
    order = np.argsort(values, kind="stable")
    x = values[order]
    F = np.cumsum(weights[order]) / total
    # collapse repeated values onto their last cumulative level
    last = np.append(x[1:] != x[:-1], True)
    return StepFunction(x[last], F[last])


def weighted_cdf(cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec, p: int, dim: int,
                 subset=None) -> StepFunction:
    """CDF of value ``dim`` around point ``p``, each neighbor weighted by the kernel.

    With ``subset`` (indices or boolean mask) only those neighbors contribute.
    """
    if not 0 <= dim < cloud.m:
        raise InvalidArgument(f"value dimension {dim} out of range for m={cloud.m}")
    nb = neighbors(grid, cloud.positions[p], kernel.support)
    if subset is not None:
        mask = _as_mask(subset, cloud.n)
        nb = nb[mask[nb]]
    if len(nb) == 0:
        raise EmptyLocalSample(f"point {p} has no contributing neighbors")
    r = np.linalg.norm(cloud.positions[nb] - cloud.positions[p], axis=1)
    return step_function(cloud.values[nb, dim], eval_kernel(kernel, r))


def wasserstein_1d(F: StepFunction, G: StepFunction) -> float:
    """``integral |F - G| dx``, exact for step functions."""
    xs = np.union1d(F.x, G.x)
    if len(xs) < 2:
        return 0.0
    diff = np.abs(F(xs[:-1]) - G(xs[:-1]))
    return float(np.sum(diff * np.diff(xs)))


def _as_mask(samples, n: int) -> np.ndarray:
    samples = np.asarray(samples)
    if samples.dtype == np.bool_:
        if samples.shape != (n,):
            raise InvalidArgument("sample mask must have one entry per point")
        return samples
    mask = np.zeros(n, dtype=np.bool_)
    mask[samples.astype(np.int64)] = True
    return mask


@numba.njit(cache=True, parallel=True)
def _local_errors(targets, positions, point_ids, offsets, point_cell, nbr, h, values, sampled,
                  lo, width, n_hist, out):
    """Fill ``out[p, :]`` for every ``p`` in ``targets``.

    ``n_hist == 0`` integrates the exact step functions; otherwise CDFs are
    histogrammed over ``n_hist`` bins spanning each dimension's global range.
    """
    m = values.shape[1]
    for ti in numba.prange(targets.shape[0]):
        p = targets[ti]
        c = point_cell[p]
        cap = 0
        for t in range(nbr.shape[1]):
            cc = nbr[c, t]
            if cc < 0:
                break
            cap += offsets[cc + 1] - offsets[cc]
        js = np.empty(cap, dtype=np.int64)
        ws = np.empty(cap)
        cnt = 0
        tot_s = 0.0
        for t in range(nbr.shape[1]):
            cc = nbr[c, t]
            if cc < 0:
                break
            for k in range(offsets[cc], offsets[cc + 1]):
                j = point_ids[k]
                r = dist(positions, p, j)
                if r < h:
                    w = cubic_spline(r, h)
                    js[cnt] = j
                    ws[cnt] = w
                    cnt += 1
                    if sampled[j]:
                        tot_s += w
        for dim in range(m):
            if tot_s == 0.0:
                out[p, dim] = width[dim]
                continue
            if n_hist == 0:
                vals = np.empty(cnt)
                for t in range(cnt):
                    vals[t] = values[js[t], dim]
                order = np.argsort(vals, kind="mergesort")
                # F - G = (cu S - cs U) / (P S) with u the unsampled weight; this
                # avoids cancelling two CDFs near 1 when most neighbors are sampled
                S = 0.0
                U = 0.0
                for t in range(cnt):
                    a = order[t]
                    if sampled[js[a]]:
                        S += ws[a]
                    else:
                        U += ws[a]
                scale = 1.0 / ((S + U) * S)
                cu = 0.0
                cs = 0.0
                W = 0.0
                for t in range(cnt - 1):
                    a = order[t]
                    if sampled[js[a]]:
                        cs += ws[a]
                    else:
                        cu += ws[a]
                    gap = vals[order[t + 1]] - vals[a]
                    if gap > 0.0:
                        W += abs(cu * S - cs * U) * scale * gap
                out[p, dim] = W
            else:
                hu = np.zeros(n_hist)
                hs = np.zeros(n_hist)
                for t in range(cnt):
                    j = js[t]
                    if width[dim] > 0.0:
                        b = int(np.floor(n_hist * (values[j, dim] - lo[dim]) / width[dim]))
                        b = min(max(b, 0), n_hist - 1)
                    else:
                        b = 0
                    if sampled[j]:
                        hs[b] += ws[t]
                    else:
                        hu[b] += ws[t]
                S = hs.sum()
                U = hu.sum()
                scale = width[dim] / n_hist / ((S + U) * S)
                cu = 0.0
                cs = 0.0
                W = 0.0
                for b in range(n_hist - 1):
                    cu += hu[b]
                    cs += hs[b]
                    W += abs(cu * S - cs * U) * scale
                out[p, dim] = W


@dataclass(eq=False)
class ErrorField:
    """Per-point, per-dimension Wasserstein error, its max over dimensions and their mean."""

    per_dim: np.ndarray
    per_point: np.ndarray
    mean: float

    @property
    def max(self) -> float:
        return float(self.per_point.max())


class ErrorTracker:
    """Keeps an :class:`ErrorField` current while samples are added."""

    def __init__(self, cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec, sampled,
                 method: str = "exact", bins: int = HISTOGRAM_BINS):
        if cloud.m == 0:
            raise NoValueDimensions("error measure needs at least one value dimension")
        if method not in ("exact", "histogram"):
            raise InvalidArgument(f"unknown error method {method!r}")
        self.cloud = cloud
        self.grid = grid
        self.kernel = kernel
        self.sampled = _as_mask(sampled, cloud.n)
        vals = np.ascontiguousarray(cloud.values)
        self._values = vals
        self._lo = vals.min(axis=0)
        self._width = vals.max(axis=0) - self._lo
        self._n_hist = 0 if method == "exact" else int(bins)
        self.per_dim = np.zeros((cloud.n, cloud.m))
        self.update(np.arange(cloud.n))

    def update(self, targets) -> None:
        g = self.grid
        targets = np.ascontiguousarray(targets, dtype=np.int64)
        _local_errors(targets, g.positions, g.point_ids, g.cell_offsets, g.point_cell,
                      g.neighbor_cells, self.kernel.support, self._values, self.sampled,
                      self._lo, self._width, self._n_hist, self.per_dim)

    @property
    def per_point(self) -> np.ndarray:
        return self.per_dim.max(axis=1)

    @property
    def mean(self) -> float:
        return float(self.per_point.mean())

    def field(self) -> ErrorField:
        pp = self.per_point
        return ErrorField(self.per_dim.copy(), pp, float(pp.mean()))


def error_field(cloud: PointCloud, grid: UniformGrid, kernel: KernelSpec, samples,
                method: str = "exact", bins: int = HISTOGRAM_BINS) -> ErrorField:
    """Wasserstein error of the sampled vs. full local value distribution at every point.

    Points without any sampled neighbor get the global value range as error.
    """
    return ErrorTracker(cloud, grid, kernel, samples, method, bins).field()


def sample_error(cloud: PointCloud, samples, kernel_size: float = None,
                 method: str = "exact") -> ErrorField:
    """Error field using the kernel size that belongs to ``len(samples)`` samples."""
    mask = _as_mask(samples, cloud.n)
    if kernel_size is None:
        kernel_size = scaled_kernel_size(default_kernel_size(cloud), cloud.n,
                                         max(1, int(mask.sum())), cloud.d)
    grid = build_grid(cloud.positions, kernel_size)
    return error_field(cloud, grid, KernelSpec(kernel_size), mask, method)


def error_guided_fill(state, config: SamplerConfig) -> SampleResult:
    """Void filling in small batches until the mean error drops below ``config.error_threshold``.

    Errors are computed for all points once, then refreshed only around each
    batch of new samples. Stops at ``config.target_count`` at the latest;
    ``threshold_reached`` on the result reports which condition ended it.
    """
    from .sampler import assign_fill_ranks, batch_iteration
    eps = config.error_threshold
    if eps is None:
        raise InvalidArgument("error-guided filling needs an error threshold")
    cloud = state.cloud
    tracker = ErrorTracker(cloud, state.field.grid, state.kernel, state.field.sampled)
    # the tracker shares the sampler's live mask
    tracker.sampled = state.field.sampled
    history = [tracker.mean]
    counts = [state.count]
    target = config.target_count
    while state.count < target:
        batch_iteration(state, config.error_batch, limit=target - state.count)
        tracker.update(state.field.last_affected)
        history.append(tracker.mean)
        counts.append(state.count)
        if history[-1] < eps:
            break
    assign_fill_ranks(state)
    result = state.result(config)
    result.error_history = np.column_stack([counts, history])
    result.threshold_reached = bool(history[-1] < eps)
    log.info("error-guided fill stopped at %d samples (%.2f%%), mean error %.6g",
             state.count, 100.0 * state.count / state.n, history[-1])
    return result
