"""Reference samplers used for comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .core import PointCloud, SampleResult, default_kernel_size, seeded_rng
from .errors import InsufficientSupport, InvalidArgument, TooManySamples
from .grid import build_grid, max_cells_per_axis
from .entropy import entropy_importance
from .kernel import KernelSpec, scaled_kernel_size

KINDS = ("random", "entropy_random", "stratified_kdtree", "poisson_disk")


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    params: dict = field(default_factory=dict)
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown baseline kind {self.kind!r}")
        for k, v in self.params.items():
            if v is not None and not v > 0:
                raise InvalidArgument(f"baseline parameter {k} must be positive")


def _result(indices, weights=None, kernel_size=np.nan) -> SampleResult:
    indices = np.asarray(indices, dtype=np.int64)
    if weights is None:
        weights = np.ones(len(indices))
    return SampleResult(indices, np.full(len(indices), np.nan), weights, float(kernel_size))


def random_sample(cloud: PointCloud, count: int, pmf=None, rng=None) -> SampleResult:
    """Sampling without replacement, uniform or proportional to ``pmf``; rank is draw order."""
    rng = seeded_rng(0) if rng is None else rng
    n = cloud.n
    if count > n:
        raise TooManySamples(f"cannot draw {count} of {n} points")
    if pmf is None:
        idx = rng.choice(n, size=count, replace=False)
        return _result(idx)
    p = np.asarray(getattr(pmf, "probabilities", pmf), dtype=np.float64)
    if p.shape != (n,) or np.any(p < 0):
        raise InvalidArgument("pmf must hold one non-negative probability per point")
    support = int(np.count_nonzero(p))
    if count > support:
        raise InsufficientSupport(f"pmf has only {support} nonzero entries, {count} requested")
    p = p / p.sum()
    idx = rng.choice(n, size=count, replace=False, p=p)
    w = 1.0 / (n * p[idx])
    return _result(idx, w / w.mean())


def kdtree_strata(positions: np.ndarray, count: int) -> list:
    """Split points into ``count`` disjoint strata by recursive median splits.

    Each node is cut along its widest axis. A node that must yield ``c``
    strata sends ``c // 2`` to the lower side with a proportional share of
    its points (the median when ``c`` is even).
    """
    positions = np.asarray(positions, dtype=np.float64)
    strata = []

    def split(idx, c):
        if c == 1 or len(idx) <= 1:
            strata.append(idx)
            return
        pts = positions[idx]
        axis = int(np.argmax(pts.max(axis=0) - pts.min(axis=0)))
        c_lo = c // 2
        n_lo = max(1, min(len(idx) - 1, round(len(idx) * c_lo / c)))
        part = np.argpartition(pts[:, axis], n_lo - 1)
        lo, hi = np.sort(idx[part[:n_lo]]), np.sort(idx[part[n_lo:]])
        split(lo, c_lo)
        split(hi, c - c_lo)

    split(np.arange(len(positions)), count)
    return strata


def stratified_kdtree_sample(cloud: PointCloud, count: int, rng=None) -> SampleResult:
    """One uniform-random point from each kd-tree stratum."""
    rng = seeded_rng(0) if rng is None else rng
    if count > cloud.n:
        raise TooManySamples(f"cannot draw {count} of {cloud.n} points")
    strata = kdtree_strata(cloud.positions, count)
    picks = [s[rng.integers(len(s))] for s in strata]
    return _result(picks)


@numba.njit(cache=True)
def _poisson_subset(order, positions, point_ids, offsets, point_cell, nbr, r_min):
    n = positions.shape[0]
    accepted = np.zeros(n, dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    m = 0
    for oi in range(order.shape[0]):
        p = order[oi]
        c = point_cell[p]
        ok = True
        for t in range(nbr.shape[1]):
            cc = nbr[c, t]
            if cc < 0 or not ok:
                break
            for k in range(offsets[cc], offsets[cc + 1]):
                q = point_ids[k]
                if accepted[q]:
                    s = 0.0
                    for a in range(positions.shape[1]):
                        d = positions[p, a] - positions[q, a]
                        s += d * d
                    if np.sqrt(s) < r_min:
                        ok = False
                        break
        if ok:
            accepted[p] = True
            out[m] = p
            m += 1
    return out[:m]


def poisson_disk_subset(cloud: PointCloud, r_min: float, rng=None) -> SampleResult:
    """Dart throwing over the existing points in random order.

    A point is kept iff no kept point lies closer than ``r_min``; the
    resulting count is whatever the radius allows.
    """
    if not r_min > 0:
        raise InvalidArgument("r_min must be positive")
    rng = seeded_rng(0) if rng is None else rng
    ext = float(np.max(np.ptp(cloud.positions, axis=0))) if cloud.n > 1 else 0.0
    cell = max(r_min, ext / (max_cells_per_axis(cloud.d) - 1))
    grid = build_grid(cloud.positions, cell)
    order = rng.permutation(cloud.n).astype(np.int64)
    idx = _poisson_subset(order, grid.positions, grid.point_ids, grid.cell_offsets,
                          grid.point_cell, grid.neighbor_cells, float(r_min))
    return _result(idx)


def default_poisson_radius(cloud: PointCloud, target_count: int) -> float:
    return 0.5 * scaled_kernel_size(default_kernel_size(cloud), cloud.n, target_count, cloud.d)


def run_baseline(cloud: PointCloud, spec: BaselineSpec, count: int = None) -> SampleResult:
    rng = seeded_rng(spec.rng_seed)
    if spec.kind == "random":
        return random_sample(cloud, count, rng=rng)
    if spec.kind == "entropy_random":
        h = scaled_kernel_size(default_kernel_size(cloud), cloud.n, count, cloud.d)
        grid = build_grid(cloud.positions, h)
        pmf = entropy_importance(cloud, grid, KernelSpec(h), n_bins=spec.params.get("bins", 64))
        return random_sample(cloud, count, pmf, rng=rng)
    if spec.kind == "stratified_kdtree":
        return stratified_kdtree_sample(cloud, count, rng=rng)
    r_min = spec.params.get("r_min") or default_poisson_radius(cloud, count)
    return poisson_disk_subset(cloud, r_min, rng=rng)
