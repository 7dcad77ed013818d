"""Domain types, sampler configuration and the seeded RNG contract."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyDataset, InvalidArgument, InvalidData, TooManySamples

MODES = ("uniform", "entropy", "custom")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``n`` points in ``d`` dimensions, each carrying ``m`` values.

    Arrays are converted to read-only float64. Construction does not check
    finiteness; call :func:`validate` for that.
    """

    positions: np.ndarray
    values: np.ndarray = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim == 1:
            pos = pos[:, None]
        if pos.ndim != 2:
            raise InvalidArgument(f"positions must be (n, d), got shape {pos.shape}")
        vals = self.values
        if vals is None:
            vals = np.zeros((pos.shape[0], 0))
        vals = np.asarray(vals, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != pos.shape[0]:
            raise InvalidArgument(
                f"values has {vals.shape[0]} rows but positions has {pos.shape[0]}")
        object.__setattr__(self, "positions", _frozen(pos))
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def bbox(self) -> np.ndarray:
        """``(d, 2)`` array of per-axis (min, max)."""
        return np.stack([self.positions.min(axis=0), self.positions.max(axis=0)], axis=1)

    def subset(self, indices) -> "PointCloud":
        idx = np.asarray(indices, dtype=np.int64)
        return PointCloud(self.positions[idx], self.values[idx])

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and np.array_equal(self.values, other.values))

    __hash__ = None


def validate(cloud: PointCloud) -> None:
    """Raise if ``cloud`` breaks an invariant; the message lists one problem per category."""
    if cloud.n == 0:
        raise EmptyDataset("point cloud has no points")
    problems = []
    if not 1 <= cloud.d <= 4:
        problems.append(f"dimension d={cloud.d} outside supported range 1..4")
    bad = ~np.isfinite(cloud.positions)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        problems.append(f"non-finite coordinate at point {row}, axis {col}")
    badv = ~np.isfinite(cloud.values)
    if badv.any():
        row, col = np.argwhere(badv)[0]
        problems.append(f"non-finite value at point {row}, dimension {col}")
    if problems:
        raise InvalidData("; ".join(problems))


def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic generator; the stream depends only on ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def bbox_volume(bbox: np.ndarray) -> float:
    ext = bbox[:, 1] - bbox[:, 0]
    nonzero = ext[ext > 0]
    if nonzero.size == 0:
        return 1.0
    # degenerate axes borrow the largest nonzero extent
    ext = np.where(ext > 0, ext, nonzero.max())
    return float(np.prod(ext))


def default_kernel_size(cloud: PointCloud) -> float:
    """Base kernel size ``2 (V/n)^(1/d)``, roughly a dozen neighbors per point."""
    return 2.0 * (bbox_volume(cloud.bbox) / cloud.n) ** (1.0 / cloud.d)


@dataclass(frozen=True)
class SamplerConfig:
    target_count: int
    base_kernel_size: Optional[float] = None
    initial_fraction: float = 0.1
    histogram_bins: int = 64
    batch_max: int = 12288
    error_batch: int = 32
    rng_seed: int = 0
    mode: str = "uniform"
    error_threshold: Optional[float] = None
    entropy_dims: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.target_count < 1:
            raise InvalidArgument("target_count must be positive")
        if not 0.0 < self.initial_fraction <= 1.0:
            raise InvalidArgument("initial_fraction must lie in (0, 1]")
        if self.initial_fraction * self.target_count < 1.0:
            raise InvalidArgument("initial_fraction * target_count must be >= 1")
        if self.histogram_bins < 2:
            raise InvalidArgument("histogram_bins must be >= 2")
        if self.batch_max < 1 or self.error_batch < 1:
            raise InvalidArgument("batch sizes must be positive")
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.base_kernel_size is not None and not self.base_kernel_size > 0:
            raise InvalidArgument("base_kernel_size must be positive")
        if self.error_threshold is not None and self.error_threshold < 0:
            raise InvalidArgument("error_threshold must be non-negative")
        if self.entropy_dims is not None:
            object.__setattr__(self, "entropy_dims", tuple(int(i) for i in self.entropy_dims))

    @property
    def initial_count(self) -> int:
        return max(1, math.ceil(self.initial_fraction * self.target_count))

    def check_against(self, cloud: PointCloud) -> None:
        if self.target_count > cloud.n:
            raise TooManySamples(f"target_count {self.target_count} exceeds n={cloud.n}")


@dataclass(eq=False)
class SampleResult:
    """Rank-ordered selection: position ``i`` of every array is the rank-``i`` sample."""

    indices_by_rank: np.ndarray
    insertion_density: np.ndarray
    weights: np.ndarray
    kernel_size_used: float
    config_echo: Optional[SamplerConfig] = None
    error_history: Optional[np.ndarray] = None
    threshold_reached: Optional[bool] = None

    def __post_init__(self):
        self.indices_by_rank = np.asarray(self.indices_by_rank, dtype=np.int64)
        self.insertion_density = np.asarray(self.insertion_density, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.indices_by_rank)

    @property
    def count(self) -> int:
        return len(self.indices_by_rank)

    def prefix(self, k: int) -> np.ndarray:
        """Point indices of the ``k`` lowest-ranked samples."""
        return self.indices_by_rank[:k]

    def ranks(self, n: int) -> np.ndarray:
        """Per-point rank over ``n`` points; unsampled points get ``UNRANKED``."""
        r = np.full(n, UNRANKED, dtype=np.int64)
        r[self.indices_by_rank] = np.arange(self.count)
        return r

    def __eq__(self, other):
        if not isinstance(other, SampleResult):
            return NotImplemented
        return (np.array_equal(self.indices_by_rank, other.indices_by_rank)
                and np.array_equal(self.insertion_density, other.insertion_density, equal_nan=True)
                and np.array_equal(self.weights, other.weights, equal_nan=True)
                and np.array_equal(self.kernel_size_used, other.kernel_size_used, equal_nan=True)
                and self.config_echo == other.config_echo)

    __hash__ = None


UNRANKED = np.iinfo(np.int64).max


@dataclass(eq=False)
class TrajectoryDataset:
    """Trajectories over ``T`` discrete steps, stored densely.

    ``positions`` has shape ``(T, N, d)`` and ``values`` ``(T, N, m)``; entries
    outside a trajectory's ``[start, end]`` lifespan are NaN.
    """

    times: np.ndarray
    ids: np.ndarray
    start: np.ndarray
    end: np.ndarray
    positions: np.ndarray
    values: np.ndarray = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.start = np.asarray(self.start, dtype=np.int64)
        self.end = np.asarray(self.end, dtype=np.int64)
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.values is None:
            self.values = np.zeros(self.positions.shape[:2] + (0,))
        self.values = np.asarray(self.values, dtype=np.float64)
        T, N = self.positions.shape[:2]
        if len(self.times) != T or self.values.shape[:2] != (T, N):
            raise InvalidArgument("inconsistent trajectory array shapes")
        if not (len(self.ids) == len(self.start) == len(self.end) == N):
            raise InvalidArgument("ids/start/end must have one entry per trajectory")

    @property
    def n_steps(self) -> int:
        return self.positions.shape[0]

    @property
    def n_trajectories(self) -> int:
        return self.positions.shape[1]

    @property
    def d(self) -> int:
        return self.positions.shape[2]

    @property
    def m(self) -> int:
        return self.values.shape[2]

    def alive(self, step: int) -> np.ndarray:
        """Trajectory slots existing at ``step``."""
        return np.flatnonzero((self.start <= step) & (step <= self.end))

    def cloud_at(self, step: int, slots=None) -> PointCloud:
        if slots is None:
            slots = self.alive(step)
        return PointCloud(self.positions[step, slots], self.values[step, slots])

    def __eq__(self, other):
        if not isinstance(other, TrajectoryDataset):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k), equal_nan=True)
                   for k in ("times", "ids", "start", "end", "positions", "values"))

    __hash__ = None


def validate_trajectories(data: TrajectoryDataset) -> None:
    T = data.n_steps
    if data.n_trajectories == 0:
        raise EmptyDataset("no trajectories")
    if len(np.unique(data.ids)) != len(data.ids):
        raise InvalidData("trajectory ids are not unique")
    if np.any(data.start < 0) or np.any(data.start > data.end) or np.any(data.end > T - 1):
        raise InvalidData("trajectory step ranges must satisfy 0 <= start <= end <= T-1")
    steps = np.arange(T)[:, None]
    alive = (data.start[None, :] <= steps) & (steps <= data.end[None, :])
    if not np.isfinite(data.positions[alive]).all():
        raise InvalidData("non-finite position inside a trajectory lifespan")


@dataclass(eq=False)
class TrajectorySampleSet:
    """Sampled trajectory segments.

    ``segments`` is an ``(k, 3)`` integer array of (trajectory id, first step,
    last step). ``selected`` holds, per step, the trajectory ids sampled at that
    step after all starts/stops.
    """

    segments: np.ndarray
    alive_counts: np.ndarray
    selected: list = field(default_factory=list)
    exchanges: np.ndarray = None
    skipped_steps: list = field(default_factory=list)

    def __post_init__(self):
        self.segments = np.asarray(self.segments, dtype=np.int64).reshape(-1, 3)
        self.alive_counts = np.asarray(self.alive_counts, dtype=np.int64)
        self.selected = [np.asarray(s, dtype=np.int64) for s in self.selected]
        if self.exchanges is None:
            self.exchanges = np.zeros(len(self.alive_counts), dtype=np.int64)
        self.exchanges = np.asarray(self.exchanges, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, TrajectorySampleSet):
            return NotImplemented
        return (np.array_equal(self.segments, other.segments)
                and np.array_equal(self.alive_counts, other.alive_counts)
                and np.array_equal(self.exchanges, other.exchanges)
                and len(self.selected) == len(other.selected)
                and all(np.array_equal(a, b) for a, b in zip(self.selected, other.selected))
                and list(self.skipped_steps) == list(other.skipped_steps))

    __hash__ = None
