"""Void-and-cluster sample selection with rank ordering.

Three phases: random initial samples, cluster/void exchanges until the
removed cluster is the next void, then void filling until the target count.
Void filling exists in a sequential form and a batched form that selects
many voids per round yet returns exactly the sequential result.
"""

from __future__ import annotations

import logging
import math
import warnings

import numba
import numpy as np

from .core import UNRANKED, PointCloud, SampleResult, SamplerConfig, default_kernel_size, seeded_rng, validate
from .density import DensityField, apply_samples, compute_point_density
from .entropy import entropy_importance
from .errors import InvalidArgument, OptimizationNotConverged, TooManySamples
from .grid import build_grid
from .kernel import KernelSpec, scaled_kernel_size

log = logging.getLogger(__name__)

OPTIMIZE_CAP_FACTOR = 10


# -- flat indexing of the strict lower triangle -------------------------------

@numba.njit(cache=True, inline="always")
def _tri(i):
    # i (i - 1) / 2 without overflowing the intermediate product
    if i % 2 == 0:
        return (i // 2) * (i - 1)
    return i * ((i - 1) // 2)


@numba.njit(cache=True, inline="always")
def _flat_to_pair(k):
    i = int(math.floor(0.5 + math.sqrt(0.25 + 2.0 * k)))
    j = k - _tri(i)
    # guard against rounding of the square root for very large k
    while j < 0:
        i -= 1
        j = k - _tri(i)
    while j >= i:
        i += 1
        j = k - _tri(i)
    return i, j


def flat_index_to_pair(k):
    """Row/column ``(i, j)``, ``j < i``, of the ``k``-th strict-lower-triangle entry (row-major)."""
    if np.ndim(k) == 0:
        k = int(k)
        if k < 0:
            raise InvalidArgument("flat index must be non-negative")
        return _flat_to_pair(k)
    k = np.asarray(k, dtype=np.int64)
    i = np.floor(0.5 + np.sqrt(0.25 + 2.0 * k.astype(np.float64))).astype(np.int64)

    def tri(i):
        return np.where(i % 2 == 0, (i // 2) * (i - 1), i * ((i - 1) // 2))

    j = k - tri(i)
    low, high = j < 0, j >= i
    i = i - low + high
    j = k - tri(i)
    return i, j


@numba.njit(cache=True, parallel=True)
def _flag_candidates(cand_pos, h, n_chunks):
    """``flag[i]`` iff some earlier candidate ``j < i`` lies closer than ``h``.

    Work is split into equal ranges of the flat index over the strict lower
    triangle; each range stops scanning a row once the row is flagged.
    """
    n = cand_pos.shape[0]
    flags = np.zeros(n, dtype=np.bool_)
    total = n * (n - 1) // 2
    if total == 0:
        return flags
    step = (total + n_chunks - 1) // n_chunks
    for ch in numba.prange(n_chunks):
        k = ch * step
        stop = min(total, k + step)
        if k >= stop:
            continue
        i, j = _flat_to_pair(k)
        while k < stop:
            if flags[i]:
                k += i - j
                i += 1
                j = 0
                continue
            s = 0.0
            for a in range(cand_pos.shape[1]):
                t = cand_pos[i, a] - cand_pos[j, a]
                s += t * t
            if math.sqrt(s) < h:
                flags[i] = True
            k += 1
            j += 1
            if j == i:
                i += 1
                j = 0
    return flags


def flag_candidates(cand_pos: np.ndarray, h: float, n_chunks: int = 64) -> np.ndarray:
    return _flag_candidates(np.ascontiguousarray(cand_pos, dtype=np.float64), float(h), n_chunks)


# -- compiled selection loops -------------------------------------------------

@numba.njit(cache=True)
def _argmin_unsampled(num, rho, sampled):
    best = -1
    bv = 0.0
    for p in range(num.shape[0]):
        if not sampled[p]:
            v = num[p] / rho[p]
            if best < 0 or v < bv:
                best = p
                bv = v
    return best


@numba.njit(cache=True)
def _argmax_sampled(num, rho, sampled):
    best = -1
    bv = 0.0
    for p in range(num.shape[0]):
        if sampled[p]:
            v = num[p] / rho[p]
            if best < 0 or v > bv:
                best = p
                bv = v
    return best


@numba.njit(cache=True)
def _optimize(max_exchanges, positions, point_ids, offsets, point_cell, nbr, slots, counts,
              sampled, h, num, mark, rho, rank, insertion):
    one = np.empty(1, dtype=np.int64)
    for it in range(max_exchanges):
        tc = _argmax_sampled(num, rho, sampled)
        if tc < 0:
            return it, True
        one[0] = tc
        apply_samples(one, False, positions, point_ids, offsets, point_cell, nbr,
                      slots, counts, sampled, h, num, mark)
        lv = _argmin_unsampled(num, rho, sampled)
        dens = num[lv] / rho[lv]
        one[0] = lv
        apply_samples(one, True, positions, point_ids, offsets, point_cell, nbr,
                      slots, counts, sampled, h, num, mark)
        if lv == tc:
            return it, True
        rank[lv] = rank[tc]
        rank[tc] = 9223372036854775807
        insertion[lv] = dens
        insertion[tc] = np.nan
    return max_exchanges, False


@numba.njit(cache=True)
def _fill_sequential(count, next_rank, positions, point_ids, offsets, point_cell, nbr, slots,
                     counts, sampled, h, num, mark, rho, rank, insertion):
    one = np.empty(1, dtype=np.int64)
    for _ in range(count):
        lv = _argmin_unsampled(num, rho, sampled)
        insertion[lv] = num[lv] / rho[lv]
        rank[lv] = next_rank
        next_rank += 1
        one[0] = lv
        apply_samples(one, True, positions, point_ids, offsets, point_cell, nbr,
                      slots, counts, sampled, h, num, mark)
    return next_rank


# -- state --------------------------------------------------------------------

class SamplerState:
    """Mutable selection state: densities, ranks and insertion densities."""

    def __init__(self, field: DensityField, cloud: PointCloud = None):
        self.field = field
        self.cloud = cloud
        n = field.n
        self.rank = np.full(n, UNRANKED, dtype=np.int64)
        self.insertion = np.full(n, np.nan)
        self.next_rank = 0
        self.batch_max_density = -np.inf
        self.exchanges = 0
        self.converged = None
        self.history = []

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def count(self) -> int:
        return self.field.sample_count

    @property
    def kernel(self) -> KernelSpec:
        return self.field.kernel

    def copy(self) -> "SamplerState":
        other = SamplerState.__new__(SamplerState)
        other.__dict__.update(self.__dict__)
        other.field = self.field.copy()
        other.rank = self.rank.copy()
        other.insertion = self.insertion.copy()
        other.history = list(self.history)
        return other

    def _arrays(self):
        f = self.field
        g = f.grid
        return (g.positions, g.point_ids, g.cell_offsets, g.point_cell, g.neighbor_cells,
                f._slots, f._counts, f.sampled, f.kernel.support, f.numerator, f._mark,
                f.point_density, self.rank, self.insertion)

    def sample_density(self) -> np.ndarray:
        return self.field.sample_density()

    def weights(self, indices: np.ndarray) -> np.ndarray:
        imp = self.field.importance
        if imp is None:
            return np.ones(len(indices))
        w = 1.0 / (self.n * imp[indices])
        return w / w.mean()

    def result(self, config: SamplerConfig = None) -> SampleResult:
        idx = np.flatnonzero(self.field.sampled)
        idx = idx[np.argsort(self.rank[idx], kind="stable")]
        return SampleResult(idx, self.insertion[idx], self.weights(idx),
                            self.kernel.support, config)


def prepare(cloud: PointCloud, config: SamplerConfig, importance=None) -> SamplerState:
    """Kernel scaling, grid, optional importance and point density for ``cloud``."""
    validate(cloud)
    config.check_against(cloud)
    kappa = config.base_kernel_size or default_kernel_size(cloud)
    h = scaled_kernel_size(kappa, cloud.n, config.target_count, cloud.d)
    grid = build_grid(cloud.positions, h)
    kernel = KernelSpec(h)
    if config.mode == "entropy":
        if cloud.m == 0:
            raise InvalidArgument("entropy mode needs at least one value dimension")
        importance = entropy_importance(cloud, grid, kernel, config.entropy_dims,
                                        config.histogram_bins)
    elif config.mode == "custom":
        if importance is None:
            raise InvalidArgument("custom mode needs an importance PMF")
    else:
        importance = None
    field = compute_point_density(cloud, grid, kernel, importance)
    return SamplerState(field, cloud)


# -- phases -------------------------------------------------------------------

def initial_random(state: SamplerState, count: int, rng: np.random.Generator) -> SamplerState:
    """Draw ``count`` distinct uniform-random samples, ranked in draw order."""
    if state.count:
        raise InvalidArgument("initial_random needs an empty sample set")
    if count > state.n:
        raise TooManySamples(f"cannot draw {count} of {state.n} points")
    picks = rng.choice(state.n, size=count, replace=False)
    f = state.field
    for s in picks:
        state.insertion[s] = f.sample_density_at(s)
        state.rank[s] = state.next_rank
        state.next_rank += 1
        f.add_sample(s)
    return state


def optimize(state: SamplerState, max_exchanges: int = None) -> SamplerState:
    """Exchange the tightest cluster for the largest void until they coincide.

    Raises :class:`OptimizationNotConverged` (carrying the still-valid state)
    when the exchange cap is hit.
    """
    if max_exchanges is None:
        max_exchanges = OPTIMIZE_CAP_FACTOR * max(1, state.count)
    it, converged = _optimize(max_exchanges, *state._arrays())
    state.exchanges += it
    state.converged = bool(converged)
    if not converged:
        raise OptimizationNotConverged(
            f"no fixed point after {max_exchanges} exchanges", state)
    return state


def _check_target(state: SamplerState, target_count: int):
    if target_count > state.n:
        raise TooManySamples(f"target {target_count} exceeds n={state.n}")
    if target_count < state.count:
        raise InvalidArgument(f"target {target_count} is below the current count {state.count}")


def fill_voids_sequential(state: SamplerState, target_count: int,
                          config: SamplerConfig = None) -> SampleResult:
    """Greedily add the lowest-density unsampled point until ``target_count`` samples."""
    _check_target(state, target_count)
    state.next_rank = _fill_sequential(target_count - state.count, state.next_rank,
                                       *state._arrays())
    return state.result(config)


def smallest_unsampled(dens: np.ndarray, sampled: np.ndarray, k: int, bound: float = None) -> np.ndarray:
    """Up to ``k`` unsampled points ordered by (density, index); optionally only density <= bound."""
    idx = np.flatnonzero(~sampled)
    d = dens[idx]
    if bound is not None:
        keep = d <= bound
        idx, d = idx[keep], d[keep]
    if k < len(idx):
        thr = d[np.argpartition(d, k - 1)[k - 1]]
        keep = d <= thr
        idx, d = idx[keep], d[keep]
    order = np.lexsort((idx, d))[:k]
    return idx[order]


def _batch_round(state: SamplerState, cand: np.ndarray, dens: np.ndarray) -> np.ndarray:
    flags = flag_candidates(state.field.grid.positions[cand], state.kernel.support)
    accepted = cand[~flags]
    state.insertion[accepted] = dens[accepted]
    state.field.add_samples(accepted)
    return accepted


def batch_iteration(state: SamplerState, batch_max: int, limit: int = None) -> np.ndarray:
    """One proper round: take the ``batch_max`` smallest voids, keep the unflagged ones.

    Ranks are not assigned here; see :func:`assign_fill_ranks`.
    """
    remaining = state.n - state.count if limit is None else limit
    k = min(batch_max, remaining)
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    dens = state.sample_density()
    cand = smallest_unsampled(dens, state.field.sampled, k)
    accepted = _batch_round(state, cand, dens)
    state.batch_max_density = max(state.batch_max_density, float(dens[accepted].max()))
    return accepted


def complete_batches(state: SamplerState, batch_max: int) -> None:
    """Keep selecting until every unsampled density exceeds the batch maximum."""
    B = state.batch_max_density
    while state.count < state.n:
        dens = state.sample_density()
        cand = smallest_unsampled(dens, state.field.sampled, batch_max, bound=B)
        if len(cand) == 0:
            break
        _batch_round(state, cand, dens)


def assign_fill_ranks(state: SamplerState, keep: int = None) -> np.ndarray:
    """Rank void-filled samples by (insertion density, index); drop those beyond ``keep`` total."""
    f = state.field
    filled = np.flatnonzero(f.sampled & (state.rank == UNRANKED))
    order = np.lexsort((filled, state.insertion[filled]))
    filled = filled[order]
    if keep is not None:
        extra = filled[keep - state.next_rank:]
        filled = filled[:keep - state.next_rank]
        if len(extra):
            f._apply(np.ascontiguousarray(extra), False)
            state.insertion[extra] = np.nan
    state.rank[filled] = state.next_rank + np.arange(len(filled))
    state.next_rank += len(filled)
    return filled


def fill_voids_batched(state: SamplerState, target_count: int, batch_max: int = 12288,
                       config: SamplerConfig = None) -> SampleResult:
    """Batched void filling; result identical to :func:`fill_voids_sequential`.

    Each round sorts unsampled points by density and accepts every candidate
    with no earlier candidate inside the kernel support. Rounds continue past
    the target until no unsampled density is at or below the largest accepted
    density; the result is then truncated by rank.
    """
    _check_target(state, target_count)
    if batch_max < 1:
        raise InvalidArgument("batch_max must be positive")
    while state.count < target_count:
        batch_iteration(state, batch_max, limit=target_count - state.count)
        state.history.append(state.count)
    if state.batch_max_density > -np.inf:
        complete_batches(state, batch_max)
    assign_fill_ranks(state, keep=target_count)
    return state.result(config)


def sample(cloud: PointCloud, config: SamplerConfig, importance=None) -> SampleResult:
    """Run the full pipeline and return the rank-ordered selection."""
    state = prepare(cloud, config, importance)
    rng = seeded_rng(config.rng_seed)
    initial_random(state, min(config.initial_count, config.target_count), rng)
    try:
        optimize(state)
    except OptimizationNotConverged as exc:
        warnings.warn(str(exc), RuntimeWarning, stacklevel=2)
    if config.error_threshold is not None:
        from .error import error_guided_fill
        return error_guided_fill(state, config)
    return fill_voids_batched(state, config.target_count, config.batch_max, config)
