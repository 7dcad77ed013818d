"""Step-by-step sampling of trajectories.

The first step is sampled with the full void-and-cluster pipeline. At every
later step the surviving samples are kept, the sample set is refilled to the
target from the largest voids (one start per ended trajectory), and up to ``eps_t`` cluster/void exchanges stop
crowded trajectories and start new ones.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

from .core import (PointCloud, SamplerConfig, TrajectoryDataset, TrajectorySampleSet,
                   default_kernel_size, seeded_rng, validate_trajectories)
from .errors import EmptyDataset, InvalidArgument, OptimizationNotConverged
from .sampler import SamplerState, fill_voids_sequential, optimize, prepare, sample

log = logging.getLogger(__name__)


class _Segments:
    def __init__(self):
        self.open = {}
        self.closed = []
        self.closed_at = {}

    def start(self, slot, step):
        key = (slot, step)
        if key in self.closed_at:
            # stopped earlier in this same step: resume the old segment
            seg = self.closed_at.pop(key)
            self.closed.remove(seg)
            self.open[slot] = seg[1]
        else:
            self.open[slot] = step

    def stop(self, slot, step):
        first = self.open.pop(slot)
        if first == step:
            return
        seg = (slot, first, step)
        self.closed.append(seg)
        self.closed_at[(slot, step)] = seg

    def end(self, slot, step):
        self.closed.append((slot, self.open.pop(slot), step))

    def new_step(self):
        self.closed_at.clear()


def _step_config(config: SamplerConfig, cloud: PointCloud) -> SamplerConfig:
    target = min(config.target_count, cloud.n)
    frac = max(config.initial_fraction, 1.0 / target)
    return dataclasses.replace(config, target_count=target, initial_fraction=min(1.0, frac),
                               error_threshold=None)


def sample_trajectories(data: TrajectoryDataset, config: SamplerConfig, eps_t: int = 0) -> TrajectorySampleSet:
    """Select trajectory segments; see the module docstring for the per-step rule."""
    validate_trajectories(data)
    if eps_t < 0:
        raise InvalidArgument("eps_t must be non-negative")
    if config.mode == "custom":
        raise InvalidArgument("trajectory sampling supports uniform and entropy modes only")
    T = data.n_steps
    alive0 = data.alive(0)
    if len(alive0) == 0:
        raise EmptyDataset("no trajectory is alive at the first step")

    cloud0 = data.cloud_at(0, alive0)
    first = sample(cloud0, _step_config(config, cloud0))
    selected = np.sort(alive0[first.indices_by_rank])
    segs = _Segments()
    for s in selected:
        segs.start(int(s), 0)
    per_step = [selected]
    alive_counts = [len(alive0)]
    exchanges = [0]
    skipped = []

    for i in range(1, T):
        segs.new_step()
        alive = data.alive(i)
        alive_counts.append(len(alive))
        is_alive = np.zeros(data.n_trajectories, dtype=bool)
        is_alive[alive] = True
        ended = selected[~is_alive[selected]]
        for s in ended:
            segs.end(int(s), int(data.end[s]))
        still = selected[is_alive[selected]]
        if len(alive) == 0:
            log.warning("step %d has no alive trajectories; skipped", i)
            skipped.append(i)
            per_step.append(np.empty(0, dtype=np.int64))
            exchanges.append(0)
            selected = still
            continue

        cloud = data.cloud_at(i, alive)
        state = prepare(cloud, _step_config(config, cloud))
        local = np.searchsorted(alive, still)
        if len(local):
            state.field.add_samples(local)
        # refill to the target; equals the number of ended samples when the set was full
        n_new = max(0, min(config.target_count, cloud.n) - len(local))
        before = state.field.sampled.copy()
        fill_voids_sequential(state, state.count + n_new)
        for s in alive[state.field.sampled & ~before]:
            segs.start(int(s), i)

        n_exchanged = 0
        if eps_t > 0 and 0 < state.count < cloud.n:
            pre = state.field.sampled.copy()
            try:
                optimize(state, max_exchanges=eps_t)
            except OptimizationNotConverged:
                pass
            n_exchanged = state.exchanges
            stopped = alive[pre & ~state.field.sampled]
            started = alive[state.field.sampled & ~pre]
            for s in stopped:
                segs.stop(int(s), i)
            for s in started:
                segs.start(int(s), i)
        exchanges.append(n_exchanged)
        selected = alive[state.field.sampled]
        per_step.append(selected)

    for s in list(segs.open):
        segs.end(s, int(min(data.end[s], T - 1)))
    rows = sorted((int(data.ids[s]), a, b) for s, a, b in segs.closed)
    return TrajectorySampleSet(np.array(rows, dtype=np.int64).reshape(-1, 3), alive_counts,
                               [data.ids[p] for p in per_step], exchanges, skipped)


def random_trajectories(data: TrajectoryDataset, count: int, seed: int = 0) -> TrajectorySampleSet:
    """Random trajectories at the first step; ended ones are replaced by random alive ones."""
    validate_trajectories(data)
    rng = seeded_rng(seed)
    alive0 = data.alive(0)
    selected = np.sort(rng.choice(alive0, size=min(count, len(alive0)), replace=False))
    segs = _Segments()
    for s in selected:
        segs.start(int(s), 0)
    per_step = [selected]
    alive_counts = [len(alive0)]
    for i in range(1, data.n_steps):
        alive = data.alive(i)
        alive_counts.append(len(alive))
        keep = np.isin(selected, alive)
        for s in selected[~keep]:
            segs.end(int(s), int(data.end[s]))
        selected = selected[keep]
        pool = np.setdiff1d(alive, selected)
        k = min(count - len(selected), len(pool))
        if k > 0:
            new = rng.choice(pool, size=k, replace=False)
            for s in new:
                segs.start(int(s), i)
            selected = np.sort(np.concatenate([selected, new]))
        per_step.append(selected)
    for s in list(segs.open):
        segs.end(s, int(min(data.end[s], data.n_steps - 1)))
    rows = sorted((int(data.ids[s]), a, b) for s, a, b in segs.closed)
    return TrajectorySampleSet(np.array(rows, dtype=np.int64).reshape(-1, 3), alive_counts,
                               [data.ids[p] for p in per_step])


def step_errors(data: TrajectoryDataset, result: TrajectorySampleSet, method: str = "exact") -> np.ndarray:
    """Mean local Wasserstein error of the sampled trajectories at each step."""
    from .error import sample_error
    slot_of = {int(t): k for k, t in enumerate(data.ids)}
    out = np.full(data.n_steps, np.nan)
    for i in range(data.n_steps):
        alive = data.alive(i)
        ids = result.selected[i] if i < len(result.selected) else []
        if len(alive) == 0 or len(ids) == 0:
            continue
        slots = np.array([slot_of[int(t)] for t in ids])
        local = np.searchsorted(alive, slots)
        out[i] = sample_error(data.cloud_at(i, alive), local, method=method).mean
    return out
