"""Void-and-cluster sampling of scattered and trajectory data."""

import os as _os

import numba as _numba

if "NUMBA_THREADING_LAYER" not in _os.environ:
    # the bundled TBB is often too old; workqueue is always available
    _numba.config.THREADING_LAYER = "workqueue"

from . import parallel  # noqa: E402  (applies VCSAMPLE_THREADS)
from .core import (  # noqa: E402
    PointCloud,
    SampleResult,
    SamplerConfig,
    TrajectoryDataset,
    TrajectorySampleSet,
    default_kernel_size,
    seeded_rng,
    validate,
)
from .kernel import KernelSpec, scaled_kernel_size  # noqa: E402
from .baselines import BaselineSpec, run_baseline  # noqa: E402
from .error import ErrorField, sample_error  # noqa: E402
from .evaluation import RasterGrid, reconstruct, sample_spectrum, snr_db  # noqa: E402
from .sampler import sample  # noqa: E402
from .trajectory import sample_trajectories  # noqa: E402

__all__ = [
    "PointCloud", "SampleResult", "SamplerConfig", "TrajectoryDataset",
    "TrajectorySampleSet", "KernelSpec", "BaselineSpec", "ErrorField", "RasterGrid",
    "default_kernel_size", "parallel", "reconstruct", "run_baseline", "sample",
    "sample_error", "sample_spectrum", "sample_trajectories", "scaled_kernel_size",
    "seeded_rng", "snr_db", "validate",
]
