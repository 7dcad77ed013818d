"""Compact cubic-spline kernel and sample-count kernel scaling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidArgument


@numba.njit(cache=True, inline="always")
def cubic_spline(r, h):
    # normalized so K(0) = 1; zero at and beyond r = h
    q = r / h
    if q < 0.5:
        return 1.0 - 6.0 * q * q + 6.0 * q * q * q
    if q < 1.0:
        t = 1.0 - q
        return 2.0 * t * t * t
    return 0.0


@dataclass(frozen=True)
class KernelSpec:
    """Cubic B-spline with compact support radius ``support``."""

    support: float

    def __post_init__(self):
        if not (self.support > 0 and math.isfinite(self.support)):
            raise InvalidArgument(f"kernel support must be positive and finite, got {self.support}")

    def __call__(self, r):
        return eval_kernel(self, r)


def eval_kernel(spec: KernelSpec, r):
    """Evaluate the kernel at distance(s) ``r``; accepts scalars or arrays."""
    arr = np.asarray(r, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InvalidArgument("kernel distances must be finite and non-negative")
    q = arr / spec.support
    t = 1.0 - q
    out = np.where(q < 0.5, 1.0 - 6.0 * q * q + 6.0 * q * q * q,
                   np.where(q < 1.0, 2.0 * t * t * t, 0.0))
    if out.ndim == 0:
        return float(out)
    return out


def scaled_kernel_size(kappa: float, n: int, s: int, d: int) -> float:
    """Kernel size for drawing ``s`` of ``n`` points: ``kappa * (n/s)^(1/d)``."""
    if s < 1:
        raise InvalidArgument("sample count must be at least 1")
    if n < s:
        raise InvalidArgument(f"sample count {s} exceeds point count {n}")
    if not kappa > 0:
        raise InvalidArgument("kappa must be positive")
    if n == s:
        return float(kappa)
    return float(kappa * (n / s) ** (1.0 / d))
