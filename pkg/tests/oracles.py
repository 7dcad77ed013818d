"""Brute-force reference implementations, written independently of the package.

Everything here is O(n^2) plain numpy/Python and only meant for small inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.stats import wasserstein_distance  # noqa: F401  (re-exported)


def kernel(r, h):
    q = r / h
    if q < 0.5:
        return 1.0 - 6.0 * q ** 2 + 6.0 * q ** 3
    if q < 1.0:
        return 2.0 * (1.0 - q) ** 3
    return 0.0


def pairwise(pos):
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def kernel_matrix(pos, h):
    D = pairwise(pos)
    return np.vectorize(lambda r: kernel(r, h))(D)


def point_density(pos, h):
    return kernel_matrix(pos, h).sum(axis=1)


def sample_density(pos, sampled_mask, h, rho=None):
    K = kernel_matrix(pos, h)
    if rho is None:
        rho = K.sum(axis=1)
    return K[:, sampled_mask].sum(axis=1) / rho


def flat_pairs(limit):
    """Lower-triangle pairs (i, j), j < i, in row-major enumeration order."""
    out = []
    i = 1
    while len(out) < limit:
        for j in range(i):
            out.append((i, j))
            if len(out) == limit:
                break
        i += 1
    return out


def local_cdf_points(pos, values, p, h, mask=None):
    """Neighbor values and kernel weights around ``p`` (optionally restricted by ``mask``)."""
    r = np.linalg.norm(pos - pos[p], axis=1)
    inside = r < h
    if mask is not None:
        inside &= mask
    w = np.array([kernel(x, h) for x in r[inside]])
    return values[inside], w


def local_error(pos, values, sampled_mask, h):
    """Per-point, per-dim Wasserstein error between full and sampled local distributions."""
    n, m = values.shape
    width = values.max(axis=0) - values.min(axis=0)
    out = np.zeros((n, m))
    for p in range(n):
        for dim in range(m):
            v_all, w_all = local_cdf_points(pos, values[:, dim], p, h)
            v_s, w_s = local_cdf_points(pos, values[:, dim], p, h, sampled_mask)
            if w_s.sum() == 0:
                out[p, dim] = width[dim]
            else:
                out[p, dim] = wasserstein_distance(v_all, v_s, w_all, w_s)
    return out


def exact_wasserstein(a, wa, b, wb) -> Fraction:
    """W1 between two weighted empirical distributions in exact rational arithmetic."""
    Wa = sum(map(Fraction, wa), Fraction(0))
    Wb = sum(map(Fraction, wb), Fraction(0))
    events = sorted([(float(v), Fraction(w) / Wa) for v, w in zip(a, wa)]
                    + [(float(v), -Fraction(w) / Wb) for v, w in zip(b, wb)])
    total, diff = Fraction(0), Fraction(0)
    for (x0, dw), (x1, _) in zip(events[:-1], events[1:]):
        diff += dw
        total += abs(diff) * (Fraction(x1) - Fraction(x0))
    return total


def local_error_exact(pos, values, sampled_mask, h, points):
    """Like :func:`local_error` for the listed points, in exact arithmetic."""
    width = values.max(axis=0) - values.min(axis=0)
    out = np.zeros((len(points), values.shape[1]))
    for row, p in enumerate(points):
        for dim in range(values.shape[1]):
            v_all, w_all = local_cdf_points(pos, values[:, dim], p, h)
            v_s, w_s = local_cdf_points(pos, values[:, dim], p, h, sampled_mask)
            if w_s.sum() == 0:
                out[row, dim] = width[dim]
            else:
                out[row, dim] = float(exact_wasserstein(v_all, w_all, v_s, w_s))
    return out


def local_entropy(pos, vals, h, n_bins):
    lo, hi = vals.min(), vals.max()
    if hi <= lo:
        return np.zeros(len(vals))
    bins = np.clip(np.floor(n_bins * (vals - lo) / (hi - lo)), 0, n_bins - 1).astype(int)
    K = kernel_matrix(pos, h)
    out = np.zeros(len(vals))
    for p in range(len(vals)):
        hist = np.bincount(bins, weights=K[p], minlength=n_bins)
        q = hist[hist > 0] / hist.sum()
        out[p] = max(0.0, -float(np.sum(q * np.log2(q))))
    return out


def vc_sample(pos, target, initial, h, rng, rho=None):
    """Plain-Python void-and-cluster: random start, exchanges, sequential fill.

    Returns indices in rank order (initial ones in draw order).
    """
    n = len(pos)
    K = kernel_matrix(pos, h)
    if rho is None:
        rho = K.sum(axis=1)
    picks = [int(i) for i in rng.choice(n, size=initial, replace=False)]
    S = np.zeros(n, dtype=bool)
    S[picks] = True
    order = list(picks)

    def dens():
        return K[:, S].sum(axis=1) / rho

    for _ in range(10 * initial):
        d = dens()
        tc = int(np.flatnonzero(S)[np.argmax(d[S])])
        S[tc] = False
        d = dens()
        lv = int(np.flatnonzero(~S)[np.argmin(d[~S])])
        S[lv] = True
        if lv == tc:
            break
        order[order.index(tc)] = lv
    while len(order) < target:
        d = dens()
        lv = int(np.flatnonzero(~S)[np.argmin(d[~S])])
        S[lv] = True
        order.append(lv)
    return np.array(order)


def min_pairwise_distance(pos):
    if len(pos) < 2:
        return math.inf
    D = pairwise(pos)
    np.fill_diagonal(D, np.inf)
    return float(D.min())
