"""Synthetic datasets: the radial sinc field and pathlines of analytic flows."""

from __future__ import annotations

import math

import numpy as np

from .core import PointCloud, TrajectoryDataset, seeded_rng
from .errors import InvalidArgument


def sinc_radial(r):
    """``sin(pi r) / (pi r)`` with the removable singularity filled in."""
    return np.sinc(np.asarray(r, dtype=np.float64))


def generate_sinc(n: int, seed: int = 0, half_width: float = 5.0) -> PointCloud:
    """``n`` uniform points in ``[-5, 5]^2`` carrying ``sinc(|p|)``."""
    if n < 1:
        raise InvalidArgument("n must be positive")
    pos = seeded_rng(seed).uniform(-half_width, half_width, size=(n, 2))
    return PointCloud(pos, sinc_radial(np.linalg.norm(pos, axis=1))[:, None])


def rk4_step(f, x, dt):
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(f, x0, t_span: float, dt: float, record_every: int = 1):
    """Fixed-step RK4 from ``x0`` over ``[0, t_span]``; returns ``(times, states)``."""
    if not dt > 0:
        raise InvalidArgument("dt must be positive")
    steps = int(round(t_span / dt))
    if not math.isclose(steps * dt, t_span, rel_tol=1e-9, abs_tol=1e-12):
        raise InvalidArgument("t_span must be a multiple of dt")
    x = np.asarray(x0, dtype=np.float64)
    out = [x]
    for s in range(1, steps + 1):
        x = rk4_step(f, x, dt)
        if s % record_every == 0:
            out.append(x)
    times = np.arange(len(out)) * dt * record_every
    return times, np.stack(out)


def abc_velocity(A=math.sqrt(3.0), B=math.sqrt(2.0), C=1.0):
    def f(x):
        return np.stack([A * np.sin(x[..., 2]) + C * np.cos(x[..., 1]),
                         B * np.sin(x[..., 0]) + A * np.cos(x[..., 2]),
                         C * np.sin(x[..., 1]) + B * np.cos(x[..., 0])], axis=-1)
    return f


def generate_abc(count: int, t_span: float = 10.0, dt: float = 0.1, seed: int = 0,
                 A=math.sqrt(3.0), B=math.sqrt(2.0), C=1.0, record_every: int = 1) -> TrajectoryDataset:
    """Pathlines of the steady ABC flow seeded uniformly in ``[0, 2 pi]^3``.

    Values are the velocity at each recorded position.
    """
    if count < 1:
        raise InvalidArgument("count must be positive")
    f = abc_velocity(A, B, C)
    x0 = seeded_rng(seed).uniform(0.0, 2.0 * math.pi, size=(count, 3))
    times, pos = integrate(f, x0, t_span, dt, record_every)
    T = len(times)
    return TrajectoryDataset(times, np.arange(count), np.zeros(count), np.full(count, T - 1),
                             pos, f(pos))


def swirl_velocity(stream: float = 1.0, circulation: float = 2.0, core: float = 0.3,
                   centers=((1.0, 0.3), (2.0, -0.3), (3.0, 0.3))):
    """Uniform stream along ``+x`` plus Lamb-Oseen vortices of alternating sign.

    Each vortex contributes a tangential speed
    ``circulation / (2 pi r) * (1 - exp(-r^2 / core^2))`` about its center.
    """
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    signs = np.where(np.arange(len(centers)) % 2 == 0, 1.0, -1.0)

    def f(x):
        u = np.full(x.shape[:-1], float(stream))
        v = np.zeros(x.shape[:-1])
        for (cx, cy), sgn in zip(centers, signs):
            dx = x[..., 0] - cx
            dy = x[..., 1] - cy
            r2 = dx * dx + dy * dy
            with np.errstate(invalid="ignore", divide="ignore"):
                g = np.where(r2 > 0, -np.expm1(-r2 / core ** 2) / r2, 1.0 / core ** 2)
            g *= sgn * circulation / (2.0 * math.pi)
            u -= g * dy
            v += g * dx
        return np.stack([u, v], axis=-1)
    return f


def generate_swirl(count: int = 10000, steps: int = 20, dt: float = 0.1, seed: int = 0,
                   length: float = 4.0, half_height: float = 1.0, stream: float = 1.0,
                   circulation: float = 2.0, core: float = 0.3, substeps: int = 4) -> TrajectoryDataset:
    """Pathlines through a vortex-laden channel ``[0, length] x [-h, h]``.

    At step 0 the channel is filled uniformly. At every later step fresh
    particles are released in the inflow strip ``[0, stream * dt)`` at the same
    density, and a particle's trajectory ends once it has left through
    ``x = length``. ``count`` is the total number of trajectories. Values are
    the two velocity components.
    """
    if count < 1 or steps < 1:
        raise InvalidArgument("count and steps must be positive")
    if not (dt > 0 and stream > 0 and length > 0 and half_height > 0):
        raise InvalidArgument("dt, stream, length and half_height must be positive")
    f = swirl_velocity(stream, circulation, core,
                       ((0.25 * length, 0.3 * half_height), (0.5 * length, -0.3 * half_height),
                        (0.75 * length, 0.3 * half_height)))
    strip = stream * dt
    area0 = length
    total = area0 + (steps - 1) * strip
    born = np.zeros(count, dtype=np.int64)
    n0 = int(round(count * area0 / total))
    if steps > 1:
        per = np.diff(np.round(np.linspace(n0, count, steps)).astype(np.int64))
        born[n0:] = np.repeat(np.arange(1, steps), per)
    rng = seeded_rng(seed)
    seeds = np.column_stack([rng.uniform(0.0, 1.0, count), rng.uniform(-half_height, half_height, count)])
    seeds[:, 0] *= np.where(born == 0, length, strip)

    pos = np.full((steps, count, 2), np.nan)
    x = np.full((count, 2), np.nan)
    end = np.full(count, steps - 1, dtype=np.int64)
    inside = np.zeros(count, dtype=bool)
    h = dt / substeps
    for i in range(steps):
        if i > 0:
            live = np.flatnonzero(inside)
            y = x[live]
            for _ in range(substeps):
                y = rk4_step(f, y, h)
            x[live] = y
            gone = live[y[:, 0] > length]
            end[gone] = i - 1
            inside[gone] = False
            x[gone] = np.nan
        new = born == i
        x[new] = seeds[new]
        inside |= new
        pos[i, inside] = x[inside]
    values = np.full_like(pos, np.nan)
    ok = np.isfinite(pos[..., 0])
    values[ok] = f(pos[ok])
    return TrajectoryDataset(np.arange(steps) * dt, np.arange(count), born, end, pos, values)
