import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import random_cloud
from vcsample.core import PointCloud, SampleResult
from vcsample.errors import InvalidArgument, ShapeMismatch, UnsupportedDimension
from vcsample.evaluation import (RasterGrid, radial_profile, raster_like, reconstruct,
                                 sample_spectrum, snr_db)


def result(idx, weights=None):
    idx = np.asarray(idx)
    w = np.ones(len(idx)) if weights is None else weights
    return SampleResult(idx, np.zeros(len(idx)), w, np.nan)


def test_constant_field_is_reproduced():
    rng = np.random.default_rng(0)
    c = PointCloud(rng.uniform(size=(300, 2)), np.full(300, 2.5))
    r = reconstruct(c, result(rng.choice(300, 20, replace=False)), 32)
    np.testing.assert_allclose(r.values, 2.5)


def test_single_sample_fills_grid():
    c = random_cloud(100, 2, 1, 1)
    r = reconstruct(c, result([5]), 16, kernel_size=0.05)
    np.testing.assert_array_equal(r.values, np.full((16, 16), c.values[5, 0]))


def test_reconstruct_matches_direct_formula():
    c = random_cloud(200, 2, 1, 2)
    idx = np.arange(0, 200, 4)
    w = np.random.default_rng(2).uniform(0.5, 2.0, len(idx))
    h = 0.3
    r = reconstruct(c, result(idx, w), 12, kernel_size=h)
    centers = r.cell_centers()
    pos = np.asarray(c.positions)[idx]
    vals = np.asarray(c.values)[idx, 0]
    for q, got in zip(centers, r.values.ravel()):
        k = np.array([oracles.kernel(x, h) for x in np.linalg.norm(pos - q, axis=1)]) * w
        if k.sum() > 0:
            assert got == pytest.approx(np.sum(k * vals) / k.sum(), rel=1e-12)
        else:
            assert got == vals[np.argmin(np.linalg.norm(pos - q, axis=1))]


def test_reconstruct_rejects_empty():
    with pytest.raises(InvalidArgument):
        reconstruct(random_cloud(10, 2, 1, 0), result([]), 8)


def test_raster_geometry():
    r = raster_like(np.array([[0.0, 2.0], [0.0, 1.0]]), (4, 2))
    assert r.resolution == (4, 2)
    np.testing.assert_allclose(r.cell_centers()[:2], [[0.25, 0.25], [0.25, 0.75]])
    with pytest.raises(InvalidArgument):
        raster_like(np.array([[0.0, 1.0]]), 1)
    with pytest.raises(ShapeMismatch):
        RasterGrid(np.zeros((2, 2)), [0.0], [1.0, 1.0])


def test_snr_examples():
    ref = RasterGrid(np.random.default_rng(0).normal(size=(8, 8)) + 3.0, [0, 0], [1, 1])
    assert snr_db(ref, ref) == math.inf
    assert snr_db(ref, RasterGrid(np.zeros((8, 8)), [0, 0], [1, 1])) == pytest.approx(0.0, abs=1e-12)
    rec = RasterGrid(ref.values * 0.9, [0, 0], [1, 1])
    assert snr_db(ref, rec) == pytest.approx(20.0)
    with pytest.raises(ShapeMismatch):
        snr_db(ref, RasterGrid(np.zeros((4, 4)), [0, 0], [1, 1]))


@given(st.floats(1e-6, 0.5), st.floats(1e-6, 0.5))
def test_snr_decreases_with_perturbation(a, b):
    ref = np.linspace(1.0, 2.0, 16).reshape(4, 4)
    lo, hi = sorted((a, b))
    s_lo = snr_db(ref, ref * (1 + lo))
    s_hi = snr_db(ref, ref * (1 + hi))
    assert math.isfinite(s_lo) and s_lo >= s_hi


def test_lattice_spectrum_has_spikes_at_lattice_frequency():
    g = (np.arange(16) + 0.5) / 16
    pos = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    grid, _ = sample_spectrum(pos, 64, bounds=[[0, 1], [0, 1]])
    power = np.fft.ifftshift(grid.values)
    # a 16-periodic comb only has energy at multiples of 16
    peaks = np.argwhere(power > 1e-9 * power.max())
    assert len(peaks) > 0 and np.all(peaks % 16 == 0)
    assert power[16, 0] == pytest.approx(power.max())


def test_spectrum_requires_2d():
    with pytest.raises(UnsupportedDimension):
        sample_spectrum(np.zeros((10, 3)), 16)


def test_radial_profile_of_flat_power():
    prof = radial_profile(np.ones((64, 64)), n_annuli=16)
    np.testing.assert_allclose(prof.power[1:], 1.0)
    assert prof.counts[0] > 0 or np.isnan(prof.power[0])
    assert prof.band(0.0, 0.1) == pytest.approx(1.0)


def _angular_spread(pos):
    grid, prof = sample_spectrum(pos, 128, bounds=[[0, 1], [0, 1]])
    p = np.fft.ifftshift(grid.values)
    f = np.fft.fftfreq(128) * 128
    r = np.hypot(f[:, None], f[None, :])
    ring = (r >= 32) & (r < 40)
    vals = p[ring]
    return np.std(vals) / np.mean(vals)


def test_vc_spectrum_more_isotropic_than_lattice():
    from vcsample.core import SamplerConfig
    from vcsample.sampler import sample
    c = random_cloud(20000, 2, 0, 7)
    res = sample(c, SamplerConfig(1024, rng_seed=0))
    vc = np.asarray(c.positions)[res.indices_by_rank]
    g = (np.arange(32) + 0.5) / 32
    lattice = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    assert _angular_spread(vc) < _angular_spread(lattice)
