import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import random_cloud
from vcsample.core import PointCloud
from vcsample.density import compute_point_density
from vcsample.errors import AlreadySampled, ConfigMismatch, InvalidArgument, NotSampled
from vcsample.grid import build_grid
from vcsample.kernel import KernelSpec


def field_for(cloud, h, importance=None):
    return compute_point_density(cloud, build_grid(cloud.positions, h), KernelSpec(h), importance)


def test_two_points_half_support():
    c = PointCloud([[0.0, 0.0], [0.5, 0.0]])
    f = field_for(c, 1.0)
    np.testing.assert_allclose(f.point_density, [1.25, 1.25])
    f.add_sample(0)
    assert f.sample_density_at(0) == pytest.approx(1.0 / 1.25)
    assert f.sample_density_at(1) == pytest.approx(0.25 / 1.25)


def test_isolated_point_has_unit_density():
    f = field_for(PointCloud([[0.0], [5.0]]), 1.0)
    np.testing.assert_array_equal(f.point_density, [1.0, 1.0])


@given(st.integers(1, 3), st.integers(2, 150), st.floats(0.05, 0.6), st.integers(0, 10**6))
def test_point_density_matches_oracle(d, n, h, seed):
    c = random_cloud(n, d, 0, seed)
    f = field_for(c, h)
    np.testing.assert_allclose(f.point_density, oracles.point_density(np.asarray(c.positions), h),
                               rtol=1e-12)


@given(st.integers(1, 3), st.integers(5, 150), st.floats(0.05, 0.6), st.integers(0, 10**6),
       st.lists(st.tuples(st.booleans(), st.integers(0, 10**6)), max_size=40))
def test_incremental_density_matches_oracle(d, n, h, seed, ops):
    c = random_cloud(n, d, 0, seed)
    f = field_for(c, h)
    for add, k in ops:
        i = k % n
        if f.sampled[i]:
            f.remove_sample(i)
        elif add:
            f.add_sample(i)
    want = oracles.sample_density(np.asarray(c.positions), f.sampled, h)
    np.testing.assert_allclose(f.sample_density(), want, rtol=1e-12, atol=1e-300)


@given(st.integers(20, 200), st.integers(0, 10**6))
def test_add_remove_is_bit_exact(n, seed):
    c = random_cloud(n, 2, 0, seed)
    f = field_for(c, 0.2)
    rng = np.random.default_rng(seed)
    f.add_samples(rng.choice(n, size=n // 4, replace=False))
    before = f.numerator.copy()
    s = int(np.flatnonzero(~f.sampled)[0])
    f.add_sample(s)
    f.remove_sample(s)
    np.testing.assert_array_equal(f.numerator, before)


@given(st.integers(20, 200), st.integers(0, 10**6))
def test_batch_add_equals_sequential_adds(n, seed):
    c = random_cloud(n, 2, 0, seed)
    ids = np.random.default_rng(seed).choice(n, size=n // 3, replace=False)
    a = field_for(c, 0.25)
    b = field_for(c, 0.25)
    a.add_samples(ids)
    for s in ids[::-1]:
        b.add_sample(s)
    np.testing.assert_array_equal(a.numerator, b.numerator)


def test_affected_points_are_neighbors():
    c = random_cloud(200, 2, 0, 1)
    f = field_for(c, 0.15)
    got = np.sort(f.add_sample(7))
    want = np.flatnonzero(np.linalg.norm(c.positions - c.positions[7], axis=1) < 0.15)
    np.testing.assert_array_equal(got, want)
    np.testing.assert_array_equal(np.sort(f.neighborhood(7)), want)


def test_errors():
    c = random_cloud(30, 2, 0, 2)
    f = field_for(c, 0.3)
    f.add_sample(3)
    with pytest.raises(AlreadySampled):
        f.add_sample(3)
    with pytest.raises(AlreadySampled):
        f.add_samples([4, 4])
    with pytest.raises(NotSampled):
        f.remove_sample(5)
    with pytest.raises(ConfigMismatch):
        compute_point_density(c, build_grid(c.positions, 0.1), KernelSpec(0.3))
    with pytest.raises(ConfigMismatch):
        compute_point_density(c, build_grid(c.positions[:10], 0.3), KernelSpec(0.3))
    with pytest.raises(InvalidArgument):
        field_for(c, 0.3, importance=-np.ones(30))


def test_importance_scales_point_density_with_floor():
    c = random_cloud(50, 2, 0, 4)
    imp = np.zeros(50)
    imp[:25] = 1.0 / 25
    f = field_for(c, 0.3, imp)
    np.testing.assert_allclose(f.point_density[:25], f.raw_point_density[:25] / 25)
    assert np.all(f.point_density[25:] > 0)
