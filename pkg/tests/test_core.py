import numpy as np
import pytest
from hypothesis import given, strategies as st

from vcsample.core import (UNRANKED, PointCloud, SampleResult, SamplerConfig, TrajectoryDataset,
                           default_kernel_size, seeded_rng, validate, validate_trajectories)
from vcsample.errors import (EmptyDataset, InvalidArgument, InvalidData, TooManySamples,
                             ValidationError)


def test_point_cloud_is_read_only_float64():
    c = PointCloud(np.arange(6, dtype=np.int32).reshape(3, 2), [1, 2, 3])
    assert c.positions.dtype == np.float64 and c.values.shape == (3, 1)
    with pytest.raises(ValueError):
        c.positions[0, 0] = 5.0


def test_point_cloud_shape_checks():
    with pytest.raises(InvalidArgument):
        PointCloud(np.zeros((3, 2)), np.zeros((4, 1)))
    with pytest.raises(InvalidArgument):
        PointCloud(np.zeros((2, 2, 2)))


def test_validate_reports_problems():
    with pytest.raises(EmptyDataset):
        validate(PointCloud(np.zeros((0, 2))))
    with pytest.raises(InvalidData, match="point 1, axis 0"):
        validate(PointCloud([[0.0, 0.0], [np.nan, 1.0]]))
    with pytest.raises(InvalidData, match="dimension"):
        validate(PointCloud(np.zeros((2, 5))))
    with pytest.raises(InvalidData, match="value"):
        validate(PointCloud(np.zeros((2, 2)), [0.0, np.inf]))
    # validation errors are ValueErrors too
    assert issubclass(InvalidData, ValidationError) and issubclass(InvalidData, ValueError)


def test_bbox_and_subset():
    c = PointCloud([[0.0, 1.0], [2.0, -1.0], [1.0, 0.0]], [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(c.bbox, [[0.0, 2.0], [-1.0, 1.0]])
    s = c.subset([2, 0])
    np.testing.assert_array_equal(s.values[:, 0], [3.0, 1.0])


def test_default_kernel_size_formula():
    c = PointCloud(np.array([[0.0, 0.0], [4.0, 1.0], [2.0, 0.5], [1.0, 1.0]]))
    assert default_kernel_size(c) == pytest.approx(2.0 * (4.0 / 4) ** 0.5)


def test_default_kernel_size_degenerate_axis():
    c = PointCloud(np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert default_kernel_size(c) == pytest.approx(2.0 * (4.0 / 2) ** 0.5)


@given(st.integers(0, 2**63))
def test_seeded_rng_reproducible(seed):
    a = seeded_rng(seed).integers(0, 1 << 30, size=5)
    b = seeded_rng(seed).integers(0, 1 << 30, size=5)
    np.testing.assert_array_equal(a, b)


def test_config_validation():
    with pytest.raises(InvalidArgument):
        SamplerConfig(0)
    with pytest.raises(InvalidArgument):
        SamplerConfig(10, initial_fraction=0.0)
    with pytest.raises(InvalidArgument):
        SamplerConfig(5, initial_fraction=0.1)
    with pytest.raises(InvalidArgument):
        SamplerConfig(10, mode="bogus")
    with pytest.raises(InvalidArgument):
        SamplerConfig(10, error_threshold=-1.0)
    assert SamplerConfig(100).initial_count == 10
    assert SamplerConfig(15, initial_fraction=0.1).initial_count == 2
    with pytest.raises(TooManySamples):
        SamplerConfig(5, initial_fraction=0.5).check_against(PointCloud(np.zeros((4, 2))))


def test_sample_result_prefix_and_ranks():
    r = SampleResult([4, 1, 3], [0.1, 0.2, 0.3], [1.0, 1.0, 1.0], 0.5)
    np.testing.assert_array_equal(r.prefix(2), [4, 1])
    ranks = r.ranks(6)
    assert ranks[4] == 0 and ranks[1] == 1 and ranks[3] == 2
    assert ranks[0] == UNRANKED
    assert len(r) == 3


def test_trajectory_dataset_alive_and_validation():
    T, N = 3, 2
    pos = np.full((T, N, 2), np.nan)
    pos[:, 0] = 0.0
    pos[1:, 1] = 1.0
    data = TrajectoryDataset([0.0, 1.0, 2.0], [10, 11], [0, 1], [2, 2], pos)
    validate_trajectories(data)
    np.testing.assert_array_equal(data.alive(0), [0])
    np.testing.assert_array_equal(data.alive(2), [0, 1])
    assert data.cloud_at(2).n == 2
    bad = TrajectoryDataset([0.0, 1.0, 2.0], [10, 11], [0, 0], [2, 2], pos)
    with pytest.raises(InvalidData):
        validate_trajectories(bad)
    with pytest.raises(InvalidData):
        validate_trajectories(TrajectoryDataset([0.0, 1.0, 2.0], [1, 1], [0, 1], [2, 2], pos))
