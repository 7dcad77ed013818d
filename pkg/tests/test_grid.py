import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from vcsample.errors import GridTooFine, InvalidArgument, RadiusExceedsCell
from vcsample.grid import build_grid, max_cells_per_axis, morton_decode, morton_encode, neighbors


def test_morton_2d_z_order():
    codes = morton_encode(np.array([[0, 0], [1, 0], [0, 1], [1, 1], [2, 0]]), 2)
    np.testing.assert_array_equal(codes, [0, 1, 2, 3, 4])


@given(st.integers(1, 4).flatmap(
    lambda d: arrays(np.int64, (20, d), elements=st.integers(0, 2 ** min(15, 63 // d) - 1))))
def test_morton_roundtrip(coords):
    d = coords.shape[1]
    bits = min(15, 63 // d)
    np.testing.assert_array_equal(morton_decode(morton_encode(coords, bits), d, bits), coords)


def test_max_cells_per_axis():
    assert max_cells_per_axis(1) == 2 ** 20
    assert max_cells_per_axis(3) == 2 ** 20
    assert max_cells_per_axis(4) == 2 ** 15


@given(st.integers(1, 4), st.integers(1, 200), st.floats(0.05, 1.0), st.integers(0, 10**6))
def test_neighbors_match_brute_force(d, n, h, seed):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0, 1, size=(n, d))
    g = build_grid(pos, h)
    for q in list(pos[:5]) + [rng.uniform(0, 1, size=d)]:
        got = neighbors(g, q, h)
        want = np.flatnonzero(np.linalg.norm(pos - q, axis=1) < h)
        np.testing.assert_array_equal(got, want)


@given(st.integers(1, 3), st.integers(1, 300), st.floats(0.05, 0.5), st.integers(0, 10**6))
def test_buckets_partition_points(d, n, h, seed):
    pos = np.random.default_rng(seed).uniform(0, 1, size=(n, d))
    g = build_grid(pos, h)
    assert np.all(np.diff(g.keys) > 0)
    assert sorted(g.point_ids.tolist()) == list(range(n))
    coords = g.cell_coords(pos)
    for c in range(g.n_cells):
        b = g.bucket(c)
        assert np.all(np.diff(b) > 0)
        assert np.all(g.point_cell[b] == c)
        assert len({tuple(x) for x in coords[b]}) == 1


def test_neighbor_cells_are_adjacent_occupied_cells():
    pos = np.random.default_rng(5).uniform(0, 1, size=(400, 2))
    g = build_grid(pos, 0.1)
    cc = morton_decode(g.keys, 2, g.bits)
    for c in range(g.n_cells):
        row = g.neighbor_cells[c]
        valid = row[row >= 0]
        assert np.all(row[len(valid):] == -1)
        want = np.flatnonzero(np.all(np.abs(cc - cc[c]) <= 1, axis=1))
        assert sorted(valid.tolist()) == want.tolist()


def test_errors():
    pos = np.random.default_rng(0).uniform(0, 1, size=(10, 2))
    g = build_grid(pos, 0.2)
    with pytest.raises(RadiusExceedsCell):
        neighbors(g, pos[0], 0.3)
    with pytest.raises(InvalidArgument):
        build_grid(pos, 0.0)
    with pytest.raises(GridTooFine):
        build_grid(pos, 1e-9)


def test_single_point_and_coincident_points():
    g = build_grid(np.zeros((1, 3)), 1.0)
    assert g.n_cells == 1
    np.testing.assert_array_equal(neighbors(g, np.zeros(3), 1.0), [0])
    g = build_grid(np.ones((5, 2)), 0.5)
    np.testing.assert_array_equal(neighbors(g, np.ones(2), 0.5), np.arange(5))
