import math

import numpy as np
import pytest

from vcsample.errors import InvalidArgument
from vcsample.generators import (abc_velocity, generate_abc, generate_sinc, generate_swirl,
                                 integrate, rk4_step, sinc_radial, swirl_velocity)


def test_sinc_values():
    assert sinc_radial(0.0) == 1.0
    assert sinc_radial(1.0) == pytest.approx(0.0, abs=1e-16)
    assert sinc_radial(0.5) == pytest.approx(2 / math.pi)


def test_generate_sinc_domain_and_determinism():
    c = generate_sinc(1000, seed=3)
    assert c.n == 1000 and c.d == 2 and c.m == 1
    assert np.all(np.abs(c.positions) <= 5.0)
    np.testing.assert_allclose(c.values[:, 0], np.sinc(np.linalg.norm(c.positions, axis=1)))
    assert c == generate_sinc(1000, seed=3)
    assert c != generate_sinc(1000, seed=4)
    with pytest.raises(InvalidArgument):
        generate_sinc(0)


def test_abc_rhs_at_origin():
    v = abc_velocity()(np.zeros(3))
    np.testing.assert_allclose(v, [1.0, math.sqrt(3), math.sqrt(2)])
    x = rk4_step(abc_velocity(), np.zeros(3), 1e-6)
    np.testing.assert_allclose(x / 1e-6, [1.0, math.sqrt(3), math.sqrt(2)], rtol=1e-5)


def test_abc_zero_field_is_stationary():
    d = generate_abc(20, t_span=1.0, dt=0.1, A=0.0, B=0.0, C=0.0)
    np.testing.assert_array_equal(d.positions, np.broadcast_to(d.positions[0], d.positions.shape))
    assert d.n_steps == 11 and np.all(d.start == 0) and np.all(d.end == 10)


def test_abc_seeds_in_box_and_values_are_velocity():
    d = generate_abc(50, t_span=0.5, dt=0.1, seed=2)
    assert np.all((d.positions[0] >= 0) & (d.positions[0] <= 2 * math.pi))
    np.testing.assert_allclose(d.values, abc_velocity()(d.positions))


def test_rk4_is_fourth_order_on_linear_ode():
    f = lambda x: -x  # noqa: E731
    errs = [abs(integrate(f, np.array([1.0]), 1.0, dt)[1][-1, 0] - math.exp(-1.0))
            for dt in (0.1, 0.05)]
    assert 12 < errs[0] / errs[1] < 20


def test_integrate_checks():
    with pytest.raises(InvalidArgument):
        integrate(lambda x: x, np.zeros(1), 1.0, 0.0)
    with pytest.raises(InvalidArgument):
        integrate(lambda x: x, np.zeros(1), 1.0, 0.3)


def test_swirl_velocity_core_is_regular():
    f = swirl_velocity(stream=0.0, centers=((0.0, 0.0),))
    np.testing.assert_allclose(f(np.zeros(2)), [0.0, 0.0])
    v = f(np.array([0.5, 0.0]))
    assert v[0] == pytest.approx(0.0) and v[1] > 0


def test_swirl_dataset_structure():
    d = generate_swirl(2000, steps=10, dt=0.1, seed=1)
    assert d.n_trajectories == 2000 and d.n_steps == 10
    assert np.sum(d.start == 0) > 0.6 * 2000
    assert np.any(d.start > 0) and np.any(d.end < 9)
    for k in range(0, 2000, 97):
        a, b = d.start[k], d.end[k]
        inside = d.positions[a:b + 1, k]
        assert np.all(np.isfinite(inside))
        assert np.all(inside[:, 0] <= 4.0)
        assert np.all(np.isnan(d.positions[:a, k])) and np.all(np.isnan(d.positions[b + 1:, k]))
    born = d.start > 0
    x_birth = d.positions[d.start[born], np.flatnonzero(born), 0]
    assert np.all((x_birth >= 0) & (x_birth < 0.1))
    assert d == generate_swirl(2000, steps=10, dt=0.1, seed=1)
