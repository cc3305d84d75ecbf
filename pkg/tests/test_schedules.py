import math

import numpy as np
import pytest

from shl.schedules import (
    ContinuousSchedule,
    QuadratureError,
    ShiftSchedule,
    brute_force_schedule,
    continuous_cost,
    continuous_schedule_sinh,
    discrete_cost,
    optimal_discrete_cost,
    optimal_discrete_schedule,
)


def closed_form_cost(c1, c2, N):
    r = 1.0 - c1 / c2
    if r == 1.0:
        return c2**2 / N
    return c2**2 * (1.0 - r**2) / (1.0 - r ** (2 * N))


class TestShiftSchedule:
    def test_endpoints_enforced(self):
        with pytest.raises(ValueError):
            ShiftSchedule(np.array([0.1, 1.0]))
        with pytest.raises(ValueError):
            ShiftSchedule(np.array([0.0, 0.9]))

    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            ShiftSchedule(np.array([0.0, 0.6, 0.5, 1.0]))

    def test_increments(self):
        s = ShiftSchedule(np.array([0.0, 0.4, 1.0]))
        assert np.allclose(s.increments(0.9), [0.4, 1.0 - 0.9 * 0.4])
        assert s.n_steps == 2

    def test_read_only(self):
        s = ShiftSchedule(np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            s.values[0] = 0.5


def test_two_step_optimal_schedule_frozen():
    s = optimal_discrete_schedule(1.0, 2.0, 2)
    assert np.allclose(s.values, [0.0, 0.4, 1.0], atol=1e-15)
    # cost c2^2 (1-r^2)/(1-r^4) with r = 0.5
    assert discrete_cost(s, 1.0, 2.0) == pytest.approx(3.2, rel=1e-14)
    assert optimal_discrete_cost(1.0, 2.0, 2) == pytest.approx(3.2, rel=1e-15)


def test_single_step_schedule():
    s = optimal_discrete_schedule(1.0, 2.0, 1)
    assert np.allclose(s.values, [0.0, 1.0])
    assert discrete_cost(s, 1.0, 2.0) == pytest.approx(4.0)  # c2^2, one full jump


def test_zero_c1_gives_uniform_schedule():
    s = optimal_discrete_schedule(0.0, 1.5, 4)
    assert np.allclose(s.values, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)
    assert optimal_discrete_cost(0.0, 1.5, 4) == pytest.approx(1.5**2 / 4.0, rel=1e-15)


def test_matches_brute_force_oracle_on_small_instances():
    rng = np.random.default_rng(11)
    for _ in range(25):
        c2 = rng.uniform(0.5, 3.0)
        c1 = c2 * rng.uniform(0.0, 0.95)
        n = int(rng.integers(1, 9))
        a = optimal_discrete_schedule(c1, c2, n)
        b = brute_force_schedule(c1, c2, n)
        assert np.max(np.abs(a.values - b.values)) <= 1e-8
        assert discrete_cost(a, c1, c2) <= discrete_cost(b, c1, c2) * (1 + 1e-12) + 1e-12


def test_optimal_cost_matches_closed_form():
    rng = np.random.default_rng(12)
    for _ in range(50):
        c2 = rng.uniform(0.5, 3.0)
        c1 = c2 * rng.uniform(0.0, 0.95)
        n = int(rng.integers(1, 40))
        got = optimal_discrete_cost(c1, c2, n)
        assert abs(got - closed_form_cost(c1, c2, n)) <= 1e-10 * max(1.0, got)


def test_optimal_dominates_random_schedules():
    rng = np.random.default_rng(13)
    c1, c2, n = 0.7, 1.9, 6
    best = optimal_discrete_cost(c1, c2, n)
    for _ in range(100):
        interior = np.sort(rng.uniform(0.0, 1.0, n - 1))
        s = ShiftSchedule(np.concatenate([[0.0], interior, [1.0]]))
        assert discrete_cost(s, c1, c2) >= best - 1e-12


def test_brute_force_rejects_large_n():
    with pytest.raises(ValueError):
        brute_force_schedule(1.0, 2.0, 17)


def test_cost_parameter_validation():
    for bad in [(2.0, 1.0, 2), (1.0, 1.0, 2), (-0.1, 1.0, 2), (0.0, 0.0, 2)]:
        with pytest.raises(ValueError):
            optimal_discrete_schedule(*bad)
        with pytest.raises(ValueError):
            optimal_discrete_cost(*bad)


class TestContinuousSchedule:
    def test_linear(self):
        s = ContinuousSchedule.linear(2.0)
        assert s.value(0.0) == 0.0
        assert s.value(2.0) == pytest.approx(1.0)
        assert s.derivative(1.3) == pytest.approx(0.5)

    def test_boundary_validation(self):
        with pytest.raises(ValueError):
            ContinuousSchedule(1.0, lambda t: t + 0.1, lambda t: 1.0)

    def test_monotonicity_validation(self):
        with pytest.raises(ValueError):
            ContinuousSchedule(
                1.0,
                lambda t: t - 0.3 * np.sin(2 * math.pi * t),
                lambda t: 1.0 - 0.6 * math.pi * np.cos(2 * math.pi * t),
            )


def test_sinh_schedule_values():
    s = continuous_schedule_sinh(1.0, 1.0)
    assert s.value(0.0) == pytest.approx(0.0, abs=1e-15)
    assert s.value(1.0) == pytest.approx(1.0, rel=1e-14)
    # closed form sinh(L t)/sinh(L T)
    for t in (0.25, 0.5, 0.9):
        assert s.value(t) == pytest.approx(math.sinh(t) / math.sinh(1.0), rel=1e-13)
        assert s.derivative(t) == pytest.approx(math.cosh(t) / math.sinh(1.0), rel=1e-13)


def test_sinh_cost_matches_closed_form():
    for L, T in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.7), (2.0, 25.0)]:
        s = continuous_schedule_sinh(L, T)
        closed = 2.0 * L / (-math.expm1(-2.0 * L * T))
        assert abs(continuous_cost(s, L) - closed) <= 1e-8 * max(1.0, closed)


def test_sinh_cost_frozen_value():
    got = continuous_cost(continuous_schedule_sinh(1.0, 1.0), 1.0)
    assert got == pytest.approx(2.3130352854993315, rel=1e-12)


def test_sinh_beats_perturbed_schedules():
    L, T = 1.0, 1.0
    base = continuous_schedule_sinh(L, T)
    best = continuous_cost(base, L)
    rng = np.random.default_rng(14)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        eps = rng.uniform(0.01, 0.05) * rng.choice([-1.0, 1.0])
        w = math.pi * k / T

        def val(t, _v=base.value, _e=eps, _w=w):
            return _v(t) + _e * np.sin(_w * t)

        def der(t, _d=base.derivative, _e=eps, _w=w):
            return _d(t) + _e * _w * np.cos(_w * t)

        perturbed = ContinuousSchedule(T, val, der)
        assert continuous_cost(perturbed, L) > best + 1e-6


def test_small_l_limit_approaches_linear_schedule():
    s = continuous_schedule_sinh(1e-4, 1.0)
    lin = ContinuousSchedule.linear(1.0)
    ts = np.linspace(0.0, 1.0, 101)
    gap = max(abs(s.value(t) - lin.value(t)) for t in ts)
    assert gap < 1e-6


def test_quadrature_error_on_rough_integrand():
    # derivative deliberately oscillates far faster than the panel width
    s = ContinuousSchedule(1.0, lambda t: t, lambda t: 1.0 + np.sin(3.7e6 * t))
    with pytest.raises(QuadratureError, match="did not converge"):
        continuous_cost(s, 1.0)


def test_linear_schedule_cost():
    # (L t + 1)^2 integrated over [0, 1] = L^2/3 + L + 1
    got = continuous_cost(ContinuousSchedule.linear(1.0), 2.0)
    assert got == pytest.approx(4.0 / 3.0 + 2.0 + 1.0, rel=1e-12)
