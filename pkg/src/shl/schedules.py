"""Shift schedules: the closed-form discrete optimum, the sinh schedule, costs.

A discrete shift schedule distributes a terminal spatial shift across N steps
through interpolation weights a_0 = 0 <= a_1 <= ... <= a_N = 1.  Against a
one-step cost (c1 a_n + c2 (a_{n+1} - a_n))^2 the optimal increments are, with
r = 1 - c1/c2,

    b_i = r^{N-i} (1 - r^2) / (1 - r^{2N}),      a_n = sum_{i<=n} r^{n-i} b_i,

with total cost c2^2 (1 - r^2) / (1 - r^{2N})  (limit c2^2/N at r = 1).  The
continuous-time analogue against F(a) = int_0^T (L a_t + a'_t)^2 dt is

    a_t = sinh(L t) / sinh(L T),     F(a) = 2 L / (1 - exp(-2 L T)).

``brute_force_schedule`` solves the same quadratic program from the normal
equations as an independent oracle for the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ShiftSchedule",
    "ContinuousSchedule",
    "QuadratureError",
    "optimal_discrete_schedule",
    "optimal_discrete_cost",
    "discrete_cost",
    "brute_force_schedule",
    "continuous_schedule_sinh",
    "continuous_cost",
]

_SIMPSON_PANELS = 2**12
_ENDPOINT_TOL = 1e-9
_MONOTONE_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Raised when the Richardson check says the quadrature did not converge."""


@dataclass(frozen=True)
class ShiftSchedule:
    """Monotone interpolation weights a_0 = 0, ..., a_N = 1."""

    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("schedule needs at least the two endpoint values")
        if abs(a[0]) > 1e-12 or abs(a[-1] - 1.0) > 1e-12:
            raise ValueError(f"schedule must run from 0 to 1, got {a[0]}..{a[-1]}")
        if np.any(np.diff(a) < -1e-12):
            raise ValueError("schedule must be nondecreasing")
        a.setflags(write=False)
        object.__setattr__(self, "values", a)

    @property
    def n_steps(self) -> int:
        return self.values.size - 1

    def increments(self, r: float) -> np.ndarray:
        """The b-parameterization b_{n+1} = a_{n+1} - r a_n."""
        a = self.values
        return a[1:] - r * a[:-1]


def optimal_discrete_schedule(c1: float, c2: float, N: int) -> ShiftSchedule:
    """Closed-form minimizer of sum (c1 a_n + c2 (a_{n+1}-a_n))^2, c1 < c2."""
    _check_cost_params(c1, c2)
    if N < 1 or N != int(N):
        raise ValueError("N must be a positive integer")
    N = int(N)
    r = 1.0 - c1 / c2
    if r == 1.0:
        return ShiftSchedule(np.arange(N + 1) / N)
    b = r ** (N - np.arange(1, N + 1)) * (1.0 - r * r) / (1.0 - r ** (2 * N))
    a = np.zeros(N + 1)
    for n in range(N):
        a[n + 1] = r * a[n] + b[n]
    a[-1] = 1.0  # exact by construction; clamp the last ulp of rounding
    return ShiftSchedule(a)


def optimal_discrete_cost(c1: float, c2: float, N: int) -> float:
    """Cost of the optimal schedule: c2^2 (1-r^2)/(1-r^{2N}) (limit c2^2/N)."""
    _check_cost_params(c1, c2)
    if N < 1:
        raise ValueError("N must be a positive integer")
    r = 1.0 - c1 / c2
    if r == 1.0:
        return c2 * c2 / N
    return c2 * c2 * (1.0 - r * r) / (1.0 - r ** (2 * N))


def discrete_cost(s: ShiftSchedule, c1: float, c2: float) -> float:
    a = s.values
    terms = c1 * a[:-1] + c2 * np.diff(a)
    return float(terms @ terms)


def brute_force_schedule(c1: float, c2: float, N: int) -> ShiftSchedule:
    """Oracle for the closed form: solve the tridiagonal normal equations.

    Minimizes the cost over the interior values a_1..a_{N-1} (a_0 = 0 and
    a_N = 1 fixed).  The stationarity condition at index k is

        (alpha^2 + beta^2) a_k + alpha beta (a_{k-1} + a_{k+1}) = 0,

    with alpha = c1 - c2, beta = c2.  Solved unconstrained; monotonicity is
    asserted afterwards (it cannot fail for c1 < c2, so a violation means a
    bug, not a projection opportunity).
    """
    if N > 16:
        raise ValueError("brute-force oracle is restricted to N <= 16")
    _check_cost_params(c1, c2)
    if N < 1 or N != int(N):
        raise ValueError("N must be a positive integer")
    N = int(N)
    if N == 1:
        return ShiftSchedule(np.array([0.0, 1.0]))
    alpha, beta = c1 - c2, c2
    diag = np.full(N - 1, alpha * alpha + beta * beta)
    off = np.full(N - 2, alpha * beta)
    M = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    rhs = np.zeros(N - 1)
    rhs[-1] = -alpha * beta  # from the fixed boundary a_N = 1
    inner = np.linalg.solve(M, rhs)
    a = np.concatenate([[0.0], inner, [1.0]])
    if np.any(np.diff(a) < -1e-10):
        raise RuntimeError("unconstrained optimum violated monotonicity (should be impossible)")
    return ShiftSchedule(np.clip(a, 0.0, 1.0))


def _check_cost_params(c1: float, c2: float):
    if c2 <= 0:
        raise ValueError("c2 must be > 0")
    if c1 < 0:
        raise ValueError("c1 must be >= 0")
    if c1 >= c2:
        raise ValueError(f"closed form requires c1 < c2, got c1 = {c1}, c2 = {c2}")


@dataclass(frozen=True)
class ContinuousSchedule:
    """Schedule on [0, T]: vectorized value map t -> a_t and derivative t -> a'_t.

    Boundary values a_0 = 0, a_T = 1 and monotonicity are validated on a
    sampling grid at construction.
    """

    horizon: float
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be > 0")
        ts = np.linspace(0.0, self.horizon, 257)
        vals = np.asarray(self.value(ts), dtype=float)
        if abs(vals[0]) > _ENDPOINT_TOL or abs(vals[-1] - 1.0) > _ENDPOINT_TOL:
            raise ValueError(f"schedule must run from 0 to 1, got {vals[0]}..{vals[-1]}")
        if np.any(np.diff(vals) < -_MONOTONE_TOL):
            raise ValueError("schedule must be nondecreasing on the sampling grid")

    @classmethod
    def linear(cls, T: float) -> "ContinuousSchedule":
        return cls(T, lambda t: np.asarray(t) / T, lambda t: np.full_like(np.asarray(t, float), 1.0 / T))


def continuous_schedule_sinh(L: float, T: float) -> ContinuousSchedule:
    """The optimal schedule a_t = sinh(Lt)/sinh(LT) with analytic derivative.

    Evaluated in the overflow-safe form a_t = e^{L(t-T)} (1-e^{-2Lt})/(1-e^{-2LT}).
    """
    if L <= 0 or T <= 0:
        raise ValueError("L and T must be > 0")
    denom = -math.expm1(-2.0 * L * T)

    def value(t):
        t = np.asarray(t, dtype=float)
        return np.exp(L * (t - T)) * (-np.expm1(-2.0 * L * t)) / denom

    def derivative(t):
        t = np.asarray(t, dtype=float)
        return L * np.exp(L * (t - T)) * (1.0 + np.exp(-2.0 * L * t)) / denom

    return ContinuousSchedule(T, value, derivative)


def continuous_cost(s: ContinuousSchedule, L: float) -> float:
    """Composite-Simpson quadrature of int_0^T (L a_t + a'_t)^2 dt.

    Uses 2^12 panels with a Richardson check against 2^11 panels; raises
    QuadratureError (reporting the achieved tolerance) if the estimated error
    exceeds 1e-8 relative.  For the sinh schedule the result equals
    2L/(1 - exp(-2LT)).
    """
    fine = _simpson_cost(s, L, _SIMPSON_PANELS)
    coarse = _simpson_cost(s, L, _SIMPSON_PANELS // 2)
    err = abs(fine - coarse) / 15.0  # Simpson is 4th order
    if err > 1e-8 * max(1.0, abs(fine)):
        raise QuadratureError(
            f"quadrature did not converge: estimated error {err:.3e} on value {fine:.6e}"
        )
    return float(fine)


def _simpson_cost(s: ContinuousSchedule, L: float, panels: int) -> float:
    ts = np.linspace(0.0, s.horizon, 2 * panels + 1)
    g = L * np.asarray(s.value(ts), float) + np.asarray(s.derivative(ts), float)
    y = g * g
    h = s.horizon / (2 * panels)
    return (h / 3.0) * float(y[0] + y[-1] + 4.0 * y[1::2].sum() + 2.0 * y[2:-1:2].sum())
