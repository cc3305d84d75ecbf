"""Closed-form regularity constants and the Harnack/Renyi duality maps.

All constants live in one place so the table generator and the PDE
verification share literal formulas:

  multi_step      (1-r^2)/(1-r^{2N}) * c2^2 ||v||^2,         r = 1 - c1/c2
  SRT_q discrete  q (1-r^2) / (2 lam h (1-r^{2N})) ||v||^2,  r = 1 - L h
  SRT_q cont.     L q / (lam (1-e^{-2LT})) ||v||^2
  LGE             2 b / (1-e^{-2bt})
  SH_p exponent   b p ||v||^2 / (2 (p-1) (1-e^{-2bt}))
  SH_log / SRT_1  b ||v||^2 / (2 (1-e^{-2bt}))

t = math.inf is the sentinel for the stationary constants (the exp(-2bt)
factor then vanishes without overflow).  The SH_p exponent at the dual order
p = q/(q-1) coincides with the SRT_q value; ``harnack_from_renyi`` converts a
Renyi bound R into the multiplicative constant C of the 1-homogeneous Harnack
form P(f(.+v)) <= C (P f^p)^{1/p} via C = exp((q-1) R / q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .gaussian_info import RenyiOrder, order_of

__all__ = [
    "RegularityBound",
    "BOUND_KINDS",
    "multi_step_bound",
    "discrete_srt_bound",
    "continuous_srt_bound",
    "theorem1_constants",
    "harnack_from_renyi",
    "renyi_from_harnack",
]

BOUND_KINDS = frozenset({"SRT_q", "SRT_1", "SH_p", "SH_log", "LGE", "multi_step"})


@dataclass(frozen=True)
class RegularityBound:
    """A named nonnegative constant together with the parameters producing it."""

    value: float
    kind: str
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}; expected one of {sorted(BOUND_KINDS)}")
        if not self.value >= 0.0:
            raise ValueError(f"bound value must be >= 0, got {self.value}")
        object.__setattr__(self, "parameters", dict(self.parameters))


def _geometric_ratio(r: float, N: int) -> float:
    """(1 - r^2) / (1 - r^{2N}) with its r -> 1 limit 1/N."""
    if r == 1.0:
        return 1.0 / N
    return (1.0 - r * r) / (1.0 - r ** (2 * N))


def multi_step_bound(c1: float, c2: float, N: int, norm_v: float) -> RegularityBound:
    """Optimal N-step cost of distributing a shift of size norm_v.

    Equals discrete_cost(optimal_discrete_schedule(c1, c2, N)) * norm_v^2;
    requires c1 < c2 so that r = 1 - c1/c2 lies in (0, 1].
    """
    if c2 <= 0 or c1 < 0 or c1 >= c2:
        raise ValueError(f"need 0 <= c1 < c2, got c1 = {c1}, c2 = {c2}")
    if N < 1:
        raise ValueError("N must be a positive integer")
    if norm_v < 0:
        raise ValueError("norm_v must be >= 0")
    r = 1.0 - c1 / c2
    value = _geometric_ratio(r, N) * c2 * c2 * norm_v * norm_v
    return RegularityBound(value, "multi_step", {"c1": c1, "c2": c2, "N": N, "norm_v": norm_v})


def discrete_srt_bound(q, L: float, lam: float, h: float, N: int, norm_v: float) -> RegularityBound:
    """Renyi bound between an N-step Euler marginal and its translate by v.

    Prefactor q (1-r^2) / (2 lam h (1-r^{2N})) with r = 1 - L h; exact (not
    just an upper bound) for the OU model, which is what the tightness suite
    checks.  L = 0 is the Brownian case r = 1.
    """
    order = order_of(q)
    if L < 0:
        raise ValueError("L must be >= 0")
    if lam <= 0:
        raise ValueError("ellipticity lam must be > 0")
    if h <= 0:
        raise ValueError("step size h must be > 0")
    if L > 0 and h >= 1.0 / L:
        raise ValueError(f"need h < 1/L for contraction, got h = {h}, 1/L = {1.0 / L}")
    if N < 1:
        raise ValueError("N must be a positive integer")
    if norm_v < 0:
        raise ValueError("norm_v must be >= 0")
    r = 1.0 - L * h
    value = order.q * _geometric_ratio(r, N) / (2.0 * lam * h) * norm_v * norm_v
    return RegularityBound(
        value, "SRT_q", {"q": order.q, "L": L, "lam": lam, "h": h, "N": N, "norm_v": norm_v}
    )


def continuous_srt_bound(q, L: float, lam: float, T: float, norm_v: float) -> RegularityBound:
    """Continuous-time analogue L q / (lam (1 - e^{-2LT})); T = inf gives Lq/lam."""
    order = order_of(q)
    if L <= 0:
        raise ValueError("L must be > 0")
    if lam <= 0:
        raise ValueError("ellipticity lam must be > 0")
    if T <= 0:
        raise ValueError("T must be > 0 (math.inf for the stationary limit)")
    if norm_v < 0:
        raise ValueError("norm_v must be >= 0")
    denom = -math.expm1(-2.0 * L * T)  # equals 1.0 at T = inf
    value = L * order.q / (lam * denom) * norm_v * norm_v
    return RegularityBound(
        value, "SRT_q", {"q": order.q, "L": L, "lam": lam, "T": T, "norm_v": norm_v}
    )


def theorem1_constants(
    kind: str,
    beta: float,
    t: float,
    q=None,
    p: float | None = None,
    norm_v: float = 1.0,
) -> RegularityBound:
    """The semigroup regularity constants for a beta-smooth potential.

    kind selects which display is evaluated:

      "LGE"     2 beta / (1 - e^{-2 beta t})                     (no q, p, v)
      "SH_p"    beta p norm_v^2 / (2 (p-1) (1 - e^{-2 beta t}))  (needs p > 1)
      "SRT_q"   beta q norm_v^2 / (2 (1 - e^{-2 beta t}))        (needs q >= 1)
      "SH_log"  beta norm_v^2 / (2 (1 - e^{-2 beta t}))
      "SRT_1"   same value as SH_log

    t = math.inf yields the stationary constants.
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if t <= 0:
        raise ValueError("t must be > 0 (math.inf for the stationary constants)")
    if norm_v < 0:
        raise ValueError("norm_v must be >= 0")
    denom = -math.expm1(-2.0 * beta * t)
    params = {"beta": beta, "t": t, "norm_v": norm_v}
    if kind == "LGE":
        return RegularityBound(2.0 * beta / denom, "LGE", {"beta": beta, "t": t})
    if kind == "SH_p":
        if p is None or p <= 1.0:
            raise ValueError("SH_p needs an order p > 1")
        value = beta * p * norm_v * norm_v / (2.0 * (p - 1.0) * denom)
        return RegularityBound(value, "SH_p", {**params, "p": p})
    if kind == "SRT_q":
        order = order_of(q if q is not None else 1.0)
        value = beta * order.q * norm_v * norm_v / (2.0 * denom)
        return RegularityBound(value, "SRT_q", {**params, "q": order.q})
    if kind in ("SH_log", "SRT_1"):
        value = beta * norm_v * norm_v / (2.0 * denom)
        return RegularityBound(value, kind, params)
    raise ValueError(f"unknown kind {kind!r}; expected LGE, SH_p, SRT_q, SH_log or SRT_1")


def harnack_from_renyi(q, renyi_bound: float) -> float:
    """Best Harnack constant C with P(f(.+v)) <= C (P f^p)^{1/p}, p = q/(q-1).

    C = exp((q-1) renyi_bound / q).  Undefined at q = 1 (the KL case is the
    log-Harnack form, handled by theorem1_constants("SH_log", ...)).
    """
    order = order_of(q)
    if order.is_kl:
        raise ValueError("duality map needs q > 1; at q = 1 use the log-Harnack constant")
    if renyi_bound < 0:
        raise ValueError("renyi_bound must be >= 0")
    return math.exp((order.q - 1.0) * renyi_bound / order.q)


def renyi_from_harnack(q, harnack_constant: float) -> float:
    """Inverse of harnack_from_renyi: R = q log(C) / (q - 1)."""
    order = order_of(q)
    if order.is_kl:
        raise ValueError("duality map needs q > 1")
    if harnack_constant < 1.0:
        raise ValueError("Harnack constant must be >= 1")
    return order.q * math.log(harnack_constant) / (order.q - 1.0)
