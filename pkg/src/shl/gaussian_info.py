"""Closed-form Renyi/KL divergence calculus for shared-covariance Gaussians.

Everything in this module rests on one identity: for Gaussians with the
*same* covariance matrix S,

    R_q( N(x, S) || N(y, S) ) = (q/2) <x - y, S^{-1} (x - y)>,

which reduces to the KL divergence at q = 1.  Conversions to and from the
f-divergence D_q = E_nu[(dmu/dnu)^q] - 1 use

    R_q = log(1 + D_q) / (q - 1),        D_q = exp((q-1) R_q) - 1,

so at q = 2 (where D_2 is the chi-square divergence) R_2 = log(1 + chi^2).
One sometimes sees this misquoted as exp(1 + chi^2); the logarithmic form is
the one consistent with the general relation and is what we implement.

The general different-covariance Gaussian formula is deliberately not
implemented: no quantity computed downstream ever needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianMeasure",
    "RenyiOrder",
    "renyi_gaussian_shared_cov",
    "renyi_from_Dq",
    "dq_from_renyi",
    "convolve_gaussian",
    "translate",
]


def _as_mean(mean) -> np.ndarray:
    m = np.atleast_1d(np.asarray(mean, dtype=float))
    if m.ndim != 1:
        raise ValueError(f"mean must be a vector, got shape {m.shape}")
    return m


def _as_cov(cov, d: int) -> np.ndarray:
    c = np.asarray(cov, dtype=float)
    if c.ndim == 0:
        c = c.reshape(1, 1)
    if c.shape != (d, d):
        raise ValueError(f"covariance shape {c.shape} does not match dimension {d}")
    if not np.array_equal(c, c.T):
        raise ValueError("covariance must be exactly symmetric")
    return c


@dataclass(frozen=True)
class GaussianMeasure:
    """Gaussian measure N(mean, covariance).

    The covariance must be symmetric positive-definite, which is checked by a
    Cholesky factorization at construction (no tolerance knob: inputs are
    exact model-generated matrices).  The single degenerate case admitted is
    an *exactly zero* matrix, i.e. a point mass; it exists so that convolving
    with noiseless noise is an identity and so that Dirac translates can be
    expressed in the same type.  Operations that need S^{-1} reject it.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        m = _as_mean(self.mean)
        c = _as_cov(self.covariance, m.size)
        if c.any():  # not the all-zero point-mass case
            try:
                np.linalg.cholesky(c)
            except np.linalg.LinAlgError:
                raise ValueError("covariance must be symmetric positive-definite") from None
        m.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", c)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def is_point_mass(self) -> bool:
        return not self.covariance.any()

    @classmethod
    def isotropic(cls, mean, variance: float) -> "GaussianMeasure":
        """N(mean, variance * I); variance may be 0 (point mass)."""
        m = _as_mean(mean)
        if variance < 0:
            raise ValueError("variance must be >= 0")
        return cls(m, float(variance) * np.eye(m.size))


@dataclass(frozen=True)
class RenyiOrder:
    """Order q >= 1 of a Renyi divergence; q = 1 denotes KL."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q < 1.0:
            raise ValueError(f"Renyi order must satisfy q >= 1, got {q}")
        object.__setattr__(self, "q", q)

    @property
    def is_kl(self) -> bool:
        return self.q == 1.0

    @property
    def dual_p(self) -> float:
        """Holder-dual exponent p = q/(q-1); undefined at q = 1."""
        if self.is_kl:
            raise ValueError("dual exponent is undefined at q = 1")
        return self.q / (self.q - 1.0)


def order_of(q) -> RenyiOrder:
    """Coerce a float or RenyiOrder to a RenyiOrder."""
    return q if isinstance(q, RenyiOrder) else RenyiOrder(float(q))


def renyi_gaussian_shared_cov(a: GaussianMeasure, b: GaussianMeasure, q) -> float:
    """R_q(a || b) for Gaussians sharing one covariance matrix.

    Requires ``a.covariance`` and ``b.covariance`` to hold identical stored
    values.  Returns (q/2) <d, S^{-1} d> with d = a.mean - b.mean; at q = 1
    this is the KL divergence.
    """
    q = order_of(q).q
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not np.array_equal(a.covariance, b.covariance):
        raise ValueError("covariances must match exactly (shared-covariance identity)")
    if a.is_point_mass:
        raise ValueError("covariance must be positive definite to evaluate a divergence")
    delta = a.mean - b.mean
    return 0.5 * q * float(delta @ np.linalg.solve(a.covariance, delta))


def renyi_from_Dq(Dq: float, q) -> float:
    """R_q from the f-divergence D_q: log(1 + D_q)/(q - 1), for q > 1."""
    q = order_of(q)
    if q.is_kl:
        raise ValueError("the D_q relation is undefined at q = 1; use KL directly")
    if Dq < 0:
        raise ValueError("D_q must be >= 0")
    return math.log1p(Dq) / (q.q - 1.0)


def dq_from_renyi(renyi: float, q) -> float:
    """Inverse of :func:`renyi_from_Dq`: D_q = exp((q-1) R) - 1, for q > 1."""
    q = order_of(q)
    if q.is_kl:
        raise ValueError("the D_q relation is undefined at q = 1; use KL directly")
    if renyi < 0:
        raise ValueError("Renyi divergence must be >= 0")
    return math.expm1((q.q - 1.0) * renyi)


def convolve_gaussian(a: GaussianMeasure, noise: GaussianMeasure) -> GaussianMeasure:
    """Convolution with centered Gaussian noise: mean unchanged, covariances add."""
    if a.dim != noise.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {noise.dim}")
    if noise.mean.any():
        raise ValueError("noise must be centered")
    return GaussianMeasure(a.mean, a.covariance + noise.covariance)


def translate(a: GaussianMeasure, v) -> GaussianMeasure:
    """Pushforward under x -> x + v, i.e. convolution with the point mass at v."""
    v = _as_mean(v)
    if v.size != a.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {v.size}")
    return GaussianMeasure(a.mean + v, a.covariance)
