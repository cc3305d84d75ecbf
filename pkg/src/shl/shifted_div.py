"""Shifted Renyi divergences on isotropic Gaussian families.

One signed shift parameter z covers the whole family: z >= 0 is the standard
shift (an infimum that weakens the divergence), z < 0 is the dual shift (a
supremum over extra translations of the first argument, radius |z|):

    dual,     radius z:  sup_{|v| <= z} R_q(mu * delta_v || nu)
                         = q (|dm| + z)^2 / (2 s^2)
    standard, slack z:   inf over mu' within W_inf distance z of mu
                         <= q max(0, |dm| - z)^2 / (2 s^2)   (translate family)

where dm is the mean difference and s^2 the shared isotropic variance.  The
standard value computed here is the infimum restricted to translates of mu —
an upper bound on the true infimum over all measures in the W_inf ball, and
it is named accordingly; nothing downstream needs more, since it sits on the
right-hand side of the convolution lemma being certified.

The generalized convolution lemma under test: for independent Gaussian noise
xi and any a >= 0,

    shifted_div(mu * xi, nu * xi; z)  <=  shifted_div(mu, nu; z + a) + S_q(xi, a)

with sensitivity S_q(xi, a) = q a^2 / (2 var(xi)).  Instances are labeled by
which proof case they exercise (standard region, dual with a <= |z|, dual
with a > |z|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian_info import GaussianMeasure, order_of

__all__ = [
    "dual_shifted_renyi_gaussian",
    "standard_shifted_renyi_gaussian_translate",
    "shifted_renyi_gaussian",
    "gaussian_sensitivity",
    "ConvolutionReport",
    "verify_convolution_lemma",
]


def _iso_variance(m: GaussianMeasure) -> float:
    """Common isotropic variance sigma^2 with cov = sigma^2 I, or error."""
    cov = m.covariance
    d = cov.shape[0]
    diag = np.diagonal(cov)
    if not np.all(diag == diag[0]) or not np.array_equal(cov, diag[0] * np.eye(d)):
        raise ValueError("measure must have isotropic covariance sigma^2 I")
    return float(diag[0])


def _shared_iso(mu: GaussianMeasure, nu: GaussianMeasure):
    if mu.dim != nu.dim:
        raise ValueError("dimension mismatch between the two measures")
    s2_mu, s2_nu = _iso_variance(mu), _iso_variance(nu)
    if s2_mu != s2_nu:
        raise ValueError(f"covariance mismatch: {s2_mu} vs {s2_nu}")
    if s2_mu <= 0:
        raise ValueError("shared variance must be positive")
    dm = float(np.linalg.norm(mu.mean - nu.mean))
    return dm, s2_mu


def dual_shifted_renyi_gaussian(mu: GaussianMeasure, nu: GaussianMeasure,
                                z: float, q) -> float:
    """sup over |v| <= z of R_q(mu * delta_v || nu) in closed form.

    The supremum is attained by translating straight away from nu's mean
    (any unit direction when the means coincide), giving
    q (|dm| + z)^2 / (2 sigma^2).
    """
    order = order_of(q)
    if z < 0:
        raise ValueError("dual radius z must be >= 0")
    dm, s2 = _shared_iso(mu, nu)
    return order.q * (dm + z) ** 2 / (2.0 * s2)


def standard_shifted_renyi_gaussian_translate(mu: GaussianMeasure, nu: GaussianMeasure,
                                              z: float, q) -> float:
    """Translate-family upper bound q max(0, |dm| - z)^2 / (2 sigma^2).

    Restricting the shifted divergence's infimum to mu * delta_w, |w| <= z;
    the best translate moves mu's mean toward nu's by min(z, |dm|).
    """
    order = order_of(q)
    if z < 0:
        raise ValueError("standard shift z must be >= 0")
    dm, s2 = _shared_iso(mu, nu)
    return order.q * max(0.0, dm - z) ** 2 / (2.0 * s2)


def shifted_renyi_gaussian(mu: GaussianMeasure, nu: GaussianMeasure, z: float, q) -> float:
    """Signed dispatch: z >= 0 standard (translate bound), z < 0 dual radius |z|."""
    if z >= 0:
        return standard_shifted_renyi_gaussian_translate(mu, nu, z, q)
    return dual_shifted_renyi_gaussian(mu, nu, -z, q)


def gaussian_sensitivity(sigma2: float, a: float, q) -> float:
    """S_q of N(., sigma^2 I) under translations of size at most a: q a^2 / (2 sigma^2)."""
    order = order_of(q)
    if sigma2 <= 0:
        raise ValueError("sigma2 must be > 0")
    if a < 0:
        raise ValueError("a must be >= 0")
    return order.q * a * a / (2.0 * sigma2)


@dataclass(frozen=True)
class ConvolutionReport:
    lhs: float
    rhs: float
    margin: float
    passed: bool
    case: str


def verify_convolution_lemma(mu: GaussianMeasure, nu: GaussianMeasure, xi: GaussianMeasure,
                             z: float, a: float, q) -> ConvolutionReport:
    """Evaluate both sides of the convolution lemma on Gaussian data.

    lhs: shifted divergence of (mu * xi, nu * xi) at shift z (the convolved
    pair shares variance sigma^2 + var(xi)); rhs: shifted divergence of
    (mu, nu) at shift z + a, plus S_q(xi, a).  xi's mean translates both
    arguments of the lhs equally, so only its variance enters.
    """
    order = order_of(q)
    if a < 0:
        raise ValueError("a must be >= 0")
    dm, s2 = _shared_iso(mu, nu)
    xi_var = _iso_variance(xi)
    if xi.dim != mu.dim:
        raise ValueError("noise dimension mismatch")
    if xi_var <= 0:
        raise ValueError("noise variance must be positive")
    lhs = _shifted_value(dm, s2 + xi_var, z, order)
    rhs = _shifted_value(dm, s2, z + a, order) + gaussian_sensitivity(xi_var, a, order)
    if z >= 0:
        case = "standard"
    elif a <= -z:
        case = "dual a<=|z|"
    else:
        case = "dual a>|z|"
    passed = lhs <= rhs + 1e-12 * max(1.0, abs(rhs))
    return ConvolutionReport(lhs, rhs, rhs - lhs, passed, case)


def _shifted_value(dm: float, s2: float, z: float, order) -> float:
    if z >= 0:
        return order.q * max(0.0, dm - z) ** 2 / (2.0 * s2)
    return order.q * (dm - z) ** 2 / (2.0 * s2)  # -z = |z| for z < 0
