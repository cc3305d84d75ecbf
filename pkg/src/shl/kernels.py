"""Euler-Maruyama one-step kernels and exact Ornstein-Uhlenbeck marginals.

The discrete kernel of an Ito model dX = b(X) dt + sigma dB is

    P_h(x, .) = N( x + h b(x),  h sigma sigma^T ),

and for the OU drift b(x) = -L x with sigma = sqrt(2) I the N-step marginal
from a point has the closed form (r = 1 - L h)

    delta_x P_h^N = N( r^N x,  2 h (1 - r^{2N}) / (1 - r^2) I ),

with the r = 1 (L = 0, Brownian) limit 2 h N.  These Gaussians are the
exactness oracle for every sharp bound evaluated elsewhere: the model whose
marginals saturate the constants.

Time-varying coefficients are not implemented; every quantitative target is
constant-coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gaussian_info import GaussianMeasure

__all__ = [
    "ItoModel",
    "StepSize",
    "ou_model",
    "euler_step_distribution",
    "ou_discrete_marginal",
    "ou_continuous_marginal",
]

_LIPSCHITZ_SPOT_PAIRS = 32


@dataclass(frozen=True)
class ItoModel:
    """Constant-diffusion Ito model: drift b, Lipschitz bound L, diffusion sigma.

    ``ellipticity_lambda`` is the declared lambda with sigma sigma^T >= lambda I,
    checked numerically at construction.  Drift Lipschitzness is a declared
    contract, spot-checked on random pairs.
    """

    drift: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    diffusion: np.ndarray
    ellipticity_lambda: float

    def __post_init__(self):
        if self.lipschitz_L <= 0:
            raise ValueError("lipschitz_L must be > 0")
        if self.ellipticity_lambda <= 0:
            raise ValueError("ellipticity_lambda must be > 0")
        sig = np.asarray(self.diffusion, dtype=float)
        if sig.ndim == 0:
            sig = sig.reshape(1, 1)
        if sig.ndim != 2 or sig.shape[0] != sig.shape[1]:
            raise ValueError("diffusion must be a square matrix")
        sign, _ = np.linalg.slogdet(sig)
        if sign == 0:
            raise ValueError("diffusion matrix must be invertible")
        gram = sig @ sig.T
        min_eig = float(np.linalg.eigvalsh(gram)[0])
        if min_eig < self.ellipticity_lambda * (1.0 - 1e-12):
            raise ValueError(
                f"ellipticity violated: min eig(sigma sigma^T) = {min_eig} "
                f"< lambda = {self.ellipticity_lambda}"
            )
        sig.setflags(write=False)
        object.__setattr__(self, "diffusion", sig)
        self._spot_check_lipschitz()

    def _spot_check_lipschitz(self):
        rng = np.random.default_rng(0)
        d = self.dim
        for _ in range(_LIPSCHITZ_SPOT_PAIRS):
            x = rng.uniform(-3.0, 3.0, d)
            y = rng.uniform(-3.0, 3.0, d)
            bx = np.asarray(self.drift(x), dtype=float)
            by = np.asarray(self.drift(y), dtype=float)
            if bx.shape != (d,) or by.shape != (d,):
                raise ValueError("drift must map d-vectors to d-vectors")
            lhs = float(np.linalg.norm(bx - by))
            rhs = self.lipschitz_L * float(np.linalg.norm(x - y))
            if lhs > rhs * (1.0 + 1e-9) + 1e-12:
                raise ValueError(
                    f"drift violates declared Lipschitz bound: |b(x)-b(y)| = {lhs} "
                    f"> L|x-y| = {rhs}"
                )

    @property
    def dim(self) -> int:
        return self.diffusion.shape[0]

    @property
    def gram(self) -> np.ndarray:
        return self.diffusion @ self.diffusion.T


def ou_model(L: float, d: int = 1) -> ItoModel:
    """OU model b(x) = -L x with sigma = sqrt(2) I (so lambda = 2), L > 0."""
    return ItoModel(
        drift=lambda x: -L * np.asarray(x, dtype=float),
        lipschitz_L=L,
        diffusion=math.sqrt(2.0) * np.eye(d),
        ellipticity_lambda=2.0,
    )


@dataclass(frozen=True)
class StepSize:
    """Step size h with contraction factor r = 1 - L h.

    Requires 0 < r <= 1, i.e. h < 1/L; the boundary value r = 1 occurs
    exactly for L = 0 (Brownian motion) and is handled by explicit limit
    formulas downstream.
    """

    h: float
    lipschitz_L: float = 0.0
    contraction_r: float = field(init=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step size must be > 0")
        if self.lipschitz_L < 0:
            raise ValueError("lipschitz_L must be >= 0")
        r = 1.0 - self.lipschitz_L * self.h
        if r <= 0:
            raise ValueError(f"need h < 1/L: h = {self.h}, L = {self.lipschitz_L} give r = {r}")
        object.__setattr__(self, "contraction_r", r)


def _as_step(h, L: float) -> StepSize:
    if isinstance(h, StepSize):
        if h.lipschitz_L != L:
            raise ValueError(
                f"step was built for L = {h.lipschitz_L} but the model has L = {L}"
            )
        return h
    return StepSize(float(h), L)


def euler_step_distribution(model: ItoModel, h, x) -> GaussianMeasure:
    """One Euler step from x: N(x + h b(x), h sigma sigma^T)."""
    step = _as_step(h, model.lipschitz_L)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != model.dim:
        raise ValueError(f"state dimension {x.size} does not match model dimension {model.dim}")
    bx = np.asarray(model.drift(x), dtype=float)
    return GaussianMeasure(x + step.h * bx, step.h * model.gram)


def ou_discrete_marginal(L: float, h, N: int, x) -> GaussianMeasure:
    """Exact N-step marginal of the Euler chain for the OU model (sigma = sqrt(2) I).

    Returns N(r^N x, 2h (1-r^{2N})/(1-r^2) I) with r = 1 - L h; the r = 1
    (L = 0) variance is the Brownian limit 2 h N.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    if N < 1 or N != int(N):
        raise ValueError("N must be a positive integer")
    step = _as_step(h, L)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = step.contraction_r
    if r == 1.0:
        var = 2.0 * step.h * N
    else:
        var = 2.0 * step.h * (1.0 - r ** (2 * N)) / (1.0 - r * r)
    return GaussianMeasure.isotropic(r**N * x, var)


def ou_continuous_marginal(L: float, T: float, x) -> GaussianMeasure:
    """Exact continuous OU marginal: N(e^{-LT} x, (1 - e^{-2LT})/L I).

    T = inf is allowed and yields the stationary law N(0, I/L).
    """
    if L <= 0:
        raise ValueError("L must be > 0")
    if T <= 0:
        raise ValueError("T must be > 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    decay = math.exp(-L * T)
    var = (1.0 - math.exp(-2.0 * L * T)) / L
    return GaussianMeasure.isotropic(decay * x, var)
