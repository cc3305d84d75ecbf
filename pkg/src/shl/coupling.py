"""Finitely supported measures, exact small-instance optimal transport, the
convexity upgrade of Dirac bounds, and a brute-force checker for the shifted
composition rule on finite state spaces.

Everything here is verification machinery: supports are capped at 64 atoms
and the transport problems are solved exactly with the HiGHS LP backend, so
optimal values are certificates rather than approximations.  The composition
rule

    R_q(mu^Y | nu^Y) <= R_q(mu^X' | nu^X)
                        + inf_gamma { E_gamma KL-conditional     (q = 1)
                                    { esssup_gamma Renyi-cond.   (q > 1)

is checked by computing both sides; the q > 1 coupling term is a bottleneck
transport problem solved by threshold search plus feasibility LPs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import linprog

from .gaussian_info import order_of

__all__ = [
    "MAX_SUPPORT",
    "DiscreteMeasure",
    "Coupling",
    "CompositionReport",
    "ot_min_linear",
    "convexity_upgrade",
    "renyi_discrete",
    "verify_shifted_composition_finite",
    "mixture_renyi_quadrature_1d",
]

MAX_SUPPORT = 64
_WEIGHT_TOL = 1e-12
_MARGINAL_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure on finitely many distinct atoms in R^d."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        if atoms.ndim != 2 or atoms.shape[0] == 0:
            raise ValueError("atoms must be a nonempty (n, d) array")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (atoms.shape[0],):
            raise ValueError("weights must align with atoms")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        n = atoms.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                if np.array_equal(atoms[i], atoms[j]):
                    raise ValueError(f"atoms {i} and {j} coincide")
        atoms.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, atoms) -> "DiscreteMeasure":
        atoms = np.asarray(atoms, dtype=float)
        n = atoms.shape[0]
        return cls(atoms, np.full(n, 1.0 / n))

    @classmethod
    def dirac(cls, atom) -> "DiscreteMeasure":
        return cls(np.asarray(atom, dtype=float)[None, :] if np.ndim(atom) else np.array([[float(atom)]]),
                   np.array([1.0]))

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]


@dataclass(frozen=True)
class Coupling:
    """Joint weights whose marginals are the two given measures."""

    matrix: np.ndarray
    first: DiscreteMeasure
    second: DiscreteMeasure

    def __post_init__(self):
        g = np.asarray(self.matrix, dtype=float)
        if g.shape != (self.first.size, self.second.size):
            raise ValueError("coupling matrix shape must match the two supports")
        g = np.where((g < 0) & (g > -1e-12), 0.0, g)  # scrub LP round-off
        if np.any(g < 0):
            raise ValueError("coupling entries must be nonnegative")
        if np.max(np.abs(g.sum(axis=1) - self.first.weights)) > _MARGINAL_TOL:
            raise ValueError("row sums do not match the first marginal")
        if np.max(np.abs(g.sum(axis=0) - self.second.weights)) > _MARGINAL_TOL:
            raise ValueError("column sums do not match the second marginal")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)


def _marginal_constraints(w_row: np.ndarray, w_col: np.ndarray, arcs: list) -> Tuple[np.ndarray, np.ndarray]:
    """Equality system for a transport plan restricted to the given arc list."""
    n, m = w_row.size, w_col.size
    A = np.zeros((n + m, len(arcs)))
    for k, (i, j) in enumerate(arcs):
        A[i, k] = 1.0
        A[n + j, k] = 1.0
    b = np.concatenate([w_row, w_col])
    return A, b


def _min_cost_plan(w_row: np.ndarray, w_col: np.ndarray, cost: np.ndarray):
    """Exact min-cost transport; infinite-cost arcs are excluded.

    Returns (plan or None, value); value is inf when no finite-cost plan
    exists.
    """
    finite = np.isfinite(cost)
    arcs = [(i, j) for i in range(w_row.size) for j in range(w_col.size) if finite[i, j]]
    if not arcs:
        return None, math.inf
    A, b = _marginal_constraints(w_row, w_col, arcs)
    c = np.array([cost[i, j] for i, j in arcs])
    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 2:  # infeasible: some mass is forced through an inf arc
        return None, math.inf
    if res.status != 0:
        raise RuntimeError(f"transport LP failed with status {res.status}: {res.message}")
    plan = np.zeros_like(cost, dtype=float)
    for k, (i, j) in enumerate(arcs):
        plan[i, j] = res.x[k]
    return plan, float(res.fun)


def _feasible_plan(w_row: np.ndarray, w_col: np.ndarray, allowed: np.ndarray):
    """A transport plan supported on the allowed arcs, or None."""
    arcs = [(i, j) for i in range(w_row.size) for j in range(w_col.size) if allowed[i, j]]
    if not arcs:
        return None
    A, b = _marginal_constraints(w_row, w_col, arcs)
    res = linprog(np.zeros(len(arcs)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"feasibility LP failed with status {res.status}: {res.message}")
    plan = np.zeros(allowed.shape, dtype=float)
    for k, (i, j) in enumerate(arcs):
        plan[i, j] = res.x[k]
    return plan


def _min_bottleneck_plan(w_row: np.ndarray, w_col: np.ndarray, cost: np.ndarray):
    """Minimize the largest cost on the support of the plan.

    Binary search over the sorted distinct finite costs, with a feasibility
    LP per probe; if even the full finite-arc set is infeasible the value is
    inf (some mass must cross an infinite-cost arc).
    """
    finite_vals = np.unique(cost[np.isfinite(cost)])
    best = _feasible_plan(w_row, w_col, np.isfinite(cost))
    if best is None:
        return _feasible_plan(w_row, w_col, np.ones_like(cost, dtype=bool)), math.inf
    lo, hi = 0, finite_vals.size - 1  # invariant: threshold hi is feasible
    while lo < hi:
        mid = (lo + hi) // 2
        plan = _feasible_plan(w_row, w_col, cost <= finite_vals[mid])
        if plan is None:
            lo = mid + 1
        else:
            hi = mid
            best = plan
    return best, float(finite_vals[lo])


def ot_min_linear(nu: DiscreteMeasure, nu_prime: DiscreteMeasure,
                  cost: Callable[[np.ndarray, np.ndarray], float]) -> Tuple[Coupling, float]:
    """Exact optimal transport between two small discrete measures.

    cost(v, v') is evaluated on every atom pair; the minimizing coupling and
    its value are returned.  Supports are capped at 64 atoms apiece.
    """
    if nu.size > MAX_SUPPORT or nu_prime.size > MAX_SUPPORT:
        raise ValueError(f"supports are capped at {MAX_SUPPORT} atoms")
    if nu.dim != nu_prime.dim:
        raise ValueError("measures must share a common dimension")
    C = np.empty((nu.size, nu_prime.size))
    for i in range(nu.size):
        for j in range(nu_prime.size):
            C[i, j] = float(cost(nu.atoms[i], nu_prime.atoms[j]))
    plan, value = _min_cost_plan(nu.weights, nu_prime.weights, C)
    if plan is None:
        raise RuntimeError("no finite-cost transport plan exists for these inputs")
    return Coupling(plan, nu, nu_prime), value


def convexity_upgrade(rho: Callable[[np.ndarray], float], q, nu: DiscreteMeasure,
                      nu_prime: DiscreteMeasure) -> float:
    """Upgrade a Dirac-pair divergence bound rho to mixtures of Diracs.

    With rho(v - v') bounding the divergence between the kernel outputs of
    two shifted starts, the mixture bound is the optimal-transport average
    of rho (q = 1) or (1/(q-1)) log of the transport value of
    exp((q-1) rho) (q > 1).
    """
    order = order_of(q)
    zero = np.zeros(nu.dim)
    at_zero = float(rho(zero))
    if abs(at_zero) > 1e-12:
        raise ValueError(f"rho must vanish at 0, got rho(0) = {at_zero!r}")
    if order.is_kl:
        _, value = ot_min_linear(nu, nu_prime, lambda v, vp: rho(v - vp))
        return max(0.0, value)
    qm1 = order.q - 1.0
    _, value = ot_min_linear(nu, nu_prime, lambda v, vp: math.exp(qm1 * rho(v - vp)))
    return math.log(max(value, 1.0)) / qm1


def renyi_discrete(p, r, q) -> float:
    """Renyi divergence of order q between two finite distributions."""
    order = order_of(q)
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise ValueError("distributions must share a support")
    sup = p > 0
    if np.any(sup & (r == 0)):
        return math.inf
    if order.is_kl:
        return float(np.sum(p[sup] * np.log(p[sup] / r[sup])))
    total = float(np.sum(p[sup] ** order.q * r[sup] ** (1.0 - order.q)))
    return math.log(total) / (order.q - 1.0)


@dataclass(frozen=True)
class CompositionReport:
    """Both sides of the composition rule on one finite instance."""

    q: float
    lhs: float
    shift_term: float
    coupling_term: float
    rhs: float
    margin: float
    passed: bool


def verify_shifted_composition_finite(joint_mu, joint_nu, q,
                                      mu_xprime=None) -> CompositionReport:
    """Check the composition rule on a finite space from explicit joints.

    joint_mu and joint_nu are (k, k) arrays giving the laws of (X, Y) under
    mu and nu (rows index X); k <= 6.  mu_xprime is the law of the auxiliary
    X' (defaults to the X-marginal of mu, the unshifted case).  Conditioning
    on a state that nu's X-marginal does not charge is an error naming the
    state.
    """
    order = order_of(q)
    jm = _check_joint(joint_mu, "joint_mu")
    jn = _check_joint(joint_nu, "joint_nu")
    if jm.shape != jn.shape:
        raise ValueError("the two joints must live on a common space")
    mu_x, mu_y = jm.sum(axis=1), jm.sum(axis=0)
    nu_x, nu_y = jn.sum(axis=1), jn.sum(axis=0)
    if mu_xprime is None:
        xp = mu_x.copy()
    else:
        xp = np.asarray(mu_xprime, dtype=float)
        if xp.shape != mu_x.shape or np.any(xp < 0) or abs(xp.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError("mu_xprime must be a distribution on the same state space")
    for s in np.flatnonzero(xp > 0):
        if nu_x[s] <= 0:
            raise ValueError(f"cannot condition on state {int(s)}: nu assigns it zero probability")

    lhs = renyi_discrete(mu_y, nu_y, order)
    shift = renyi_discrete(xp, nu_x, order)

    rows = np.flatnonzero(mu_x > 0)
    cols = np.flatnonzero(xp > 0)
    cond_div = np.empty((rows.size, cols.size))
    for a, x in enumerate(rows):
        mu_cond = jm[x] / mu_x[x]
        for b, xprime in enumerate(cols):
            nu_cond = jn[xprime] / nu_x[xprime]
            cond_div[a, b] = renyi_discrete(mu_cond, nu_cond, order)
    if order.is_kl:
        _, coupling_term = _min_cost_plan(mu_x[rows], xp[cols], cond_div)
    else:
        _, coupling_term = _min_bottleneck_plan(mu_x[rows], xp[cols], cond_div)

    rhs = shift + coupling_term
    if math.isinf(rhs):
        passed = True
        margin = math.nan if math.isinf(lhs) else math.inf
    else:
        passed = lhs <= rhs + 1e-9 * max(1.0, abs(rhs))
        margin = rhs - lhs
    return CompositionReport(order.q, lhs, shift, coupling_term, rhs, margin, passed)


def _check_joint(joint, name: str) -> np.ndarray:
    j = np.asarray(joint, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValueError(f"{name} must be a square (k, k) array")
    if j.shape[0] > 6:
        raise ValueError(f"{name}: state space is capped at 6 points")
    if np.any(j < 0) or abs(j.sum() - 1.0) > _WEIGHT_TOL:
        raise ValueError(f"{name} must be a probability distribution")
    return j


def mixture_renyi_quadrature_1d(means_p, weights_p, means_r, weights_r, variance: float,
                                q=1.0, n_points: int = 4097, span: float = 9.0) -> float:
    """Renyi divergence between two 1D Gaussian mixtures with common variance.

    Trapezoidal quadrature on a grid covering every component out to `span`
    standard deviations.  This is the independent oracle on the convexity
    upgrade: the mixtures are mu P * nu and mu P * nu' for a Gaussian
    one-step kernel P.
    """
    order = order_of(q)
    means_p = np.asarray(means_p, dtype=float).ravel()
    means_r = np.asarray(means_r, dtype=float).ravel()
    if variance <= 0:
        raise ValueError("variance must be > 0")
    sd = math.sqrt(variance)
    lo = min(means_p.min(), means_r.min()) - span * sd
    hi = max(means_p.max(), means_r.max()) + span * sd
    xs = np.linspace(lo, hi, n_points)

    def mixture(means, weights):
        z = (xs[:, None] - means[None, :]) / sd
        phi = np.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))
        return phi @ np.asarray(weights, dtype=float)

    p = mixture(means_p, weights_p)
    r = mixture(means_r, weights_r)
    integrand = np.zeros_like(p)
    if order.is_kl:
        mask = p > 1e-300
        integrand[mask] = p[mask] * np.log(p[mask] / np.maximum(r[mask], 1e-300))
        return float(np.trapezoid(integrand, xs))
    mask = r > 1e-300
    integrand[mask] = p[mask] ** order.q * r[mask] ** (1.0 - order.q)
    return math.log(float(np.trapezoid(integrand, xs))) / (order.q - 1.0)
