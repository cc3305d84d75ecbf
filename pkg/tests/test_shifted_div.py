import math

import numpy as np
import pytest

from shl.bounds import discrete_srt_bound
from shl.coupling import mixture_renyi_quadrature_1d
from shl.gaussian_info import GaussianMeasure, renyi_gaussian_shared_cov, translate
from shl.kernels import ou_discrete_marginal
from shl.shifted_div import (
    dual_shifted_renyi_gaussian,
    gaussian_sensitivity,
    shifted_renyi_gaussian,
    standard_shifted_renyi_gaussian_translate,
    verify_convolution_lemma,
)


def iso(mean, var=1.0):
    return GaussianMeasure.isotropic(np.asarray(mean, dtype=float), var)


def test_zero_radius_reduces_to_plain_divergence():
    mu, nu = iso([1.0, 0.5]), iso([0.0, 0.0])
    for q in (1.0, 2.0, 4.0):
        plain = renyi_gaussian_shared_cov(mu, nu, q)
        assert dual_shifted_renyi_gaussian(mu, nu, 0.0, q) == pytest.approx(plain, rel=1e-14)
        assert standard_shifted_renyi_gaussian_translate(mu, nu, 0.0, q) == pytest.approx(
            plain, rel=1e-14
        )


def test_dual_equal_measures_frozen():
    m = iso([0.0, 0.0, 0.0])
    assert dual_shifted_renyi_gaussian(m, m, 1.0, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_standard_translate_frozen():
    mu, nu = iso([2.0]), iso([0.0])
    got = standard_shifted_renyi_gaussian_translate(mu, nu, 0.5, 2.0)
    assert got == pytest.approx(2.25, rel=1e-14)


def test_standard_vanishes_once_radius_covers_gap():
    mu, nu = iso([1.0]), iso([0.0])
    assert standard_shifted_renyi_gaussian_translate(mu, nu, 1.0, 2.0) == 0.0
    assert standard_shifted_renyi_gaussian_translate(mu, nu, 1.7, 2.0) == 0.0


def test_dual_matches_brute_force_direction_search():
    rng = np.random.default_rng(41)
    mu, nu = iso([0.8, -0.3, 0.2], 0.7), iso([0.0, 0.1, 0.0], 0.7)
    dm = mu.mean - nu.mean
    z, q = 0.6, 2.0
    closed = dual_shifted_renyi_gaussian(mu, nu, z, q)
    # sup over the shift ball, probed on 1000 random directions plus the
    # aligned one that attains the supremum
    dirs = rng.normal(size=(1000, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, dm / np.linalg.norm(dm)])
    best = max(
        renyi_gaussian_shared_cov(translate(mu, z * u), nu, q) for u in dirs
    )
    assert best <= closed + 1e-12
    assert closed - best <= 1e-6


def test_signed_dispatch():
    mu, nu = iso([1.5]), iso([0.0])
    for q in (1.0, 3.0):
        assert shifted_renyi_gaussian(mu, nu, 0.4, q) == pytest.approx(
            standard_shifted_renyi_gaussian_translate(mu, nu, 0.4, q), rel=1e-15
        )
        assert shifted_renyi_gaussian(mu, nu, -0.4, q) == pytest.approx(
            dual_shifted_renyi_gaussian(mu, nu, 0.4, q), rel=1e-15
        )
        assert shifted_renyi_gaussian(mu, nu, 0.0, q) == pytest.approx(
            renyi_gaussian_shared_cov(mu, nu, q), rel=1e-14
        )


def test_monotonicity_in_radius():
    mu, nu = iso([1.2]), iso([0.0])
    zs = np.linspace(0.0, 2.0, 9)
    dual = [dual_shifted_renyi_gaussian(mu, nu, z, 2.0) for z in zs]
    std = [standard_shifted_renyi_gaussian_translate(mu, nu, z, 2.0) for z in zs]
    assert all(b >= a for a, b in zip(dual, dual[1:]))
    assert all(b <= a for a, b in zip(std, std[1:]))


def test_linear_in_order():
    mu, nu = iso([1.0]), iso([0.0])
    base = dual_shifted_renyi_gaussian(mu, nu, 0.5, 1.0)
    for q in (2.0, 5.0):
        assert dual_shifted_renyi_gaussian(mu, nu, 0.5, q) == pytest.approx(
            q * base, rel=1e-14
        )


def test_sensitivity_values():
    assert gaussian_sensitivity(1.0, 0.0, 2.0) == 0.0
    assert gaussian_sensitivity(1.0, 1.0, 2.0) == pytest.approx(1.0, rel=1e-15)
    assert gaussian_sensitivity(0.5, 2.0, 1.0) == pytest.approx(4.0, rel=1e-15)


def test_input_validation():
    mu, nu = iso([1.0]), iso([0.0])
    with pytest.raises(ValueError, match="z must be >= 0"):
        dual_shifted_renyi_gaussian(mu, nu, -0.1, 2.0)
    with pytest.raises(ValueError, match="z must be >= 0"):
        standard_shifted_renyi_gaussian_translate(mu, nu, -0.1, 2.0)
    with pytest.raises(ValueError, match="sigma2"):
        gaussian_sensitivity(0.0, 1.0, 2.0)
    with pytest.raises(ValueError, match="a must be >= 0"):
        gaussian_sensitivity(1.0, -1.0, 2.0)
    with pytest.raises(ValueError, match="isotropic"):
        dual_shifted_renyi_gaussian(
            GaussianMeasure(np.zeros(2), np.diag([1.0, 2.0])), iso([0.0, 0.0]), 0.5, 2.0
        )
    with pytest.raises(ValueError, match="covariance mismatch"):
        dual_shifted_renyi_gaussian(iso([1.0], 1.0), iso([0.0], 2.0), 0.5, 2.0)


def test_ou_marginal_dual_radius_equals_transport_bound():
    # reading the dual shifted divergence at the discrete OU marginal recovers
    # the multi-step transport bound with lambda = 2
    L, h, N = 1.0, 0.1, 5
    marg = ou_discrete_marginal(L, h, N, np.zeros(1))
    for q, z in [(1.0, 0.5), (2.0, 1.0), (4.0, 0.7)]:
        dual = dual_shifted_renyi_gaussian(marg, marg, z, q)
        bound = discrete_srt_bound(q, L, 2.0, h, N, z).value
        assert dual == pytest.approx(bound, rel=1e-12)


class TestConvolutionLemma:
    mu = iso([1.0])
    nu = iso([0.0])
    noise = GaussianMeasure(np.zeros(1), np.array([[1.0]]))

    def test_frozen_dual_instance(self):
        rep = verify_convolution_lemma(self.mu, self.nu, self.noise, -0.5, 0.25, 2.0)
        assert rep.passed
        assert rep.case == "dual a<=|z|"
        # lhs: variance doubles; rhs: radius shrinks by a plus sensitivity term
        assert rep.lhs == pytest.approx(2.0 * 1.5**2 / 4.0, rel=1e-14)
        assert rep.rhs == pytest.approx(
            2.0 * 1.25**2 / 2.0 + 2.0 * 0.0625 / 2.0, rel=1e-14
        )

    def test_zero_a_is_data_processing(self):
        for z in (0.5, -0.5, 0.0):
            rep = verify_convolution_lemma(self.mu, self.nu, self.noise, z, 0.0, 2.0)
            assert rep.passed
            assert rep.lhs <= rep.rhs + 1e-12

    def test_case_labels(self):
        assert (
            verify_convolution_lemma(self.mu, self.nu, self.noise, 0.5, 0.25, 2.0).case
            == "standard"
        )
        assert (
            verify_convolution_lemma(self.mu, self.nu, self.noise, -0.5, 0.25, 2.0).case
            == "dual a<=|z|"
        )
        assert (
            verify_convolution_lemma(self.mu, self.nu, self.noise, -0.5, 0.75, 2.0).case
            == "dual a>|z|"
        )

    def test_noise_mean_is_irrelevant(self):
        shifted_noise = GaussianMeasure(np.array([0.7]), np.array([[1.0]]))
        a = verify_convolution_lemma(self.mu, self.nu, self.noise, -0.5, 0.25, 2.0)
        b = verify_convolution_lemma(self.mu, self.nu, shifted_noise, -0.5, 0.25, 2.0)
        assert a.lhs == b.lhs and a.rhs == b.rhs

    def test_random_instances_all_pass(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            d = int(rng.integers(1, 4))
            s2 = rng.uniform(0.2, 2.0)
            xi_var = rng.uniform(0.2, 2.0)
            mu = iso(rng.normal(size=d), s2)
            nu = iso(rng.normal(size=d), s2)
            noise = GaussianMeasure.isotropic(np.zeros(d), xi_var)
            z = rng.uniform(-1.5, 1.5)
            a = rng.uniform(0.0, 1.5)
            q = rng.choice([1.0, 1.5, 2.0, 4.0])
            rep = verify_convolution_lemma(mu, nu, noise, z, a, q)
            assert rep.passed, (d, s2, xi_var, z, a, q, rep)
            assert rep.margin >= -1e-12 * max(1.0, abs(rep.rhs))

    def test_dimension_and_variance_guards(self):
        with pytest.raises(ValueError, match="noise dimension"):
            verify_convolution_lemma(
                self.mu, self.nu, GaussianMeasure.isotropic(np.zeros(2), 1.0), 0.5, 0.1, 2.0
            )
        with pytest.raises(ValueError, match="a must be >= 0"):
            verify_convolution_lemma(self.mu, self.nu, self.noise, 0.5, -0.1, 2.0)


def test_mixture_shift_never_beats_dirac_rate():
    # shifting a mixture of shared-variance Gaussians costs at most the
    # single-Gaussian rate q v^2 / (2 sigma^2); checked by direct quadrature
    rng = np.random.default_rng(44)
    var = 0.3
    for q in (1.0, 2.0):
        means = rng.uniform(-1.0, 1.0, 4)
        w = rng.dirichlet(np.ones(4))
        v = 0.45
        quad = mixture_renyi_quadrature_1d(means + v, w, means, w, var, q=q)
        dirac_rate = q * v * v / (2.0 * var)
        assert quad <= dirac_rate + 1e-9
