import math
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from analytic_engine import (
    PsiFunction, SinrCdfCurve, analytic_curve, cdf_neyman_scott, cdf_nonhomog,
    cdf_power_law_closed_form, cdf_single_random_cluster, enumerate_partitions,
    equivalent_intensity, eta_at_outage, matern_origin_cluster_psi, neyman_scott_expectation,
    neyman_scott_moments, normalized_sir_cdf, normalized_sir_limit, optimize_guard_zone,
    partition_weight_sum, pdf_nonhomog, psi, psi_direct_pathloss, scaling_limit_cdf,
    scaling_limit_sir, sinr_cdf, spectral_efficiency_cdf, zeta_disk,
)
from errors import DomainError, NumericError
from models import (
    BoundedPowerLawPathLoss, DiskCluster, ExponentialPathLoss, GaussianCluster, HardCoreApprox,
    MaternClusterConditioned, Mixture, PiecewisePowerLaw, PointMassCenter, PowerLawPathLoss,
    PowerLawSegment, RandomCenterGaussianCluster, Strip, Superposition, SystemParams,
    TabulatedCenter, ThomasClusterConditioned, UniformDiskCenter,
)


class TestPsi:
    def test_zero_threshold(self):
        for model in (PiecewisePowerLaw.single(0.01), Strip(5.0, 0.01), DiskCluster(10.0, 5.0, 0.1)):
            assert psi(model, 4.0, 0.0) == 0.0

    def test_homogeneous_closed_form(self):
        rho, gamma = 0.01, 1e4
        assert psi(PiecewisePowerLaw.single(rho), 4.0, gamma) == pytest.approx(
            math.pi ** 2 * rho / 2 * math.sqrt(gamma), rel=1e-12)

    @pytest.mark.parametrize("epsilon", [-1.5, -0.5, 0.0, 1.0])
    def test_strategies_agree_for_power_law(self, epsilon):
        model = PiecewisePowerLaw.single(0.02, epsilon)
        closed = psi(model, 4.0, 500.0, strategy="closed-form")
        assert psi(model, 4.0, 500.0, strategy="hypergeometric") == pytest.approx(closed, rel=1e-9)
        assert psi(model, 4.0, 500.0, strategy="quadrature") == pytest.approx(closed, rel=1e-7)

    @pytest.mark.parametrize("model", [
        PiecewisePowerLaw((PowerLawSegment(0.0, 20.0, 0.01, 0.0), PowerLawSegment(20.0, 80.0, 0.5, -1.0),
                           PowerLawSegment(80.0, math.inf, 3.0, -2.5))),
        GaussianCluster(400.0, 100.0, 3140.0),
        DiskCluster(400.0, 300.0, 200.0 / (math.pi * 300.0 ** 2)),
        DiskCluster(100.0, 300.0, 1e-3),
        Strip(5.0, 0.01),
        HardCoreApprox(0.005, 5.0, "transmitter", 10.0),
        HardCoreApprox(0.005, 15.0, "transmitter", 10.0),
        HardCoreApprox(0.05, 3.0, "receiver", 5.0),
    ])
    def test_specific_formulas_match_generic_quadrature(self, model):
        gamma = 1e4
        specific = psi(model, 4.0, gamma, strategy="hypergeometric")
        generic = psi(model, 4.0, gamma, strategy="quadrature")
        assert specific > 0
        assert specific == pytest.approx(generic, rel=1e-6)

    def test_centered_gaussian_cluster_against_rayleigh_quadrature(self):
        nu, mu, gamma = 100.0, 3140.0, 1e4
        f = lambda r: stats.rayleigh.pdf(r, scale=nu) * gamma / (r ** 4 + gamma)
        oracle = mu * integrate.quad(f, 0.0, 2000.0, points=[10.0, 100.0, 300.0],
                                    epsabs=0.0, epsrel=1e-12, limit=500)[0]
        assert psi(GaussianCluster(0.0, nu, mu), 4.0, gamma) == pytest.approx(oracle, rel=1e-8)

    def test_superposition_is_additive(self):
        a, b = Strip(5.0, 0.01), DiskCluster(50.0, 20.0, 0.003)
        total = psi(Superposition((a, b)), 4.0, 300.0)
        assert total == pytest.approx(psi(a, 4.0, 300.0) + psi(b, 4.0, 300.0), rel=1e-12)

    def test_monotone_in_gamma(self):
        fn = PsiFunction(Strip(10.0, 0.01), 4.0)
        values = [fn(g) for g in np.geomspace(1.0, 1e8, 30)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_derivative(self):
        fn = PsiFunction(PiecewisePowerLaw.single(0.01, -0.5), 4.0)
        assert fn.derivative(100.0) == pytest.approx((fn(100.01) - fn(99.99)) / 0.02, rel=1e-6)
        strip = PsiFunction(Strip(5.0, 0.01), 4.0)
        assert strip.derivative(1e4) == pytest.approx((strip(1.0001e4) - strip(0.9999e4)) / 2.0, rel=2e-3)

    def test_nominal(self):
        fn = PsiFunction(PiecewisePowerLaw.single(0.5, -0.5), 4.0)
        assert fn.nominal(0.5)(100.0) == pytest.approx(fn(100.0) / 0.5)

    def test_closed_form_needs_whole_plane(self):
        with pytest.raises(DomainError):
            PsiFunction(Strip(5.0, 0.01), 4.0, strategy="closed-form")

    def test_random_model_rejected(self):
        with pytest.raises(DomainError):
            PsiFunction(MaternClusterConditioned(1e-5, 300.0, 200.0), 4.0)

    def test_divergent_model_rejected(self):
        with pytest.raises(DomainError):
            PsiFunction(PiecewisePowerLaw.single(0.01, 2.5), 4.0)

    def test_unknown_strategy(self):
        with pytest.raises(DomainError):
            PsiFunction(Strip(5.0, 0.01), 4.0, strategy="guess")


class TestCdfNonhomog:
    def test_zero_threshold(self):
        assert cdf_nonhomog(SystemParams(3, 4.0, 1e-12, 10.0), 5.0, 0.0) == 0.0

    def test_single_antenna_half(self):
        assert cdf_nonhomog(SystemParams(1, 4.0, 0.0, 10.0), math.log(2.0), 1.0) == pytest.approx(0.5)

    def test_noise_adds_to_psi(self):
        params = SystemParams(2, 4.0, 0.5, 1.0)
        assert cdf_nonhomog(params, 1.0, 2.0) == pytest.approx(1.0 - stats.poisson.cdf(1, 2.0))

    def test_closed_form_matches_psi(self, params):
        model = PiecewisePowerLaw.single(0.023, -0.5)
        for gamma in (10.0, 1e3, 1e5):
            expected = cdf_nonhomog(params, psi(model, params.alpha, gamma), gamma)
            assert cdf_power_law_closed_form(params, 0.023, -0.5, gamma) == pytest.approx(expected, rel=1e-12)

    def test_closed_form_range(self, params):
        assert cdf_power_law_closed_form(params, 0.01, 0.0, 0.0) == 0.0
        with pytest.raises(DomainError):
            cdf_power_law_closed_form(params, 0.01, 0.5, 1.0)

    def test_pdf_integrates_to_cdf_increment(self):
        params = SystemParams(3, 4.0, 1e-6, 10.0)
        model = PiecewisePowerLaw.single(0.01, -0.5)
        fn = PsiFunction(model, params.alpha)
        lo, hi = 100.0, 5000.0
        mass = integrate.quad(lambda g: pdf_nonhomog(params, model, g, fn), lo, hi,
                              epsrel=1e-10, limit=200)[0]
        increment = sinr_cdf(params, model, hi) - sinr_cdf(params, model, lo)
        assert mass == pytest.approx(increment, rel=1e-7)


class TestNormalizedSir:
    def test_steepens_towards_limit(self):
        rho, epsilon, alpha = 1.0, -0.5, 4.0
        limit = normalized_sir_limit(rho, epsilon, alpha)
        below = [normalized_sir_cdf(L, rho, epsilon, alpha, 0.5 * limit) for L in (2, 10, 100, 1000)]
        above = [normalized_sir_cdf(L, rho, epsilon, alpha, 2.0 * limit) for L in (2, 10, 100, 1000)]
        assert all(a > b for a, b in zip(below, below[1:]))
        assert all(a < b for a, b in zip(above, above[1:]))
        assert below[-1] < 1e-3
        assert above[-1] > 1 - 1e-3


def test_random_cluster_point_mass_matches_fixed_cluster():
    params = SystemParams(10, 4.0, 1e-14, 10.0)
    model = RandomCenterGaussianCluster(PointMassCenter(0.0), 100.0, 3140.0)
    for gamma in (1e3, 1e4, 1e5):
        expected = cdf_nonhomog(params, psi(GaussianCluster(0.0, 100.0, 3140.0), 4.0, gamma), gamma)
        assert cdf_single_random_cluster(params, model, gamma) == pytest.approx(expected, rel=1e-10)


def test_tabulated_centre_matches_uniform_disk():
    params = SystemParams(10, 4.0, 1e-14, 10.0)
    R_p = 300.0
    taus = np.linspace(0.0, R_p, 61)
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        tabulated = RandomCenterGaussianCluster(TabulatedCenter(tuple(taus), tuple(2 * taus / R_p ** 2)),
                                                100.0, 3140.0)
        uniform = RandomCenterGaussianCluster(UniformDiskCenter(R_p), 100.0, 3140.0)
        for gamma in (1e3, 1e4):
            assert cdf_single_random_cluster(params, tabulated, gamma) == pytest.approx(
                cdf_single_random_cluster(params, uniform, gamma), rel=1e-6)


def test_random_cluster_between_nearest_and_farthest_centre():
    params = SystemParams(10, 4.0, 1e-14, 10.0)
    R_p, gamma = 300.0, 1e4
    model = RandomCenterGaussianCluster(UniformDiskCenter(R_p), 100.0, 3140.0)
    value = cdf_single_random_cluster(params, model, gamma)
    near = cdf_nonhomog(params, psi(GaussianCluster(0.0, 100.0, 3140.0), 4.0, gamma), gamma)
    far = cdf_nonhomog(params, psi(GaussianCluster(R_p, 100.0, 3140.0), 4.0, gamma), gamma)
    assert far < value < near


class TestPartitions:
    def test_small_orders(self):
        assert enumerate_partitions(0) == [()]
        assert {tuple(p) for p in enumerate_partitions(3)} == {(3, 0, 0), (1, 1, 0), (0, 0, 1)}

    def test_partition_count(self):
        assert len(enumerate_partitions(10)) == 42
        assert all(p.ell == 10 for p in enumerate_partitions(10))

    def test_cap(self):
        with pytest.raises(DomainError):
            enumerate_partitions(65)

    def test_weight_sum_order_three(self):
        J = [0.3, 0.2, 0.1]
        expected = J[2] / 6 + J[0] * J[1] / 2 + J[0] ** 3 / 6
        assert partition_weight_sum(3, J) == pytest.approx(expected, rel=1e-14)


class TestNeymanScottExpectation:
    def test_low_orders(self):
        assert neyman_scott_expectation(0, [], -0.4) == pytest.approx(math.exp(-0.4))
        assert neyman_scott_expectation(1, [0.25], -0.4) == pytest.approx(math.exp(-0.4) * 0.25)

    @pytest.mark.parametrize("ell", [1, 2, 3, 5])
    def test_constant_zeta_disk(self, ell):
        # zeta = c on a region holding Poisson(m) parents, so Xi = c * N
        c, m = 0.7, 2.5
        exposure = m * math.expm1(-c)
        moments = [m * c ** j * math.exp(-c) for j in range(1, ell + 1)]
        n = np.arange(0, 200)
        oracle = float(np.sum(stats.poisson.pmf(n, m) * (c * n) ** ell * np.exp(-c * n)))
        assert neyman_scott_expectation(ell, moments, exposure) == pytest.approx(oracle, rel=1e-12)

    def test_positive_exposure_rejected(self):
        with pytest.raises(DomainError):
            neyman_scott_expectation(1, [0.1], 0.1)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_against_sampled_parents(self, ell):
        # Xi summed over Poisson parents in a disk far beyond the reach of zeta
        model = MaternClusterConditioned(1e-5, 100.0, 50.0)
        alpha, gamma, reach, trials = 4.0, 1e4, 3000.0, 20000
        exposure, moments = neyman_scott_moments(model, alpha, gamma, ell)
        exact = neyman_scott_expectation(ell, moments, exposure)

        table = np.concatenate(([0.0], np.geomspace(1.0, reach, 400)))
        zeta = [zeta_disk(d, model.cluster_radius, model.daughter_density, alpha, gamma) for d in table]
        rng = np.random.default_rng(5)
        counts = rng.poisson(model.parent_density * math.pi * reach ** 2, size=trials)
        distances = reach * np.sqrt(rng.random(counts.sum()))
        owner = np.repeat(np.arange(trials), counts)
        xi = np.bincount(owner, weights=np.interp(distances, table, zeta), minlength=trials)
        values = xi ** ell * np.exp(-xi)
        standard_error = values.std() / math.sqrt(trials)
        assert abs(values.mean() - exact) < 5 * standard_error + 1e-2 * exact


class TestZetaDisk:
    def test_centered(self):
        rho, R, gamma = 1e-3, 300.0, 1e4
        from special_functions import powerlaw_integral_term
        expected = rho * 2 * math.pi * powerlaw_integral_term(0.0, 4.0, gamma, R)
        assert zeta_disk(0.0, R, rho, 4.0, gamma) == pytest.approx(expected, rel=1e-12)

    def test_zero_threshold(self):
        assert zeta_disk(400.0, 300.0, 1e-3, 4.0, 0.0) == 0.0

    @pytest.mark.parametrize("d", [400.0, 150.0])
    def test_against_area_integral(self, d):
        R, gamma = 300.0, 1e4
        rho = 200.0 / (math.pi * R ** 2)

        def f(phi, s):
            dist2 = d * d + s * s + 2 * d * s * math.cos(phi)
            return rho * s * gamma / (dist2 * dist2 + gamma)

        oracle = integrate.dblquad(f, 0.0, R, 0.0, 2 * math.pi, epsabs=0.0, epsrel=1e-10)[0]
        assert zeta_disk(d, R, rho, 4.0, gamma) == pytest.approx(oracle, rel=1e-6)

    def test_bad_radius(self):
        with pytest.raises(DomainError):
            zeta_disk(1.0, 0.0, 1.0, 4.0, 1.0)


class TestNeymanScott:
    params = SystemParams(2, 4.0, 1e-5, 10.0)

    def test_no_parents_reduces_to_origin_cluster(self):
        model = MaternClusterConditioned(0.0, 300.0, 200.0)
        for gamma in (1e2, 1e4, 1e6):
            origin = psi(model.origin_cluster(), 4.0, gamma)
            assert matern_origin_cluster_psi(300.0, 200.0, 4.0, gamma) == pytest.approx(origin, rel=1e-9)
            expected = cdf_nonhomog(self.params, origin, gamma)
            assert cdf_neyman_scott(self.params, model, gamma) == pytest.approx(expected, rel=1e-9)

    def test_zero_threshold(self):
        assert cdf_neyman_scott(self.params, MaternClusterConditioned(1.6e-5, 300.0, 200.0), 0.0) == 0.0

    def test_other_clusters_raise_outage(self):
        alone = MaternClusterConditioned(0.0, 300.0, 200.0)
        crowded = MaternClusterConditioned(1.6e-5, 300.0, 200.0)
        gamma = 1e4
        assert cdf_neyman_scott(self.params, crowded, gamma) > cdf_neyman_scott(self.params, alone, gamma)

    def test_single_antenna_is_laplace_functional(self):
        params = self.params.with_antennas(1)
        model = MaternClusterConditioned(1.6e-5, 300.0, 200.0)
        gamma = 1e4
        exposure, _ = neyman_scott_moments(model, 4.0, gamma, 0)
        a = matern_origin_cluster_psi(300.0, 200.0, 4.0, gamma) + params.sigma2 * gamma
        assert cdf_neyman_scott(params, model, gamma) == pytest.approx(1 - math.exp(exposure - a), rel=1e-9)

    def test_moments_are_consistent(self):
        model = MaternClusterConditioned(1.6e-5, 300.0, 200.0)
        exposure, moments = neyman_scott_moments(model, 4.0, 1e4, 3)
        assert exposure < 0
        assert len(moments) == 3
        assert all(j >= 0 for j in moments)

    def test_thomas_monotone(self):
        model = ThomasClusterConditioned(1e-5, 50.0, 20.0)
        values = [cdf_neyman_scott(self.params, model, g) for g in (1e2, 1e3, 1e4, 1e5)]
        assert all(0 <= v <= 1 for v in values)
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_antenna_cap(self):
        with pytest.raises(DomainError):
            cdf_neyman_scott(self.params.with_antennas(70), MaternClusterConditioned(1e-5, 10.0, 2.0), 1.0)


class TestDispatch:
    def test_superposition_equals_merged_model(self, params):
        merged = PiecewisePowerLaw((PowerLawSegment(0.0, 50.0, 0.01, 0.0),
                                    PowerLawSegment(50.0, math.inf, 0.02, -0.5)))
        split = Superposition((PiecewisePowerLaw.single(0.01, 0.0, 0.0, 50.0),
                               PiecewisePowerLaw.single(0.02, -0.5, 50.0)))
        for gamma in (10.0, 1e3, 1e5):
            assert sinr_cdf(params, split, gamma) == pytest.approx(sinr_cdf(params, merged, gamma), rel=1e-9)

    def test_mixture_is_weighted_average(self, params):
        a, b = Strip(5.0, 0.01), Strip(25.0, 0.01)
        mixture = Mixture(((0.3, a), (0.7, b)))
        gamma = 1e4
        expected = 0.3 * sinr_cdf(params, a, gamma) + 0.7 * sinr_cdf(params, b, gamma)
        assert sinr_cdf(params, mixture, gamma) == pytest.approx(expected, rel=1e-12)

    def test_random_member_gets_deterministic_psi(self, params):
        strip = Strip(5.0, 0.01)
        cluster = MaternClusterConditioned(1e-5, 100.0, 10.0)
        gamma = 1e3
        extra = psi(strip, params.alpha, gamma)
        assert sinr_cdf(params, Superposition((strip, cluster)), gamma) == pytest.approx(
            cdf_neyman_scott(params, cluster, gamma, extra), rel=1e-12)

    def test_guard_radius_zero_is_homogeneous(self, params):
        gamma = 1e4
        hc = HardCoreApprox(0.005, 0.0, "receiver", params.r_T)
        assert sinr_cdf(params, hc, gamma) == pytest.approx(
            sinr_cdf(params, PiecewisePowerLaw.single(0.005), gamma), rel=1e-9)


@pytest.mark.parametrize("model", [
    PiecewisePowerLaw.single(0.005),
    Strip(10.0, 0.01),
    RandomCenterGaussianCluster(UniformDiskCenter(300.0), 100.0, 3140.0),
    MaternClusterConditioned(1.6e-5, 300.0, 200.0),
], ids=["power_law", "strip", "random_cluster", "matern_cluster"])
def test_more_antennas_never_raise_outage(model):
    for gamma in (1e3, 1e4, 1e5):
        values = [sinr_cdf(SystemParams(L, 4.0, 1e-12, 10.0), model, gamma) for L in range(1, 17)]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("epsilon", [-1.5, -0.5, 0.0, 1.0])
@pytest.mark.parametrize("tau", [0.5, 7.0, 300.0])
def test_splitting_a_segment_keeps_psi(epsilon, tau):
    whole = PiecewisePowerLaw.single(0.02, epsilon)
    split = PiecewisePowerLaw((PowerLawSegment(0.0, tau, 0.02, epsilon),
                               PowerLawSegment(tau, math.inf, 0.02, epsilon)))
    for gamma in (10.0, 1e4, 1e6):
        assert psi(split, 4.0, gamma) == pytest.approx(psi(whole, 4.0, gamma), rel=1e-10)


class TestCurve:
    def test_grid_and_interpolation(self, params):
        grid = np.geomspace(10.0, 1e6, 25)
        curve = analytic_curve(params, PiecewisePowerLaw.single(0.01), grid)
        assert isinstance(curve, SinrCdfCurve)
        assert all(a <= b for a, b in zip(curve.cdf_values, curve.cdf_values[1:]))
        np.testing.assert_allclose(curve.at_sinr(curve.sinr_grid), curve.cdf_values, rtol=1e-12)
        np.testing.assert_allclose(curve.sinr_grid, grid * params.r_T ** -params.alpha)

    def test_empty_grid(self, params):
        with pytest.raises(DomainError):
            analytic_curve(params, PiecewisePowerLaw.single(0.01), [])

    def test_unsorted_grid(self, params):
        with pytest.raises(DomainError):
            analytic_curve(params, PiecewisePowerLaw.single(0.01), [10.0, 1.0])


class TestScalingLimit:
    def test_matches_large_antenna_approximation(self):
        rho, epsilon, alpha, r_T, L = 0.5, -0.5, 4.0, 10.0, 40
        model = PiecewisePowerLaw.single(rho, epsilon)
        u = (epsilon + 2) / alpha
        expected = (2 * math.pi ** 2 * rho / (math.sin(math.pi * u) * alpha * L)) ** (-1 / u) * r_T ** -alpha
        assert scaling_limit_sir(model, rho / L, alpha, r_T, beta=rho) == pytest.approx(expected, rel=1e-9)

    def test_grows_as_ratio_shrinks(self):
        model = PiecewisePowerLaw.single(1.0, -0.5)
        values = [scaling_limit_sir(model, ell, 4.0, 10.0) for ell in (0.1, 0.01, 0.001)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_limit_cdf_is_a_step(self):
        model = PiecewisePowerLaw.single(1.0, -0.5)
        step = scaling_limit_sir(model, 0.0125, 4.0, 1.0)
        assert scaling_limit_cdf(model, 0.0125, 4.0, 0.9 * step) == 0.0
        assert scaling_limit_cdf(model, 0.0125, 4.0, 1.1 * step) == 1.0

    def test_not_bracketed(self):
        # a compact cluster has bounded psi, so psi_c = 1/ell may be out of reach
        with pytest.raises(NumericError):
            scaling_limit_sir(DiskCluster(0.0, 1.0, 1e-3), 1e-6, 4.0, 1.0)


class TestPathLossEquivalence:
    def test_same_power_law_is_identity(self):
        profile = equivalent_intensity(PowerLawPathLoss(4.0), 0.01, 4.0)
        for r in (0.5, 3.0, 200.0):
            assert profile(r) == pytest.approx(2 * math.pi * 0.01)

    def test_exponential_profile(self):
        nu, rho, alpha = 0.01, 1e-5, 4.0
        profile = equivalent_intensity(ExponentialPathLoss(nu), rho, alpha)
        for u in (1.5, 10.0, 1e3):
            assert profile(u) == pytest.approx(2 * math.pi * 1.6 * math.log(u) / u ** 2, rel=1e-12)
        assert profile(0.5) == 0.0

    @pytest.mark.parametrize("pathloss", [ExponentialPathLoss(0.01), BoundedPowerLawPathLoss(3.0)])
    def test_interference_is_preserved(self, pathloss):
        rho, alpha, gamma = 1e-3, 4.0, 1e4
        profile = equivalent_intensity(pathloss, rho, alpha)
        direct = psi_direct_pathloss(pathloss, rho, gamma)
        assert psi(profile, alpha, gamma) == pytest.approx(direct, rel=1e-6)

    def test_non_monotone_rejected(self):
        class Rising(ExponentialPathLoss):
            def value(self, r):
                return 1.0 + 0.0 * np.exp(-self.nu * np.asarray(r, dtype=float))

        with pytest.raises(DomainError):
            equivalent_intensity(Rising(0.01), 1e-3, 4.0)


class TestGuardZone:
    params = SystemParams(5, 4.0, 1e-14, 5.0)

    def test_spectral_efficiency_limits(self):
        hc = HardCoreApprox(0.05, 2.0, "receiver", 5.0)
        assert spectral_efficiency_cdf(self.params, hc, 0.0) == 0.0
        assert spectral_efficiency_cdf(self.params, hc, 1e6) == 1.0
        values = [spectral_efficiency_cdf(self.params, hc, eta) for eta in (0.01, 0.05, 0.1, 0.2)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_needs_receiver_guard(self):
        with pytest.raises(DomainError):
            spectral_efficiency_cdf(self.params, HardCoreApprox(0.05, 2.0, "transmitter", 5.0), 0.1)

    def test_eta_hits_target(self):
        eta = eta_at_outage(self.params, 0.05, 2.0, 0.1)
        hc = HardCoreApprox(0.05, 2.0, "receiver", 5.0)
        assert spectral_efficiency_cdf(self.params, hc, eta) == pytest.approx(0.1, abs=1e-9)

    def test_optimum_is_positive(self):
        result = optimize_guard_zone(self.params, 0.05, 0.1, r1_max=10.0, r1_points=20)
        assert result.r1_opt > 0
        assert result.eta >= max(result.grid_eta) - 1e-12
        assert not result.near_flat

    def test_looser_target_gives_more_efficiency(self):
        strict = optimize_guard_zone(self.params, 0.05, 0.01, r1_max=10.0, r1_points=20)
        loose = optimize_guard_zone(self.params, 0.05, 0.999, r1_max=10.0, r1_points=20)
        assert loose.eta > strict.eta

    def test_empty_network_is_flat(self):
        result = optimize_guard_zone(self.params, 0.0, 0.1, r1_max=10.0, r1_points=10)
        assert result.near_flat
        assert result.eta == 0.0

    def test_bad_target(self):
        with pytest.raises(DomainError):
            optimize_guard_zone(self.params, 0.05, 1.5)
