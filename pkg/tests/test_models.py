import math

import numpy as np
import pytest

from errors import ConfigError, DomainError
from models import (
    BoundedPowerLawPathLoss, CustomRadialProfile, DiskCluster, ExponentialPathLoss, GaussianCluster,
    HardCoreApprox, MaternClusterConditioned, Mixture, PiecewisePowerLaw, PointMassCenter,
    PowerLawPathLoss, PowerLawSegment, RandomCenterGaussianCluster, Strip, Superposition,
    SystemParams, TabulatedCenter, ThomasClusterConditioned, UniformDiskCenter,
    matern_retained_density, model_from_dict, number_field, pathloss_from_dict,
)


class TestSystemParams:
    def test_round_trip(self):
        params = SystemParams.from_dict({"L": 4, "alpha": 4, "sigma2": 1e-12, "r_T": 10})
        assert params == SystemParams(4, 4.0, 1e-12, 10.0)
        assert SystemParams.from_dict(params.to_dict()) == params

    @pytest.mark.parametrize("data, field", [
        ({"L": 0, "alpha": 4, "sigma2": 0, "r_T": 1}, "system.L"),
        ({"L": 2.5, "alpha": 4, "sigma2": 0, "r_T": 1}, "system.L"),
        ({"L": 2, "alpha": 2, "sigma2": 0, "r_T": 1}, "system.alpha"),
        ({"L": 2, "alpha": 4, "sigma2": -1, "r_T": 1}, "system.sigma2"),
        ({"L": 2, "alpha": 4, "sigma2": 0, "r_T": 0}, "system.r_T"),
        ({"L": 2, "alpha": 4, "r_T": 1}, "system.sigma2"),
    ])
    def test_invalid(self, data, field):
        with pytest.raises(ConfigError) as info:
            SystemParams.from_dict(data)
        assert info.value.field == field

    def test_with_antennas(self):
        assert SystemParams(2, 4.0, 0.0, 10.0).with_antennas(8).L == 8


def test_number_field_reports_path():
    with pytest.raises(ConfigError) as info:
        number_field({"rho": "dense"}, "rho", "model")
    assert info.value.field == "model.rho"
    assert number_field({"r_outer": "inf"}, "r_outer", "seg", allow_inf=True) == math.inf
    with pytest.raises(ConfigError):
        number_field({"rho": math.nan}, "rho", "model")


class TestPiecewisePowerLaw:
    def test_single_is_pure(self):
        model = PiecewisePowerLaw.single(0.01, -0.5)
        assert model.is_pure_power_law
        assert not PiecewisePowerLaw.single(0.01, 0.0, 1.0).is_pure_power_law

    def test_overlapping_segments_rejected(self):
        with pytest.raises(ConfigError):
            PiecewisePowerLaw((PowerLawSegment(0, 10, 1, 0), PowerLawSegment(5, 20, 1, 0)))

    def test_origin_singularity_rejected(self):
        with pytest.raises(ConfigError):
            PiecewisePowerLaw.single(1.0, -2.0)

    def test_divergent_tail(self):
        with pytest.raises(DomainError):
            PiecewisePowerLaw.single(1.0, 2.5).check_alpha(4.0)

    def test_scaled(self):
        model = PiecewisePowerLaw.single(0.01).scaled(3.0)
        assert model.segments[0].rho == pytest.approx(0.03)


@pytest.mark.parametrize("data", [
    {"type": "piecewise_power_law", "segments": [
        {"r_inner": 0, "r_outer": 50, "rho": 0.01, "epsilon": 0},
        {"r_inner": 50, "r_outer": "inf", "rho": 0.02, "epsilon": -0.5}]},
    {"type": "gaussian_cluster", "center_distance": 400.0, "width": 100.0, "mean_points": 3140.0},
    {"type": "random_center_gaussian_cluster", "center": {"type": "uniform_disk", "radius": 300.0},
     "width": 100.0, "mean_points": 3140.0},
    {"type": "random_center_gaussian_cluster", "center": {"type": "point_mass", "distance": 50.0},
     "width": 10.0, "mean_points": 5.0},
    {"type": "disk_cluster", "center_distance": 400.0, "radius": 300.0, "density": 0.001},
    {"type": "strip", "half_width": 10.0, "density": 0.01},
    {"type": "hard_core", "parent_density": 0.005, "guard_radius": 5.0,
     "guard_center": "transmitter", "link_distance": 10.0},
    {"type": "matern_cluster_conditioned", "parent_density": 1.6e-5, "cluster_radius": 300.0,
     "mean_daughters": 200.0},
    {"type": "thomas_cluster_conditioned", "parent_density": 1e-5, "width": 50.0, "mean_daughters": 20.0},
    {"type": "custom_radial", "r": [0.0, 10.0, 20.0], "angular_integral": [0.1, 0.1, 0.0]},
    {"type": "superposition", "members": [
        {"type": "strip", "half_width": 5.0, "density": 0.01},
        {"type": "disk_cluster", "center_distance": 0.0, "radius": 30.0, "density": 0.002}]},
    {"type": "mixture", "components": [
        {"weight": 0.25, "model": {"type": "strip", "half_width": 5.0, "density": 0.01}},
        {"weight": 0.75, "model": {"type": "strip", "half_width": 25.0, "density": 0.01}}]},
])
def test_model_round_trip(data):
    model = model_from_dict(data)
    assert model_from_dict(model.to_dict()) == model


def test_power_law_shorthand():
    model = model_from_dict({"type": "power_law", "rho": 0.023, "epsilon": -0.5})
    assert model == PiecewisePowerLaw.single(0.023, -0.5)


@pytest.mark.parametrize("data, field", [
    ({"type": "teleporter"}, "model.type"),
    ({"type": "strip", "half_width": 0.0, "density": 0.01}, "model.half_width"),
    ({"type": "gaussian_cluster", "width": 1.0}, "model.mean_points"),
    ({"type": "mixture", "components": [{"weight": 0.5, "model": {"type": "strip", "half_width": 1,
                                                                  "density": 1}}]}, "model.components"),
    ({"type": "superposition", "members": [{"type": "strip", "half_width": -1, "density": 1}]},
     "model.members[0].half_width"),
])
def test_model_errors_name_the_field(data, field):
    with pytest.raises(ConfigError) as info:
        model_from_dict(data)
    assert info.value.field == field


def test_superposition_allows_one_random_member():
    random_member = MaternClusterConditioned(1e-5, 100.0, 10.0)
    Superposition((Strip(5.0, 0.01), random_member))
    with pytest.raises(ConfigError):
        Superposition((random_member, random_member))


def test_randomness_flags():
    assert not Strip(1.0, 0.1).is_random
    assert RandomCenterGaussianCluster(UniformDiskCenter(300.0), 100.0, 10.0).is_random
    assert not RandomCenterGaussianCluster(PointMassCenter(30.0), 100.0, 10.0).is_random
    assert ThomasClusterConditioned(1e-5, 10.0, 5.0).is_random
    assert Mixture(((1.0, Strip(1.0, 0.1)),)).is_random


def test_uniform_disk_center_density():
    center = UniformDiskCenter(300.0)
    assert center.density(150.0) == pytest.approx(2 * 150.0 / 300.0 ** 2)
    assert center.density(301.0) == 0.0


def test_tabulated_center_must_be_normalised():
    TabulatedCenter((0.0, 1.0, 2.0), (0.5, 0.5, 0.5))
    with pytest.raises(DomainError):
        TabulatedCenter((0.0, 1.0), (1.0, 3.0))


def test_origin_clusters():
    matern = MaternClusterConditioned(1.6e-5, 300.0, 200.0)
    assert matern.origin_cluster().mean_points == pytest.approx(199.0)
    assert matern.daughter_density == pytest.approx(200.0 / (math.pi * 300.0 ** 2))
    thomas = ThomasClusterConditioned(1e-5, 50.0, 20.0)
    assert thomas.origin_cluster() == GaussianCluster(0.0, 50.0, 19.0)


def test_disk_cluster_mean_points():
    assert DiskCluster(0.0, 10.0, 0.01).mean_points == pytest.approx(math.pi)


class TestHardCore:
    def test_retained_density(self):
        rho = matern_retained_density(0.005, 5.0)
        area = math.pi * 25.0
        assert rho == pytest.approx((1 - math.exp(-0.005 * area)) / area)
        assert rho < 0.005
        assert matern_retained_density(0.005, 0.0) == 0.005

    def test_guard_offset(self):
        assert HardCoreApprox(0.01, 2.0, "receiver", 10.0).guard_offset == 0.0
        assert HardCoreApprox(0.01, 2.0, "transmitter", 10.0).guard_offset == 10.0

    def test_bad_guard_center(self):
        with pytest.raises(ConfigError):
            HardCoreApprox(0.01, 2.0, "satellite")


class TestCustomProfile:
    def test_table_interpolates(self):
        profile = CustomRadialProfile.from_table([0.0, 10.0], [1.0, 3.0])
        assert profile(5.0) == pytest.approx(2.0)
        assert profile(11.0) == 0.0

    def test_scaled_keeps_source(self):
        profile = CustomRadialProfile.from_table([0.0, 10.0], [1.0, 3.0]).scaled(2.0)
        assert profile(5.0) == pytest.approx(4.0)
        assert profile.to_dict()["scale"] == 2.0
        assert model_from_dict(profile.to_dict())(5.0) == pytest.approx(4.0)

    def test_callable_profile_cannot_be_written(self):
        with pytest.raises(ConfigError):
            CustomRadialProfile(lambda r: 1.0, 0.0, 1.0).to_dict()

    def test_negative_values_rejected(self):
        with pytest.raises(ConfigError):
            CustomRadialProfile.from_table([0.0, 1.0], [1.0, -1.0])


class TestPathLoss:
    def test_power_law_inverse(self):
        phi = PowerLawPathLoss(4.0)
        assert phi.inverse(1e-4) == pytest.approx(10.0)
        assert math.isinf(phi.value_at_zero)

    def test_exponential(self):
        phi = ExponentialPathLoss(0.01)
        assert float(phi(100.0)) == pytest.approx(math.exp(-1.0))
        assert phi.inverse(math.exp(-1.0)) == pytest.approx(100.0)
        assert phi.inverse_derivative(0.5) == pytest.approx(-1.0 / (0.01 * 0.5))

    def test_bounded_power_law_numeric_inverse(self):
        phi = BoundedPowerLawPathLoss(3.0)
        r = phi.inverse(float(phi(7.5)))
        assert r == pytest.approx(7.5, rel=1e-10)
        expected = -1.0 / (3.0 * 8.5 ** -4.0)
        assert phi.inverse_derivative(float(phi(7.5))) == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("phi, y", [
        (ExponentialPathLoss(0.01), 2.0),
        (ExponentialPathLoss(0.01), 1.0),
        (ExponentialPathLoss(0.01), 0.0),
        (PowerLawPathLoss(4.0), 0.0),
        (PowerLawPathLoss(4.0), -1.0),
        (BoundedPowerLawPathLoss(3.0), 1.5),
    ])
    def test_inverse_outside_range(self, phi, y):
        with pytest.raises(DomainError):
            phi.inverse(y)
        with pytest.raises(DomainError):
            phi.inverse_derivative(y)

    def test_monotonicity_check(self):
        ExponentialPathLoss(0.01).check_monotone()

        class Bumpy(ExponentialPathLoss):
            def value(self, r):
                r = np.asarray(r, dtype=float)
                return np.exp(-self.nu * r) * (1.5 + np.sin(r))

        with pytest.raises(DomainError):
            Bumpy(0.01).check_monotone()

    def test_from_dict(self):
        assert pathloss_from_dict({"type": "exponential", "nu": 0.01}) == ExponentialPathLoss(0.01)
        with pytest.raises(ConfigError) as info:
            pathloss_from_dict({"type": "exponential", "nu": -1})
        assert info.value.field == "pathloss.nu"


def test_equivalent_pathloss_model():
    data = {"type": "equivalent_pathloss", "pathloss": {"type": "exponential", "nu": 0.01},
            "alpha": 4.0, "base_density": 1e-5}
    model = model_from_dict(data)
    assert isinstance(model, CustomRadialProfile)
    assert model.r_min == pytest.approx(1.0)
    assert model.to_dict() == data
