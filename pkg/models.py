"""
Domain models: link parameters, interferer intensity models and path-loss laws.

Every model is an immutable dataclass that can be rebuilt from (and written
back to) the JSON tree used by run configuration files. The "type" key selects
the variant.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from errors import ConfigError, DomainError


INF_TOKENS = ("inf", "infinity", None)


def number_field(data: Dict, key: str, path: str, default=None, minimum: Optional[float] = None,
            strict: bool = False, allow_inf: bool = False) -> float:
    """Read a numeric field, reporting the dotted path on failure."""
    field_path = f"{path}.{key}" if path else key
    if key not in data:
        if default is None:
            raise ConfigError("missing required field", field=field_path)
        return default
    raw = data[key]
    if allow_inf and (raw in INF_TOKENS or (isinstance(raw, str) and raw.lower() in INF_TOKENS)):
        return math.inf
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {raw!r}", field=field_path)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigError("value must be finite", field=field_path)
    if minimum is not None:
        if strict and value <= minimum:
            raise ConfigError(f"must be > {minimum}", field=field_path)
        if not strict and value < minimum:
            raise ConfigError(f"must be >= {minimum}", field=field_path)
    return value


def _dump_radius(value: float):
    return "inf" if math.isinf(value) else value


@dataclass(frozen=True)
class SystemParams:
    """Receiver and link parameters: antennas L, path-loss exponent, noise power, link distance."""
    L: int
    alpha: float
    sigma2: float
    r_T: float

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ConfigError("antenna count must be a positive integer", field="system.L")
        if not self.alpha > 2:
            raise ConfigError("path-loss exponent must exceed 2", field="system.alpha")
        if self.sigma2 < 0:
            raise ConfigError("noise power must be nonnegative", field="system.sigma2")
        if not self.r_T > 0:
            raise ConfigError("link distance must be positive", field="system.r_T")

    @classmethod
    def from_dict(cls, data: Dict, path: str = "system") -> "SystemParams":
        if not isinstance(data, dict):
            raise ConfigError("expected an object", field=path)
        L = data.get("L")
        if not isinstance(L, int) or isinstance(L, bool):
            raise ConfigError("antenna count must be an integer", field=f"{path}.L")
        return cls(
            L=L,
            alpha=number_field(data, "alpha", path),
            sigma2=number_field(data, "sigma2", path, minimum=0.0),
            r_T=number_field(data, "r_T", path, strict=True, minimum=0.0),
        )

    def to_dict(self) -> Dict:
        return {"L": self.L, "alpha": self.alpha, "sigma2": self.sigma2, "r_T": self.r_T}

    def with_antennas(self, L: int) -> "SystemParams":
        return replace(self, L=L)


# ---------------------------------------------------------------------------
# Intensity models
# ---------------------------------------------------------------------------

class IntensityModel:
    """Base class for interferer intensity models."""

    TYPE = ""

    @property
    def is_random(self) -> bool:
        """True when the intensity itself is random (Cox process)."""
        return False

    def scaled(self, beta: float) -> "IntensityModel":
        """Return the model with its intensity multiplied by beta."""
        raise DomainError(f"model '{self.TYPE}' has no nominal shape to scale")

    def to_dict(self) -> Dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLawSegment:
    """Intensity rho * r**epsilon on the annulus r_inner <= r < r_outer."""
    r_inner: float
    r_outer: float
    rho: float
    epsilon: float

    def to_dict(self) -> Dict:
        return {"r_inner": self.r_inner, "r_outer": _dump_radius(self.r_outer),
                "rho": self.rho, "epsilon": self.epsilon}


@dataclass(frozen=True)
class PiecewisePowerLaw(IntensityModel):
    """Isotropic intensity that follows a power law on each radial segment."""
    segments: Tuple[PowerLawSegment, ...]

    TYPE = "piecewise_power_law"

    def __post_init__(self):
        if not self.segments:
            raise ConfigError("at least one segment is required", field="segments")
        previous_outer = None
        for i, seg in enumerate(self.segments):
            where = f"segments[{i}]"
            if seg.r_inner < 0 or not seg.r_outer > seg.r_inner:
                raise ConfigError("segment radii must satisfy 0 <= r_inner < r_outer", field=where)
            if seg.rho < 0:
                raise ConfigError("density must be nonnegative", field=f"{where}.rho")
            if previous_outer is not None and seg.r_inner < previous_outer:
                raise ConfigError("segments must be ordered and non-overlapping", field=where)
            if math.isinf(seg.r_outer) and i != len(self.segments) - 1:
                raise ConfigError("only the last segment may extend to infinity", field=where)
            if seg.r_inner == 0 and seg.rho > 0 and seg.epsilon <= -2:
                raise ConfigError("epsilon must exceed -2 when the segment starts at the origin",
                                  field=f"{where}.epsilon")
            previous_outer = seg.r_outer

    @classmethod
    def single(cls, rho: float, epsilon: float = 0.0, r_inner: float = 0.0,
               r_outer: float = math.inf) -> "PiecewisePowerLaw":
        return cls((PowerLawSegment(r_inner, r_outer, rho, epsilon),))

    @property
    def is_pure_power_law(self) -> bool:
        """Single segment covering the whole plane."""
        return (len(self.segments) == 1 and self.segments[0].r_inner == 0
                and math.isinf(self.segments[0].r_outer))

    def check_alpha(self, alpha: float):
        last = self.segments[-1]
        if math.isinf(last.r_outer) and last.rho > 0 and not last.epsilon < alpha - 2:
            raise DomainError(
                f"interference diverges: epsilon={last.epsilon} must be < alpha-2={alpha - 2}")

    def scaled(self, beta: float) -> "PiecewisePowerLaw":
        return PiecewisePowerLaw(tuple(replace(s, rho=s.rho * beta) for s in self.segments))

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "segments": [s.to_dict() for s in self.segments]}


@dataclass(frozen=True)
class GaussianCluster(IntensityModel):
    """One cluster of Poisson(mean_points) interferers, 2-D Gaussian around a fixed centre."""
    center_distance: float
    width: float
    mean_points: float

    TYPE = "gaussian_cluster"

    def __post_init__(self):
        if self.center_distance < 0:
            raise ConfigError("centre distance must be nonnegative", field="center_distance")
        if not self.width > 0:
            raise ConfigError("width must be positive", field="width")
        if self.mean_points < 0:
            raise ConfigError("mean number of points must be nonnegative", field="mean_points")

    def scaled(self, beta: float) -> "GaussianCluster":
        return replace(self, mean_points=self.mean_points * beta)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "center_distance": self.center_distance,
                "width": self.width, "mean_points": self.mean_points}


class CenterDistribution:
    """Distribution of the distance |X0| from the receiver to a random cluster centre."""

    def to_dict(self) -> Dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformDiskCenter(CenterDistribution):
    """Centre uniform in a disk of radius R_p: radial density 2*tau/R_p**2."""
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError("centre disk radius must be positive", field="center.radius")

    def density(self, tau: float) -> float:
        if tau < 0 or tau > self.radius:
            return 0.0
        return 2.0 * tau / self.radius ** 2

    @property
    def support(self) -> Tuple[float, float]:
        return 0.0, self.radius

    def to_dict(self) -> Dict:
        return {"type": "uniform_disk", "radius": self.radius}


@dataclass(frozen=True)
class PointMassCenter(CenterDistribution):
    """Centre at a fixed distance with probability one."""
    distance: float

    def __post_init__(self):
        if self.distance < 0:
            raise ConfigError("centre distance must be nonnegative", field="center.distance")

    @property
    def support(self) -> Tuple[float, float]:
        return self.distance, self.distance

    def to_dict(self) -> Dict:
        return {"type": "point_mass", "distance": self.distance}


@dataclass(frozen=True)
class TabulatedCenter(CenterDistribution):
    """Piecewise-linear radial density of |X0| given on a grid; must integrate to one."""
    taus: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if taus.ndim != 1 or taus.size < 2 or taus.size != weights.size:
            raise DomainError("tabulated centre density needs matching grids of at least 2 points")
        if np.any(np.diff(taus) <= 0) or taus[0] < 0:
            raise DomainError("tabulated centre grid must be increasing and nonnegative")
        if np.any(weights < 0):
            raise DomainError("tabulated centre density must be nonnegative")
        total = float(trapezoid(weights, taus))
        if abs(total - 1.0) > 1e-6:
            raise DomainError(f"centre density integrates to {total:.8g}, not 1")

    def density(self, tau: float) -> float:
        return float(np.interp(tau, self.taus, self.weights, left=0.0, right=0.0))

    @property
    def support(self) -> Tuple[float, float]:
        return self.taus[0], self.taus[-1]

    def to_dict(self) -> Dict:
        return {"type": "tabulated", "taus": list(self.taus), "weights": list(self.weights)}


@dataclass(frozen=True)
class RandomCenterGaussianCluster(IntensityModel):
    """Gaussian cluster whose centre distance is drawn from `center`."""
    center: CenterDistribution
    width: float
    mean_points: float

    TYPE = "random_center_gaussian_cluster"

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigError("width must be positive", field="width")
        if self.mean_points < 0:
            raise ConfigError("mean number of points must be nonnegative", field="mean_points")

    @property
    def is_random(self) -> bool:
        return not isinstance(self.center, PointMassCenter)

    def cluster_at(self, tau: float) -> GaussianCluster:
        return GaussianCluster(tau, self.width, self.mean_points)

    def scaled(self, beta: float) -> "RandomCenterGaussianCluster":
        return replace(self, mean_points=self.mean_points * beta)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "center": self.center.to_dict(),
                "width": self.width, "mean_points": self.mean_points}


@dataclass(frozen=True)
class DiskCluster(IntensityModel):
    """Uniform density inside a disk of radius `radius` centred `center_distance` from the receiver."""
    center_distance: float
    radius: float
    density: float

    TYPE = "disk_cluster"

    def __post_init__(self):
        if self.center_distance < 0:
            raise ConfigError("centre distance must be nonnegative", field="center_distance")
        if not self.radius > 0:
            raise ConfigError("radius must be positive", field="radius")
        if self.density < 0:
            raise ConfigError("density must be nonnegative", field="density")

    @property
    def mean_points(self) -> float:
        return self.density * math.pi * self.radius ** 2

    def scaled(self, beta: float) -> "DiskCluster":
        return replace(self, density=self.density * beta)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "center_distance": self.center_distance,
                "radius": self.radius, "density": self.density}


@dataclass(frozen=True)
class Strip(IntensityModel):
    """Homogeneous density on an infinite strip |y| <= half_width through the receiver."""
    half_width: float
    density: float

    TYPE = "strip"

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigError("half width must be positive", field="half_width")
        if self.density < 0:
            raise ConfigError("density must be nonnegative", field="density")

    def scaled(self, beta: float) -> "Strip":
        return replace(self, density=self.density * beta)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "half_width": self.half_width, "density": self.density}


GUARD_CENTERS = ("receiver", "transmitter")


def matern_retained_density(parent_density: float, guard_radius: float) -> float:
    """Density of points kept by Matern type-II thinning: (1 - exp(-rho_p*pi*R1^2)) / (pi*R1^2)."""
    if guard_radius == 0:
        return parent_density
    area = math.pi * guard_radius ** 2
    return -math.expm1(-parent_density * area) / area


@dataclass(frozen=True)
class HardCoreApprox(IntensityModel):
    """
    Poisson approximation of a Matern type-II hard-core network.

    Density rho(R1) outside a guard disk of radius R1 centred on the receiver
    or on the representative transmitter at distance link_distance.
    """
    parent_density: float
    guard_radius: float
    guard_center: str = "transmitter"
    link_distance: float = 1.0

    TYPE = "hard_core"

    def __post_init__(self):
        if self.parent_density < 0:
            raise ConfigError("parent density must be nonnegative", field="parent_density")
        if self.guard_radius < 0:
            raise ConfigError("guard radius must be nonnegative", field="guard_radius")
        if self.guard_center not in GUARD_CENTERS:
            raise ConfigError(f"guard_center must be one of {GUARD_CENTERS}", field="guard_center")
        if not self.link_distance > 0:
            raise ConfigError("link distance must be positive", field="link_distance")

    @property
    def retained_density(self) -> float:
        return matern_retained_density(self.parent_density, self.guard_radius)

    @property
    def guard_offset(self) -> float:
        """Distance from the receiver to the guard-disk centre."""
        return 0.0 if self.guard_center == "receiver" else self.link_distance

    def with_guard_radius(self, guard_radius: float) -> "HardCoreApprox":
        return replace(self, guard_radius=guard_radius)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "parent_density": self.parent_density,
                "guard_radius": self.guard_radius, "guard_center": self.guard_center,
                "link_distance": self.link_distance}


@dataclass(frozen=True)
class MaternClusterConditioned(IntensityModel):
    """
    Matern cluster process conditioned on a cluster at the origin.

    Parents form a PPP of density parent_density; each holds Poisson(mean_daughters)
    daughters uniform in a disk of radius cluster_radius. The origin cluster holds
    mean_daughters - 1 interferers on average (the representative transmitter is one of them).
    """
    parent_density: float
    cluster_radius: float
    mean_daughters: float

    TYPE = "matern_cluster_conditioned"

    def __post_init__(self):
        if self.parent_density < 0:
            raise ConfigError("parent density must be nonnegative", field="parent_density")
        if not self.cluster_radius > 0:
            raise ConfigError("cluster radius must be positive", field="cluster_radius")
        if self.mean_daughters < 1:
            raise ConfigError("mean number of daughters must be at least 1", field="mean_daughters")

    @property
    def is_random(self) -> bool:
        return True

    @property
    def daughter_density(self) -> float:
        return self.mean_daughters / (math.pi * self.cluster_radius ** 2)

    def origin_cluster(self) -> DiskCluster:
        return DiskCluster(0.0, self.cluster_radius,
                           (self.mean_daughters - 1) / (math.pi * self.cluster_radius ** 2))

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "parent_density": self.parent_density,
                "cluster_radius": self.cluster_radius, "mean_daughters": self.mean_daughters}


@dataclass(frozen=True)
class ThomasClusterConditioned(IntensityModel):
    """Thomas (Gaussian-daughter) cluster process conditioned on a cluster at the origin."""
    parent_density: float
    width: float
    mean_daughters: float

    TYPE = "thomas_cluster_conditioned"

    def __post_init__(self):
        if self.parent_density < 0:
            raise ConfigError("parent density must be nonnegative", field="parent_density")
        if not self.width > 0:
            raise ConfigError("width must be positive", field="width")
        if self.mean_daughters < 1:
            raise ConfigError("mean number of daughters must be at least 1", field="mean_daughters")

    @property
    def is_random(self) -> bool:
        return True

    def origin_cluster(self) -> GaussianCluster:
        return GaussianCluster(0.0, self.width, self.mean_daughters - 1)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "parent_density": self.parent_density,
                "width": self.width, "mean_daughters": self.mean_daughters}


@dataclass(frozen=True)
class CustomRadialProfile(IntensityModel):
    """
    Isotropic model given by its angular integral g(r) = integral of lambda(r, theta) d theta.

    `source` keeps the JSON description the profile was built from so that it can
    be written back to a config file.
    """
    angular_integral: Callable[[float], float] = field(compare=False)
    r_min: float = 0.0
    r_max: float = math.inf
    label: str = ""
    source: Optional[Dict] = field(default=None, compare=True, hash=False)

    TYPE = "custom_radial"

    def __post_init__(self):
        if self.r_min < 0 or not self.r_max > self.r_min:
            raise ConfigError("profile support must satisfy 0 <= r_min < r_max", field="r_min")

    def __hash__(self):
        return hash((self.TYPE, self.r_min, self.r_max, self.label))

    def __call__(self, r: float) -> float:
        if r < self.r_min or r > self.r_max:
            return 0.0
        return self.angular_integral(r)

    @classmethod
    def from_table(cls, radii: Sequence[float], values: Sequence[float], label: str = "") -> "CustomRadialProfile":
        r = np.asarray(radii, dtype=float)
        g = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.size != g.size:
            raise ConfigError("tabulated profile needs matching r / angular_integral arrays", field="r")
        if np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ConfigError("tabulated radii must be increasing and nonnegative", field="r")
        if np.any(g < 0):
            raise ConfigError("angular integral must be nonnegative", field="angular_integral")
        source = {"type": cls.TYPE, "r": r.tolist(), "angular_integral": g.tolist()}
        if label:
            source["label"] = label

        def table(x: float) -> float:
            return float(np.interp(x, r, g))

        return cls(table, float(r[0]), float(r[-1]), label, source)

    def scaled(self, beta: float) -> "CustomRadialProfile":
        inner = self.angular_integral
        source = None
        if self.source is not None:
            source = dict(self.source)
            source["scale"] = source.get("scale", 1.0) * beta
        return CustomRadialProfile(lambda r: beta * inner(r), self.r_min, self.r_max, self.label, source)

    def to_dict(self) -> Dict:
        if self.source is None:
            raise ConfigError("profile built from a Python callable cannot be serialised", field="model")
        return dict(self.source)


@dataclass(frozen=True)
class Superposition(IntensityModel):
    """Independent superposition of member processes; psi is additive."""
    members: Tuple[IntensityModel, ...]

    TYPE = "superposition"

    def __post_init__(self):
        if not self.members:
            raise ConfigError("superposition needs at least one member", field="members")
        if sum(1 for m in self.members if m.is_random) > 1:
            raise ConfigError("superposition may hold at most one random member", field="members")

    @property
    def is_random(self) -> bool:
        return any(m.is_random for m in self.members)

    def scaled(self, beta: float) -> "Superposition":
        return Superposition(tuple(m.scaled(beta) for m in self.members))

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "members": [m.to_dict() for m in self.members]}


@dataclass(frozen=True)
class Mixture(IntensityModel):
    """Random intensity taking finitely many values: model i with probability weight i."""
    components: Tuple[Tuple[float, IntensityModel], ...]

    TYPE = "mixture"

    def __post_init__(self):
        if not self.components:
            raise ConfigError("mixture needs at least one component", field="components")
        weights = [w for w, _ in self.components]
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise ConfigError("mixture weights must be nonnegative and sum to 1", field="components")

    @property
    def is_random(self) -> bool:
        return True

    def scaled(self, beta: float) -> "Mixture":
        return Mixture(tuple((w, m.scaled(beta)) for w, m in self.components))

    def to_dict(self) -> Dict:
        return {"type": self.TYPE,
                "components": [{"weight": w, "model": m.to_dict()} for w, m in self.components]}


# ---------------------------------------------------------------------------
# Path-loss laws
# ---------------------------------------------------------------------------

class PathLoss:
    """
    Continuous, strictly decreasing path-loss law phi(r).

    Subclasses override `inverse` / `inverse_derivative` when a closed form
    exists; otherwise both are obtained by bracketed root finding and central
    finite differences.
    """

    TYPE = ""

    def __call__(self, r):
        return self.value(r)

    def value(self, r):
        raise NotImplementedError

    @property
    def value_at_zero(self) -> float:
        return float(self.value(0.0))

    @property
    def value_at_infinity(self) -> float:
        return 0.0

    def check_range(self, y: float):
        if not self.value_at_infinity < y < self.value_at_zero:
            raise DomainError(f"{y} is outside the range of the path-loss law")

    def inverse(self, y: float) -> float:
        """r such that phi(r) = y, for y strictly inside the range of phi."""
        self.check_range(y)
        hi = 1.0
        while self.value(hi) > y:
            hi *= 2.0
            if hi > 1e15:
                raise DomainError("path-loss law cannot be inverted: bracket search failed")
        return brentq(lambda r: self.value(r) - y, 0.0, hi, xtol=1e-14, rtol=1e-13, maxiter=500)

    def inverse_derivative(self, y: float) -> float:
        """1 / phi'(r) at r = phi^-1(y), with phi' by central differences."""
        r = self.inverse(y)
        h = 1e-6 * max(r, 1.0)
        lo = max(r - h, 0.0)
        slope = (float(self.value(r + h)) - float(self.value(lo))) / (r + h - lo)
        return 1.0 / slope

    def check_monotone(self, r_max: float = 1e6, samples: int = 2000):
        """Raise DomainError when sampling finds phi not strictly decreasing."""
        r = np.concatenate(([0.0], np.geomspace(1e-6, r_max, samples)))
        values = np.asarray(self.value(r), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError("path-loss law must be finite on [0, inf)")
        positive = values > 0
        if np.any(np.diff(values[positive]) >= 0):
            raise DomainError("path-loss law must be strictly decreasing")

    def to_dict(self) -> Dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLawPathLoss(PathLoss):
    """phi(r) = r**-alpha (unbounded at the origin)."""
    alpha: float

    TYPE = "power_law"

    def value(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, np.power(np.maximum(r, 1e-300), -self.alpha), np.inf)

    @property
    def value_at_zero(self) -> float:
        return math.inf

    def check_monotone(self, r_max: float = 1e6, samples: int = 2000):
        if not self.alpha > 0:
            raise DomainError("power-law exponent must be positive")

    def inverse(self, y: float) -> float:
        self.check_range(y)
        return y ** (-1.0 / self.alpha)

    def inverse_derivative(self, y: float) -> float:
        self.check_range(y)
        return -(1.0 / self.alpha) * y ** (-1.0 / self.alpha - 1.0)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "alpha": self.alpha}


@dataclass(frozen=True)
class ExponentialPathLoss(PathLoss):
    """Dispersive path loss phi(r) = exp(-nu * r)."""
    nu: float

    TYPE = "exponential"

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigError("attenuation nu must be positive", field="pathloss.nu")

    def value(self, r):
        return np.exp(-self.nu * np.asarray(r, dtype=float))

    @property
    def value_at_zero(self) -> float:
        return 1.0

    def inverse(self, y: float) -> float:
        self.check_range(y)
        return -math.log(y) / self.nu

    def inverse_derivative(self, y: float) -> float:
        self.check_range(y)
        return -1.0 / (self.nu * y)

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "nu": self.nu}


@dataclass(frozen=True)
class BoundedPowerLawPathLoss(PathLoss):
    """phi(r) = (1 + r)**-exponent; inverted numerically."""
    exponent: float

    TYPE = "bounded_power_law"

    def __post_init__(self):
        if not self.exponent > 0:
            raise ConfigError("exponent must be positive", field="pathloss.exponent")

    def value(self, r):
        return np.power(1.0 + np.asarray(r, dtype=float), -self.exponent)

    @property
    def value_at_zero(self) -> float:
        return 1.0

    def to_dict(self) -> Dict:
        return {"type": self.TYPE, "exponent": self.exponent}


def pathloss_from_dict(data: Dict, path: str = "pathloss") -> PathLoss:
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigError("path-loss description needs a 'type'", field=path)
    kind = data["type"]
    if kind == PowerLawPathLoss.TYPE:
        return PowerLawPathLoss(number_field(data, "alpha", path, strict=True, minimum=0.0))
    if kind == ExponentialPathLoss.TYPE:
        return ExponentialPathLoss(number_field(data, "nu", path, strict=True, minimum=0.0))
    if kind == BoundedPowerLawPathLoss.TYPE:
        return BoundedPowerLawPathLoss(number_field(data, "exponent", path, strict=True, minimum=0.0))
    raise ConfigError(f"unknown path-loss type {kind!r}", field=f"{path}.type")


# ---------------------------------------------------------------------------
# JSON tree -> model
# ---------------------------------------------------------------------------

def _center_from_dict(data: Dict, path: str) -> CenterDistribution:
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigError("centre distribution needs a 'type'", field=path)
    kind = data["type"]
    if kind == "uniform_disk":
        return UniformDiskCenter(number_field(data, "radius", path, strict=True, minimum=0.0))
    if kind == "point_mass":
        return PointMassCenter(number_field(data, "distance", path, minimum=0.0))
    if kind == "tabulated":
        try:
            return TabulatedCenter(tuple(float(t) for t in data["taus"]),
                                   tuple(float(w) for w in data["weights"]))
        except KeyError as e:
            raise ConfigError("missing required field", field=f"{path}.{e.args[0]}")
    raise ConfigError(f"unknown centre distribution {kind!r}", field=f"{path}.type")


def _segments_from_list(items: List, path: str) -> Tuple[PowerLawSegment, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("expected a non-empty list of segments", field=path)
    segments = []
    for i, item in enumerate(items):
        where = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise ConfigError("expected an object", field=where)
        segments.append(PowerLawSegment(
            r_inner=number_field(item, "r_inner", where, default=0.0, minimum=0.0),
            r_outer=number_field(item, "r_outer", where, default=math.inf, allow_inf=True),
            rho=number_field(item, "rho", where, minimum=0.0),
            epsilon=number_field(item, "epsilon", where, default=0.0),
        ))
    return tuple(segments)


def model_from_dict(data: Dict, path: str = "model") -> IntensityModel:
    """
    Build an IntensityModel from its JSON description.

    Args:
        data: Parsed JSON object with a "type" key
        path: Dotted path used in error messages

    Returns:
        The model instance
    """
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigError("model description needs a 'type'", field=path)
    kind = data["type"]
    try:
        if kind == "power_law":
            return PiecewisePowerLaw.single(
                rho=number_field(data, "rho", path, minimum=0.0),
                epsilon=number_field(data, "epsilon", path, default=0.0),
            )
        if kind == PiecewisePowerLaw.TYPE:
            return PiecewisePowerLaw(_segments_from_list(data.get("segments"), f"{path}.segments"))
        if kind == GaussianCluster.TYPE:
            return GaussianCluster(
                center_distance=number_field(data, "center_distance", path, default=0.0, minimum=0.0),
                width=number_field(data, "width", path, strict=True, minimum=0.0),
                mean_points=number_field(data, "mean_points", path, minimum=0.0),
            )
        if kind == RandomCenterGaussianCluster.TYPE:
            return RandomCenterGaussianCluster(
                center=_center_from_dict(data.get("center"), f"{path}.center"),
                width=number_field(data, "width", path, strict=True, minimum=0.0),
                mean_points=number_field(data, "mean_points", path, minimum=0.0),
            )
        if kind == DiskCluster.TYPE:
            return DiskCluster(
                center_distance=number_field(data, "center_distance", path, default=0.0, minimum=0.0),
                radius=number_field(data, "radius", path, strict=True, minimum=0.0),
                density=number_field(data, "density", path, minimum=0.0),
            )
        if kind == Strip.TYPE:
            return Strip(
                half_width=number_field(data, "half_width", path, strict=True, minimum=0.0),
                density=number_field(data, "density", path, minimum=0.0),
            )
        if kind == HardCoreApprox.TYPE:
            return HardCoreApprox(
                parent_density=number_field(data, "parent_density", path, minimum=0.0),
                guard_radius=number_field(data, "guard_radius", path, minimum=0.0),
                guard_center=data.get("guard_center", "transmitter"),
                link_distance=number_field(data, "link_distance", path, default=1.0, strict=True, minimum=0.0),
            )
        if kind == MaternClusterConditioned.TYPE:
            return MaternClusterConditioned(
                parent_density=number_field(data, "parent_density", path, minimum=0.0),
                cluster_radius=number_field(data, "cluster_radius", path, strict=True, minimum=0.0),
                mean_daughters=number_field(data, "mean_daughters", path, minimum=1.0),
            )
        if kind == ThomasClusterConditioned.TYPE:
            return ThomasClusterConditioned(
                parent_density=number_field(data, "parent_density", path, minimum=0.0),
                width=number_field(data, "width", path, strict=True, minimum=0.0),
                mean_daughters=number_field(data, "mean_daughters", path, minimum=1.0),
            )
        if kind == CustomRadialProfile.TYPE:
            if "r" not in data or "angular_integral" not in data:
                raise ConfigError("tabulated profile needs 'r' and 'angular_integral'", field=path)
            profile = CustomRadialProfile.from_table(data["r"], data["angular_integral"],
                                                     data.get("label", ""))
            scale = number_field(data, "scale", path, default=1.0, minimum=0.0)
            return profile.scaled(scale) if scale != 1.0 else profile
        if kind == "equivalent_pathloss":
            from analytic_engine import equivalent_intensity  # avoid import cycle
            pathloss = pathloss_from_dict(data.get("pathloss"), f"{path}.pathloss")
            alpha = number_field(data, "alpha", path, strict=True, minimum=2.0)
            density = number_field(data, "base_density", path, minimum=0.0)
            profile = replace(equivalent_intensity(pathloss, density, alpha), source={
                "type": "equivalent_pathloss", "pathloss": pathloss.to_dict(),
                "alpha": alpha, "base_density": density})
            scale = number_field(data, "scale", path, default=1.0, minimum=0.0)
            return profile.scaled(scale) if scale != 1.0 else profile
        if kind == Superposition.TYPE:
            members = data.get("members")
            if not isinstance(members, list):
                raise ConfigError("expected a list of member models", field=f"{path}.members")
            return Superposition(tuple(model_from_dict(m, f"{path}.members[{i}]")
                                       for i, m in enumerate(members)))
        if kind == Mixture.TYPE:
            components = data.get("components")
            if not isinstance(components, list):
                raise ConfigError("expected a list of components", field=f"{path}.components")
            parsed = []
            for i, comp in enumerate(components):
                where = f"{path}.components[{i}]"
                if not isinstance(comp, dict):
                    raise ConfigError("expected an object", field=where)
                parsed.append((number_field(comp, "weight", where, minimum=0.0),
                               model_from_dict(comp.get("model"), f"{where}.model")))
            return Mixture(tuple(parsed))
    except ConfigError as e:
        if e.field and not e.field.startswith(path):
            raise ConfigError(e.message, field=f"{path}.{e.field}")
        raise
    except DomainError as e:
        raise ConfigError(str(e), field=path)
    raise ConfigError(f"unknown model type {kind!r}", field=f"{path}.type")
