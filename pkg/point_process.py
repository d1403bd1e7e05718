"""
Seeded sampling of interferer configurations for every intensity model.

Each call draws a Poisson number of points from the model's mean measure
inside a validated simulation window. Trials get independent generator
streams derived from (master seed, trial index).
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.spatial import cKDTree

from analytic_engine import (
    GAUSSIAN_SPAN, THOMAS_SPAN, PsiFunction, angular_integral, support_breaks, support_radius,
    validate_model,
)
from errors import DomainError, WindowError
from models import (
    CustomRadialProfile, DiskCluster, GaussianCluster, HardCoreApprox, IntensityModel,
    MaternClusterConditioned, Mixture, PiecewisePowerLaw, PointMassCenter,
    RandomCenterGaussianCluster, Strip, Superposition, TabulatedCenter, ThomasClusterConditioned,
    UniformDiskCenter,
)
from quadrature import integrate_finite, integrate_semi_infinite
from special_functions import powerlaw_tail

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TOLERANCE = 1e-6
MAX_WINDOW = 1e9
PROFILE_GRID = 4096
HARD_CORE_MODES = ("matern", "poisson")


@dataclass(frozen=True)
class SimWindow:
    """Disk of radius outer_radius around the receiver that sampling is restricted to."""
    outer_radius: float
    tail_bound: float = 0.0

    def __post_init__(self):
        if not self.outer_radius > 0 or math.isinf(self.outer_radius):
            raise WindowError(f"window radius must be positive and finite, got {self.outer_radius}")


@dataclass(frozen=True, eq=False)
class Realization:
    """Interferer positions (n x 2, receiver at the origin) and the stream they came from."""
    positions: np.ndarray
    seed_info: Tuple[int, int] = (0, 0)

    @property
    def distances(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])

    def __len__(self):
        return len(self.positions)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial, reproducible from (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial_index,)))


# ---------------------------------------------------------------------------
# Window validation
# ---------------------------------------------------------------------------

def mean_measure_model(model: IntensityModel) -> IntensityModel:
    """
    Deterministic stand-in used to size windows.

    Cluster processes are replaced by their mean measure; a cluster with a
    random centre by the same cluster centred on the receiver.
    """
    if isinstance(model, RandomCenterGaussianCluster):
        return GaussianCluster(0.0, model.width, model.mean_points)
    if isinstance(model, MaternClusterConditioned):
        return Superposition((model.origin_cluster(),
                              PiecewisePowerLaw.single(model.parent_density * model.mean_daughters)))
    if isinstance(model, ThomasClusterConditioned):
        return Superposition((model.origin_cluster(),
                              PiecewisePowerLaw.single(model.parent_density * model.mean_daughters)))
    if isinstance(model, Superposition):
        return Superposition(tuple(mean_measure_model(m) for m in model.members))
    return model


def _center_reach(model: RandomCenterGaussianCluster) -> float:
    center = model.center
    if isinstance(center, UniformDiskCenter):
        return center.radius
    if isinstance(center, PointMassCenter):
        return center.distance
    return center.taus[-1]


def psi_tail(model: IntensityModel, alpha: float, gamma: float, radius: float) -> float:
    """Contribution to psi(gamma) from interferers farther than `radius` (an upper bound for strips)."""
    if isinstance(model, Superposition):
        return sum(psi_tail(m, alpha, gamma, radius) for m in model.members)
    if isinstance(model, PiecewisePowerLaw):
        total = 0.0
        for seg in model.segments:
            lo, hi = max(seg.r_inner, radius), seg.r_outer
            if hi <= lo or seg.rho == 0:
                continue
            tail = powerlaw_tail(seg.epsilon, alpha, gamma, lo) if math.isinf(hi) else None
            if tail is None:
                integrand = lambda r, s=seg: r ** (s.epsilon + 1.0) * gamma / (r ** alpha + gamma)
                tail = integrate_finite(integrand, lo, hi).value
            total += 2.0 * math.pi * seg.rho * tail
        return total
    if isinstance(model, Strip):
        a = model.half_width
        bound = 2.0 * math.pi * model.density * a * gamma * max(radius, a) ** (1.0 - alpha) / (alpha - 1.0)
        if radius < a:
            bound += _numeric_tail(model, alpha, gamma, radius, a)
        return bound
    if isinstance(model, HardCoreApprox):
        outer = model.guard_offset + model.guard_radius
        tail = 2.0 * math.pi * model.retained_density * powerlaw_tail(0.0, alpha, gamma, max(radius, outer))
        if radius < outer:
            tail += _numeric_tail(model, alpha, gamma, radius, outer)
        return tail
    top = support_radius(model)
    if radius >= top:
        return 0.0
    return _numeric_tail(model, alpha, gamma, radius, top)


def _numeric_tail(model: IntensityModel, alpha: float, gamma: float, lo: float, hi: float) -> float:
    integrand = lambda r: angular_integral(model, r) * r * gamma / (r ** alpha + gamma)
    breaks = [b for b in support_breaks(model) if lo < b < hi]
    if math.isinf(hi):
        return integrate_semi_infinite(integrand, lo, rel_tol=1e-8, scale=max(lo, 1.0), points=breaks).value
    return integrate_finite(integrand, lo, hi, rel_tol=1e-8, points=breaks).value


def _required_radius(model: IntensityModel) -> float:
    """Radius the window must reach for samplers that cannot truncate a model."""
    if isinstance(model, DiskCluster):
        return model.center_distance + model.radius
    if isinstance(model, Superposition):
        return max(_required_radius(m) for m in model.members)
    return 0.0


def _compact_radius(model: IntensityModel) -> float:
    """Radius that contains every interferer, or inf."""
    if isinstance(model, RandomCenterGaussianCluster):
        return _center_reach(model) + GAUSSIAN_SPAN * model.width
    if isinstance(model, Mixture):
        return max(_compact_radius(m) for _, m in model.components)
    if isinstance(model, Superposition):
        return max(_compact_radius(m) for m in model.members)
    if isinstance(model, (MaternClusterConditioned, ThomasClusterConditioned)):
        return math.inf
    return support_radius(model)


def validate_window(model: IntensityModel, alpha: float, gamma_max: float,
                    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> SimWindow:
    """
    Smallest doubling radius whose psi tail is below tail_tolerance * psi(gamma_max).

    Models with compact support get their support radius when that is smaller.

    Args:
        model: Intensity model to be simulated
        alpha: Path-loss exponent
        gamma_max: Largest distance-normalised threshold of interest
        tail_tolerance: Allowed relative truncation bias on psi

    Returns:
        SimWindow
    """
    validate_model(model, alpha)
    if not gamma_max > 0:
        raise WindowError(f"gamma_max must be positive, got {gamma_max}")
    if not 0 < tail_tolerance < 1:
        raise WindowError(f"tail tolerance must lie in (0, 1), got {tail_tolerance}")
    if isinstance(model, Mixture):
        windows = [validate_window(m, alpha, gamma_max, tail_tolerance) for _, m in model.components]
        return max(windows, key=lambda w: w.outer_radius)

    compact = _compact_radius(model)
    if isinstance(model, (DiskCluster, GaussianCluster, RandomCenterGaussianCluster)):
        window = SimWindow(compact, 0.0)
        logger.info("[SIM] window radius %.6g (compact support)", window.outer_radius)
        return window

    reference = mean_measure_model(model)
    target = tail_tolerance * PsiFunction(reference, alpha)(gamma_max)
    radius = max(1.0, _required_radius(model))
    if target == 0:
        return SimWindow(min(radius, compact), 0.0)
    while True:
        if radius >= compact:
            window = SimWindow(compact, 0.0)
            break
        tail = psi_tail(reference, alpha, gamma_max, radius)
        if tail < target:
            window = SimWindow(radius, tail)
            break
        radius *= 2.0
        if radius > MAX_WINDOW:
            raise WindowError(f"window search exceeded {MAX_WINDOW:g} m for tail tolerance {tail_tolerance:g}")
    logger.info("[SIM] window radius %.6g, psi tail %.3g (target %.3g)",
                window.outer_radius, window.tail_bound, target)
    return window


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def _polar(radii: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * math.pi, size=len(radii))
    return np.column_stack((radii * np.cos(theta), radii * np.sin(theta)))


def _uniform_disk(n: int, radius: float, center: Tuple[float, float], rng: np.random.Generator) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    points = _polar(r, rng)
    return points + np.asarray(center, dtype=float)


def _power_law_segment(seg, upper: float, rng: np.random.Generator) -> np.ndarray:
    lo, hi = seg.r_inner, min(seg.r_outer, upper)
    if hi <= lo or seg.rho == 0:
        return np.empty((0, 2))
    k = 2.0 + seg.epsilon
    if abs(k) < 1e-12:
        mean = 2.0 * math.pi * seg.rho * math.log(hi / lo)
    else:
        mean = 2.0 * math.pi * seg.rho * (hi ** k - lo ** k) / k
    n = rng.poisson(mean)
    u = rng.uniform(size=n)
    if abs(k) < 1e-12:
        radii = lo * (hi / lo) ** u
    else:
        radii = ((hi ** k - lo ** k) * u + lo ** k) ** (1.0 / k)
    return _polar(radii, rng)


def _gaussian_points(n: int, center: np.ndarray, width: float, rng: np.random.Generator) -> np.ndarray:
    return center + width * rng.standard_normal(size=(n, 2))


def _center_distance(center, rng: np.random.Generator) -> float:
    if isinstance(center, PointMassCenter):
        return center.distance
    if isinstance(center, UniformDiskCenter):
        return center.radius * math.sqrt(rng.uniform())
    if isinstance(center, TabulatedCenter):
        taus = np.asarray(center.taus)
        cdf = cumulative_trapezoid(center.weights, taus, initial=0.0)
        return float(np.interp(rng.uniform() * cdf[-1], cdf, taus))
    raise DomainError(f"unsupported centre distribution {type(center).__name__}")


def _strip_points(model: Strip, radius: float, rng: np.random.Generator) -> np.ndarray:
    a = min(model.half_width, radius)
    n = rng.poisson(model.density * 4.0 * a * radius)
    points = np.column_stack((rng.uniform(-radius, radius, size=n), rng.uniform(-a, a, size=n)))
    return points[np.hypot(points[:, 0], points[:, 1]) <= radius]


def matern_type_ii(parent_density: float, guard_radius: float, radius: float,
                   rng: np.random.Generator) -> np.ndarray:
    """
    Matern type-II hard-core points in the disk of the given radius.

    Candidates come from a PPP on a disk padded by the guard radius; each
    candidate with a lower-marked candidate within guard_radius is deleted.
    """
    padded = radius + guard_radius
    n = rng.poisson(parent_density * math.pi * padded ** 2)
    candidates = _uniform_disk(n, padded, (0.0, 0.0), rng)
    marks = rng.uniform(size=n)
    keep = np.ones(n, dtype=bool)
    if n > 1 and guard_radius > 0:
        pairs = cKDTree(candidates).query_pairs(guard_radius, output_type="ndarray")
        if len(pairs):
            i, j = pairs[:, 0], pairs[:, 1]
            # ties in marks are broken by candidate index
            i_loses = (marks[i] > marks[j]) | ((marks[i] == marks[j]) & (i > j))
            keep[np.where(i_loses, i, j)] = False
    kept = candidates[keep]
    return kept[np.hypot(kept[:, 0], kept[:, 1]) <= radius]


def _hard_core_points(model: HardCoreApprox, radius: float, rng: np.random.Generator,
                      mode: str) -> np.ndarray:
    if mode == "matern":
        points = matern_type_ii(model.parent_density, model.guard_radius, radius, rng)
    else:
        n = rng.poisson(model.retained_density * math.pi * radius ** 2)
        points = _uniform_disk(n, radius, (0.0, 0.0), rng)
    guard_center = np.array([model.guard_offset, 0.0])
    outside = np.hypot(points[:, 0] - guard_center[0], points[:, 1] - guard_center[1]) > model.guard_radius
    return points[outside]


def _neyman_scott_points(model, radius: float, rng: np.random.Generator) -> np.ndarray:
    matern = isinstance(model, MaternClusterConditioned)
    spread = model.cluster_radius if matern else THOMAS_SPAN * model.width

    def daughters(n: int, center: np.ndarray) -> np.ndarray:
        if matern:
            return _uniform_disk(n, model.cluster_radius, tuple(center), rng)
        return _gaussian_points(n, center, model.width, rng)

    blocks = [daughters(rng.poisson(model.mean_daughters - 1.0), np.zeros(2))]
    padded = radius + spread
    n_parents = rng.poisson(model.parent_density * math.pi * padded ** 2)
    parents = _uniform_disk(n_parents, padded, (0.0, 0.0), rng)
    counts = rng.poisson(model.mean_daughters, size=n_parents)
    for parent, count in zip(parents, counts):
        blocks.append(daughters(int(count), parent))
    return np.concatenate(blocks) if blocks else np.empty((0, 2))


def _profile_points(model: CustomRadialProfile, radius: float, rng: np.random.Generator) -> np.ndarray:
    lo, hi = model.r_min, min(model.r_max, radius)
    if hi <= lo:
        return np.empty((0, 2))
    grid = np.unique(np.concatenate((
        np.linspace(lo, hi, PROFILE_GRID // 2),
        np.geomspace(max(lo, hi * 1e-9), hi, PROFILE_GRID // 2),
    )))
    density = np.array([model(r) * r for r in grid])
    if np.any(density < 0):
        raise DomainError("profile angular integral must be nonnegative")
    cumulative = cumulative_trapezoid(density, grid, initial=0.0)
    n = rng.poisson(cumulative[-1])
    radii = np.interp(rng.uniform(size=n) * cumulative[-1], cumulative, grid)
    return _polar(radii, rng)


def sample(model: IntensityModel, window: SimWindow, rng: np.random.Generator,
           seed_info: Tuple[int, int] = (0, 0), hard_core: str = "matern") -> Realization:
    """
    Draw one interferer configuration.

    Args:
        model: Intensity model
        window: Validated simulation window
        rng: Generator owned by this call
        seed_info: (master seed, trial index) recorded on the realisation
        hard_core: "matern" for the exact type-II process, "poisson" for the
            non-homogeneous Poisson approximation of a HardCoreApprox model

    Returns:
        Realization with all interferers at positive distance
    """
    if hard_core not in HARD_CORE_MODES:
        raise DomainError(f"hard_core must be one of {HARD_CORE_MODES}")
    points = _sample_points(model, window.outer_radius, rng, hard_core)
    if len(points):
        points = points[np.hypot(points[:, 0], points[:, 1]) > 0]
    return Realization(np.asarray(points, dtype=float).reshape(-1, 2), seed_info)


def _sample_points(model: IntensityModel, radius: float, rng: np.random.Generator,
                   hard_core: str) -> np.ndarray:
    if isinstance(model, PiecewisePowerLaw):
        blocks = [_power_law_segment(seg, radius, rng) for seg in model.segments]
        return np.concatenate(blocks)
    if isinstance(model, GaussianCluster):
        n = rng.poisson(model.mean_points)
        return _gaussian_points(n, np.array([model.center_distance, 0.0]), model.width, rng)
    if isinstance(model, RandomCenterGaussianCluster):
        tau = _center_distance(model.center, rng)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        n = rng.poisson(model.mean_points)
        return _gaussian_points(n, tau * np.array([math.cos(angle), math.sin(angle)]), model.width, rng)
    if isinstance(model, DiskCluster):
        if model.center_distance + model.radius > radius * (1.0 + 1e-12):
            raise WindowError(f"window radius {radius:g} does not cover the disk cluster")
        n = rng.poisson(model.mean_points)
        return _uniform_disk(n, model.radius, (model.center_distance, 0.0), rng)
    if isinstance(model, Strip):
        return _strip_points(model, radius, rng)
    if isinstance(model, HardCoreApprox):
        return _hard_core_points(model, radius, rng, hard_core)
    if isinstance(model, (MaternClusterConditioned, ThomasClusterConditioned)):
        return _neyman_scott_points(model, radius, rng)
    if isinstance(model, CustomRadialProfile):
        return _profile_points(model, radius, rng)
    if isinstance(model, Superposition):
        return np.concatenate([_sample_points(m, radius, rng, hard_core) for m in model.members])
    if isinstance(model, Mixture):
        weights = np.array([w for w, _ in model.components])
        pick = int(rng.choice(len(weights), p=weights / weights.sum()))
        return _sample_points(model.components[pick][1], radius, rng, hard_core)
    raise DomainError(f"no sampler for model '{model.TYPE}'")
