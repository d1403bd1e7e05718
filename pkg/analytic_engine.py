"""
Analytic SINR outage engine.

Builds the interference functional

    psi(gamma) = integral lambda(r, theta) * r * gamma / (r**alpha + gamma) dtheta dr

for every intensity model and turns it into SINR CDFs: the conditional
Poisson form 1 - Q(L, psi + sigma2*gamma) for deterministic intensities,
expectations over a random cluster centre, the Neyman-Scott partition sum
for cluster processes and convex combinations for finite mixtures.
Also hosts the scaling limit, path-loss equivalence and guard-zone tools.

All gamma values here are distance-normalised: gamma = SINR * r_T**alpha.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats
from scipy.integrate import trapezoid
from scipy.optimize import brentq, minimize_scalar
from sympy.utilities.iterables import partitions as sympy_partitions

from errors import DomainError, NumericError
from models import (
    CustomRadialProfile, DiskCluster, ExponentialPathLoss, GaussianCluster, HardCoreApprox,
    IntensityModel, MaternClusterConditioned, Mixture, PathLoss, PiecewisePowerLaw,
    PointMassCenter, PowerLawPathLoss, RandomCenterGaussianCluster, Strip, Superposition,
    SystemParams, TabulatedCenter, ThomasClusterConditioned, UniformDiskCenter,
)
from quadrature import (
    ZERO, clamped_arccos, clamped_arcsin, integrate_finite, integrate_semi_infinite,
    integrate_vector,
)
from special_functions import (
    csc_pi, gauss_2f1_unit_a, powerlaw_integral_term, powerlaw_tail, reg_upper_gamma,
    rician_pdf,
)

logger = logging.getLogger(__name__)

PSI_REL_TOL = 1e-10
OUTER_REL_TOL = 1e-8
GAUSSIAN_SPAN = 12.0        # Rician density is negligible beyond |X0| +- 12 nu
THOMAS_SPAN = 10.0          # daughters farther than 10 nu from their parent are ignored
PARTITION_CAP = 64
ZETA_CUTOFF = 1e-12
EXPOSURE_TAIL = 1e-10
STRATEGIES = ("auto", "closed-form", "hypergeometric", "quadrature")


def _check_alpha(alpha: float):
    if not alpha > 2:
        raise DomainError(f"path-loss exponent must exceed 2, got {alpha}")


def _kernel(r, alpha: float, gamma: float):
    """gamma / (r**alpha + gamma) = gamma r^-alpha / (1 + gamma r^-alpha)."""
    with np.errstate(over="ignore"):
        return gamma / (np.power(r, alpha) + gamma)


def validate_model(model: IntensityModel, alpha: float):
    """Reject model / exponent combinations with infinite mean interference."""
    _check_alpha(alpha)
    if isinstance(model, PiecewisePowerLaw):
        model.check_alpha(alpha)
    elif isinstance(model, Superposition):
        for member in model.members:
            validate_model(member, alpha)
    elif isinstance(model, Mixture):
        for _, component in model.components:
            validate_model(component, alpha)


# ---------------------------------------------------------------------------
# Per-model psi
# ---------------------------------------------------------------------------

def _segment_integral(kappa: float, alpha: float, gamma: float, lo: float, hi: float) -> float:
    """integral_lo^hi r**(kappa+1) K(r) dr for one power-law segment."""
    knee = gamma ** (1.0 / alpha)
    if kappa > -2 and kappa < alpha - 2:
        if math.isinf(hi):
            return powerlaw_tail(kappa, alpha, gamma, lo)
        if lo > 0 and lo >= knee * 2.0 ** (1.0 / alpha):
            return powerlaw_tail(kappa, alpha, gamma, lo) - powerlaw_tail(kappa, alpha, gamma, hi)
        return (powerlaw_integral_term(kappa, alpha, gamma, hi)
                - powerlaw_integral_term(kappa, alpha, gamma, lo))
    if kappa > -2:
        # finite segment growing faster than the kernel decays
        return (powerlaw_integral_term(kappa, alpha, gamma, hi)
                - powerlaw_integral_term(kappa, alpha, gamma, lo))
    # kappa <= -2 on a segment away from the origin: no antiderivative in this family
    integrand = lambda r: r ** (kappa + 1.0) * _kernel(r, alpha, gamma)
    if math.isinf(hi):
        far = max(lo, 2.0 * knee)
        head = integrate_finite(integrand, lo, far, rel_tol=PSI_REL_TOL).value
        return head + powerlaw_tail(kappa, alpha, gamma, far)
    return integrate_finite(integrand, lo, hi, rel_tol=PSI_REL_TOL).value


def _piecewise_psi(model: PiecewisePowerLaw, alpha: float, gamma: float) -> float:
    total = 0.0
    for seg in model.segments:
        if seg.rho == 0:
            continue
        total += 2.0 * math.pi * seg.rho * _segment_integral(
            seg.epsilon, alpha, gamma, seg.r_inner, seg.r_outer)
    return total


def _power_law_closed_form_psi(rho: float, epsilon: float, alpha: float, gamma: float) -> float:
    u = (epsilon + 2.0) / alpha
    return (2.0 * math.pi ** 2 * rho / alpha) * csc_pi(u) * gamma ** u


def _gaussian_cluster_psi(center_distance: float, width: float, mean_points: float,
                          alpha: float, gamma: float, rel_tol: float = PSI_REL_TOL) -> float:
    """mean_points * E[K(r)] with r Rician(center_distance, width)."""
    if mean_points == 0 or gamma == 0:
        return 0.0
    lo = max(0.0, center_distance - GAUSSIAN_SPAN * width)
    hi = center_distance + GAUSSIAN_SPAN * width
    integrand = lambda r: float(rician_pdf(r, center_distance, width)) * _kernel(r, alpha, gamma)
    points = [p for p in (center_distance, gamma ** (1.0 / alpha)) if lo < p < hi]
    result = integrate_finite(integrand, lo, hi, rel_tol=rel_tol, points=points)
    return mean_points * result.value


def _lens_integral(center_distance: float, radius: float, alpha: float, gamma: float,
                   lo: float, hi: float, rel_tol: float) -> float:
    """integral_lo^hi 2 r arccos((r^2 + d^2 - R^2) / (2 r d)) K(r) dr."""
    d = center_distance
    if hi <= lo:
        return 0.0

    def integrand(r):
        if r <= 0:
            return 0.0
        c = (r * r + d * d - radius * radius) / (2.0 * r * d)
        return 2.0 * r * float(clamped_arccos(c)) * _kernel(r, alpha, gamma)

    knee = gamma ** (1.0 / alpha)
    points = [knee] if lo < knee < hi else None
    return integrate_finite(integrand, lo, hi, rel_tol=rel_tol, points=points).value


def zeta_disk(center_distance: float, R_d: float, rho_d: float, alpha: float, gamma: float,
              rel_tol: float = PSI_REL_TOL) -> float:
    """
    psi contribution of a uniform disk of density rho_d and radius R_d whose
    centre lies center_distance from the receiver.

    Args:
        center_distance: Distance d from the receiver to the disk centre
        R_d: Disk radius
        rho_d: Point density inside the disk
        alpha: Path-loss exponent
        gamma: Distance-normalised SINR threshold

    Returns:
        rho_d * integral of the circle-arc length inside the disk times K(r)
    """
    if center_distance < 0:
        raise DomainError(f"centre distance must be nonnegative, got {center_distance}")
    if not R_d > 0:
        raise DomainError(f"disk radius must be positive, got {R_d}")
    if gamma == 0 or rho_d == 0:
        return 0.0
    d = center_distance
    if d >= R_d:
        return rho_d * _lens_integral(d, R_d, alpha, gamma, d - R_d, d + R_d, rel_tol)
    inner = 2.0 * math.pi * powerlaw_integral_term(0.0, alpha, gamma, R_d - d)
    if d == 0:
        return rho_d * inner
    return rho_d * (inner + _lens_integral(d, R_d, alpha, gamma, R_d - d, R_d + d, rel_tol))


def _strip_psi(model: Strip, alpha: float, gamma: float, rel_tol: float) -> float:
    a = model.half_width
    inner = 2.0 * math.pi * powerlaw_integral_term(0.0, alpha, gamma, a)
    knee = gamma ** (1.0 / alpha)
    integrand = lambda r: 4.0 * r * float(clamped_arcsin(a / r)) * _kernel(r, alpha, gamma)
    points = [knee] if knee > a else None
    outer = integrate_semi_infinite(integrand, a, rel_tol=rel_tol, scale=max(a, knee), points=points)
    return model.density * (inner + outer.value)


def _hard_core_psi(model: HardCoreApprox, alpha: float, gamma: float, rel_tol: float) -> float:
    rho = model.retained_density
    if rho == 0:
        return 0.0
    R1 = model.guard_radius
    c = model.guard_offset
    if c == 0 or R1 == 0:
        # guard disk around the receiver: homogeneous outside R1
        return 2.0 * math.pi * rho * powerlaw_tail(0.0, alpha, gamma, R1)

    def band(r):
        if r <= 0:
            return 0.0
        cosine = (r * r + c * c - R1 * R1) / (2.0 * r * c)
        arc = 2.0 * math.pi - 2.0 * float(clamped_arccos(cosine))
        return r * arc * _kernel(r, alpha, gamma)

    lo, hi = abs(c - R1), c + R1
    knee = gamma ** (1.0 / alpha)
    points = [knee] if lo < knee < hi else None
    total = integrate_finite(band, lo, hi, rel_tol=rel_tol, points=points).value
    total += 2.0 * math.pi * powerlaw_tail(0.0, alpha, gamma, hi)
    if R1 < c:
        total += 2.0 * math.pi * powerlaw_integral_term(0.0, alpha, gamma, c - R1)
    return rho * total


def matern_origin_cluster_psi(cluster_radius: float, mean_daughters: float, alpha: float,
                              gamma: float) -> float:
    """(mu_d - 1) * 2F1(1, 2/alpha; (2+alpha)/alpha; -R_d**alpha / gamma)."""
    if gamma == 0 or mean_daughters <= 1:
        return 0.0
    b = 2.0 / alpha
    return (mean_daughters - 1.0) * gauss_2f1_unit_a(b, b + 1.0, -(cluster_radius ** alpha) / gamma)


# ---------------------------------------------------------------------------
# Generic quadrature over the angular integral
# ---------------------------------------------------------------------------

def angular_integral(model: IntensityModel, r: float) -> float:
    """
    g(r) = integral_0^{2 pi} lambda(r, theta) dtheta for a deterministic model.

    psi(gamma) = integral_0^inf g(r) r K(r) dr, and g(r) r is the radial
    density of the mean measure.
    """
    if r < 0:
        return 0.0
    if isinstance(model, PiecewisePowerLaw):
        for seg in model.segments:
            if seg.r_inner <= r < seg.r_outer:
                if r == 0:
                    return 2.0 * math.pi * seg.rho if seg.epsilon == 0 else 0.0
                return 2.0 * math.pi * seg.rho * r ** seg.epsilon
        return 0.0
    if isinstance(model, GaussianCluster):
        nu2 = model.width ** 2
        d = model.center_distance
        return model.mean_points / nu2 * math.exp(-(r - d) ** 2 / (2.0 * nu2)) * float(special.i0e(r * d / nu2))
    if isinstance(model, RandomCenterGaussianCluster) and isinstance(model.center, PointMassCenter):
        return angular_integral(model.cluster_at(model.center.distance), r)
    if isinstance(model, DiskCluster):
        d, R = model.center_distance, model.radius
        if r <= R - d:
            return 2.0 * math.pi * model.density
        if r < abs(d - R) or r > d + R or r == 0:
            return 0.0
        c = (r * r + d * d - R * R) / (2.0 * r * d)
        return 2.0 * model.density * float(clamped_arccos(c))
    if isinstance(model, Strip):
        if r <= model.half_width:
            return 2.0 * math.pi * model.density
        return 4.0 * model.density * float(clamped_arcsin(model.half_width / r))
    if isinstance(model, HardCoreApprox):
        rho = model.retained_density
        c, R1 = model.guard_offset, model.guard_radius
        if c == 0:
            return 0.0 if r < R1 else 2.0 * math.pi * rho
        if r <= R1 - c:
            return 0.0
        if r < abs(c - R1) or r >= c + R1:
            return 2.0 * math.pi * rho
        cosine = (r * r + c * c - R1 * R1) / (2.0 * r * c)
        return rho * (2.0 * math.pi - 2.0 * float(clamped_arccos(cosine)))
    if isinstance(model, CustomRadialProfile):
        return float(model(r))
    if isinstance(model, Superposition):
        return sum(angular_integral(m, r) for m in model.members)
    raise DomainError(f"model '{model.TYPE}' has a random intensity; no angular integral")


def support_breaks(model: IntensityModel) -> List[float]:
    """Radii where the angular integral has kinks or support edges."""
    if isinstance(model, PiecewisePowerLaw):
        edges = []
        for seg in model.segments:
            edges.extend([seg.r_inner, seg.r_outer])
        return [e for e in edges if math.isfinite(e)]
    if isinstance(model, GaussianCluster):
        d, nu = model.center_distance, model.width
        return [max(0.0, d - GAUSSIAN_SPAN * nu), d, d + GAUSSIAN_SPAN * nu]
    if isinstance(model, RandomCenterGaussianCluster) and isinstance(model.center, PointMassCenter):
        return support_breaks(model.cluster_at(model.center.distance))
    if isinstance(model, DiskCluster):
        return [abs(model.center_distance - model.radius), model.center_distance + model.radius]
    if isinstance(model, Strip):
        return [model.half_width]
    if isinstance(model, HardCoreApprox):
        c, R1 = model.guard_offset, model.guard_radius
        return [abs(c - R1), c + R1]
    if isinstance(model, CustomRadialProfile):
        return [e for e in (model.r_min, model.r_max) if math.isfinite(e)]
    if isinstance(model, Superposition):
        return sorted({b for m in model.members for b in support_breaks(m)})
    raise DomainError(f"model '{model.TYPE}' has a random intensity; no radial support")


def support_radius(model: IntensityModel) -> float:
    """Largest radius with nonzero intensity (inf for unbounded support)."""
    if isinstance(model, GaussianCluster):
        return model.center_distance + GAUSSIAN_SPAN * model.width
    if isinstance(model, DiskCluster):
        return model.center_distance + model.radius
    if isinstance(model, CustomRadialProfile):
        return model.r_max
    if isinstance(model, PiecewisePowerLaw):
        last = max((s for s in model.segments if s.rho > 0), key=lambda s: s.r_outer, default=None)
        return 0.0 if last is None else last.r_outer
    if isinstance(model, RandomCenterGaussianCluster) and isinstance(model.center, PointMassCenter):
        return support_radius(model.cluster_at(model.center.distance))
    if isinstance(model, Superposition):
        return max(support_radius(m) for m in model.members)
    return math.inf


def _quadrature_psi(model: IntensityModel, alpha: float, gamma: float, rel_tol: float) -> float:
    knee = gamma ** (1.0 / alpha)
    top = support_radius(model)
    bottom = model.r_min if isinstance(model, CustomRadialProfile) else 0.0
    edges = sorted({bottom, knee, *support_breaks(model)})
    edges = [e for e in edges if bottom <= e <= top]
    if math.isfinite(top) and top not in edges:
        edges.append(top)
    integrand = lambda r: angular_integral(model, r) * r * _kernel(r, alpha, gamma)
    total = ZERO
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total = total + integrate_finite(integrand, lo, hi, rel_tol=rel_tol,
                                             singular_endpoint="a" if lo == 0 else None)
    if math.isinf(top):
        start = edges[-1]
        total = total + integrate_semi_infinite(integrand, start, rel_tol=rel_tol,
                                                scale=max(start, knee, 1.0))
    return float(total.value)


# ---------------------------------------------------------------------------
# PsiFunction
# ---------------------------------------------------------------------------

class PsiFunction:
    """
    gamma -> psi(gamma) for a deterministic intensity model.

    Strategies: "closed-form" (single-segment power law over the whole plane),
    "hypergeometric" (per-model formulas built on 2F1 / powerlaw_integral_term
    with one-dimensional quadrature for the geometric terms), "quadrature"
    (generic integration of the angular integral) and "auto", which picks the
    most specific one available.
    """

    def __init__(self, model: IntensityModel, alpha: float, strategy: str = "auto",
                 rel_tol: float = PSI_REL_TOL):
        if strategy not in STRATEGIES:
            raise DomainError(f"unknown psi strategy {strategy!r}; expected one of {STRATEGIES}")
        validate_model(model, alpha)
        if model.is_random:
            raise DomainError(f"model '{model.TYPE}' has a random intensity; psi is defined per realisation")
        self.model = model
        self.alpha = alpha
        self.rel_tol = rel_tol
        closed_form_ok = isinstance(model, PiecewisePowerLaw) and model.is_pure_power_law
        if strategy == "closed-form" and not closed_form_ok:
            raise DomainError("closed-form psi exists only for a power law over the whole plane")
        if strategy == "auto":
            strategy = "closed-form" if closed_form_ok else (
                "quadrature" if isinstance(model, CustomRadialProfile) else "hypergeometric")
        self.strategy = strategy

    def __repr__(self):
        return f"PsiFunction({self.model.TYPE}, alpha={self.alpha}, strategy={self.strategy!r})"

    def __call__(self, gamma: float) -> float:
        if not gamma >= 0:
            raise DomainError(f"gamma must be nonnegative, got {gamma}")
        if gamma == 0:
            return 0.0
        if math.isinf(gamma):
            return math.inf
        if self.strategy == "closed-form":
            seg = self.model.segments[0]
            return _power_law_closed_form_psi(seg.rho, seg.epsilon, self.alpha, gamma)
        if self.strategy == "quadrature":
            return _quadrature_psi(self.model, self.alpha, gamma, self.rel_tol)
        return self._specific(self.model, gamma)

    def _specific(self, model: IntensityModel, gamma: float) -> float:
        alpha = self.alpha
        if isinstance(model, PiecewisePowerLaw):
            return _piecewise_psi(model, alpha, gamma)
        if isinstance(model, GaussianCluster):
            return _gaussian_cluster_psi(model.center_distance, model.width, model.mean_points,
                                         alpha, gamma, self.rel_tol)
        if isinstance(model, RandomCenterGaussianCluster):
            return _gaussian_cluster_psi(model.center.distance, model.width, model.mean_points,
                                         alpha, gamma, self.rel_tol)
        if isinstance(model, DiskCluster):
            return zeta_disk(model.center_distance, model.radius, model.density, alpha, gamma,
                             self.rel_tol)
        if isinstance(model, Strip):
            return _strip_psi(model, alpha, gamma, self.rel_tol)
        if isinstance(model, HardCoreApprox):
            return _hard_core_psi(model, alpha, gamma, self.rel_tol)
        if isinstance(model, CustomRadialProfile):
            return _quadrature_psi(model, alpha, gamma, self.rel_tol)
        if isinstance(model, Superposition):
            return sum(self._specific(m, gamma) for m in model.members)
        raise DomainError(f"no psi formula for model '{model.TYPE}'")

    def derivative(self, gamma: float) -> float:
        """d psi / d gamma: exact for the pure power law, central difference otherwise."""
        if not gamma > 0:
            raise DomainError(f"derivative needs gamma > 0, got {gamma}")
        model = self.model
        if isinstance(model, PiecewisePowerLaw) and model.is_pure_power_law:
            seg = model.segments[0]
            u = (seg.epsilon + 2.0) / self.alpha
            return _power_law_closed_form_psi(seg.rho, seg.epsilon, self.alpha, gamma) * u / gamma
        h = max(1e-6 * gamma, 1e-9)
        return (self(gamma + h) - self(max(gamma - h, 0.0))) / (gamma + h - max(gamma - h, 0.0))

    def nominal(self, beta: float) -> Callable[[float], float]:
        """psi_c(gamma) = psi(gamma) / beta for a model scaled as beta * lambda_c."""
        if not beta > 0:
            raise DomainError(f"nominal density must be positive, got {beta}")
        return lambda gamma: self(gamma) / beta


def psi(model: IntensityModel, alpha: float, gamma: float, strategy: str = "auto",
        rel_tol: float = PSI_REL_TOL) -> float:
    """Interference functional of a deterministic model at one gamma."""
    return PsiFunction(model, alpha, strategy, rel_tol)(gamma)


def psi_direct_pathloss(pathloss: PathLoss, base_density: float, gamma: float,
                        rel_tol: float = PSI_REL_TOL) -> float:
    """
    psi of a homogeneous PPP of density base_density under path loss phi:
    2 pi rho integral r phi(r) gamma / (1 + phi(r) gamma) dr.
    """
    if gamma == 0 or base_density == 0:
        return 0.0

    def integrand(r):
        loss = float(pathloss(r))
        if math.isinf(loss):
            return r
        return r * loss * gamma / (1.0 + loss * gamma)

    target = 1.0 / gamma
    if pathloss.value_at_infinity < target < pathloss.value_at_zero:
        knee = pathloss.inverse(target)
    else:
        knee = 1.0
    knee = max(knee, 1e-9)
    head = integrate_finite(integrand, 0.0, knee, rel_tol=rel_tol)
    tail = integrate_semi_infinite(integrand, knee, rel_tol=rel_tol, scale=knee)
    return 2.0 * math.pi * base_density * (head.value + tail.value)


# ---------------------------------------------------------------------------
# CDFs
# ---------------------------------------------------------------------------

def cdf_nonhomog(params: SystemParams, psi_value: float, gamma: float) -> float:
    """Outage CDF 1 - Q(L, psi(gamma) + sigma2 * gamma) for a deterministic intensity."""
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return 0.0
    return 1.0 - reg_upper_gamma(params.L, psi_value + params.sigma2 * gamma)


def pdf_nonhomog(params: SystemParams, model: IntensityModel, gamma: float,
                 psi_function: Optional[PsiFunction] = None) -> float:
    """
    Density of gamma for a deterministic intensity:
    x**(L-1) e**(-x) / (L-1)! * (sigma2 + psi'(gamma)) with x = psi + sigma2 * gamma.
    """
    if not gamma > 0:
        raise DomainError(f"pdf needs gamma > 0, got {gamma}")
    fn = psi_function or PsiFunction(model, params.alpha)
    x = fn(gamma) + params.sigma2 * gamma
    return float(stats.poisson.pmf(params.L - 1, x)) * (params.sigma2 + fn.derivative(gamma))


def cdf_power_law_closed_form(params: SystemParams, rho: float, epsilon: float, gamma: float) -> float:
    """
    Closed-form CDF for lambda(r) = rho * r**epsilon, -2 < epsilon <= 0.

    1 - sum_{k<L} x**k e**-x / k! with
    x = (2 pi^2 rho / alpha) csc(pi (epsilon+2)/alpha) gamma**((epsilon+2)/alpha) + sigma2 gamma.
    """
    if not -2 < epsilon <= 0:
        raise DomainError(f"closed form needs -2 < epsilon <= 0, got {epsilon}")
    if rho < 0:
        raise DomainError(f"density must be nonnegative, got {rho}")
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return 0.0
    x = _power_law_closed_form_psi(rho, epsilon, params.alpha, gamma) + params.sigma2 * gamma
    return 1.0 - reg_upper_gamma(params.L, x)


def normalized_sir_cdf(L: int, rho: float, epsilon: float, alpha: float, xi: float) -> float:
    """
    CDF of the normalised SIR xi = L**(-alpha/(2+epsilon)) * gamma for the power law
    (sigma2 = 0): 1 - Q(L, q L) with q = (2 pi^2 rho/alpha) csc(.) xi**((epsilon+2)/alpha).
    """
    if not -2 < epsilon < alpha - 2:
        raise DomainError(f"power law needs -2 < epsilon < alpha-2, got {epsilon}")
    if xi <= 0:
        return 0.0
    q = _power_law_closed_form_psi(rho, epsilon, alpha, xi)
    return 1.0 - reg_upper_gamma(L, q * L)


def normalized_sir_limit(rho: float, epsilon: float, alpha: float) -> float:
    """Step location of the normalised SIR as L grows: [(2 pi^2 rho/alpha) csc(.)]**(-alpha/(epsilon+2))."""
    if not rho > 0:
        raise DomainError(f"density must be positive, got {rho}")
    u = (epsilon + 2.0) / alpha
    return ((2.0 * math.pi ** 2 * rho / alpha) * csc_pi(u)) ** (-1.0 / u)


def cdf_single_random_cluster(params: SystemParams, model: RandomCenterGaussianCluster,
                              gamma: float, extra_psi: float = 0.0,
                              rel_tol: float = OUTER_REL_TOL) -> float:
    """
    CDF for one Gaussian cluster whose centre distance tau = |X0| is random:
    1 - E_tau[Q(L, psi(gamma; tau) + extra_psi + sigma2 gamma)].

    Args:
        params: System parameters
        model: Cluster with its centre distribution
        gamma: Distance-normalised threshold
        extra_psi: psi of independent deterministic interferers superposed on the cluster
        rel_tol: Tolerance of the outer expectation

    Returns:
        Probability in [0, 1]
    """
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return 0.0
    alpha, L = params.alpha, params.L
    _check_alpha(alpha)
    base = extra_psi + params.sigma2 * gamma

    def survival(tau: float) -> float:
        cluster = _gaussian_cluster_psi(tau, model.width, model.mean_points, alpha, gamma)
        return reg_upper_gamma(L, cluster + base)

    center = model.center
    if isinstance(center, PointMassCenter):
        return 1.0 - survival(center.distance)
    if isinstance(center, UniformDiskCenter):
        weight = center.density
        lo, hi = center.support
        points = None
    elif isinstance(center, TabulatedCenter):
        weight = center.density
        lo, hi = center.support
        points = list(center.taus[1:-1])[:200]
        mass = float(trapezoid(center.weights, center.taus))
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(f"centre density integrates to {mass:.8g}, not 1")
    else:
        raise DomainError(f"unsupported centre distribution {type(center).__name__}")

    expectation = integrate_finite(lambda tau: weight(tau) * survival(tau), lo, hi,
                                   rel_tol=rel_tol, points=points)
    return float(min(1.0, max(0.0, 1.0 - expectation.value)))


# ---------------------------------------------------------------------------
# Neyman-Scott cluster processes
# ---------------------------------------------------------------------------

class PartitionMultiset(tuple):
    """
    Multiplicities (m_1, ..., m_ell) with sum_j j * m_j = ell.

    Behaves as a plain tuple; `weight` gives prod_j J_j**m_j / (m_j! (j!)**m_j).
    """

    @property
    def ell(self) -> int:
        return sum((j + 1) * m for j, m in enumerate(self))

    def weight(self, zeta_moments: Sequence[float]) -> float:
        value = 1.0
        for j, m in enumerate(self, start=1):
            if m:
                value *= zeta_moments[j - 1] ** m / (math.factorial(m) * math.factorial(j) ** m)
        return value


@lru_cache(maxsize=PARTITION_CAP + 1)
def _partitions_cached(ell: int) -> Tuple[PartitionMultiset, ...]:
    if ell == 0:
        return (PartitionMultiset(()),)
    found = []
    for parts in sympy_partitions(ell):
        # sympy reuses the dict between iterations
        multiplicities = [0] * ell
        for size, count in parts.items():
            multiplicities[size - 1] = count
        found.append(PartitionMultiset(multiplicities))
    return tuple(found)


def enumerate_partitions(ell: int) -> List[PartitionMultiset]:
    """All (m_1, ..., m_ell) of nonnegative integers with sum_j j*m_j = ell."""
    if int(ell) != ell or ell < 0:
        raise DomainError(f"ell must be a nonnegative integer, got {ell}")
    if ell > PARTITION_CAP:
        raise DomainError(f"ell={ell} exceeds the partition cap {PARTITION_CAP}")
    return list(_partitions_cached(int(ell)))


def partition_weight_sum(ell: int, zeta_moments: Sequence[float]) -> float:
    """sum over M_ell of prod_j J_j**m_j / (m_j! (j!)**m_j)."""
    if len(zeta_moments) < ell:
        raise DomainError(f"need {ell} zeta moments, got {len(zeta_moments)}")
    return math.fsum(p.weight(zeta_moments) for p in enumerate_partitions(ell))


def neyman_scott_expectation(ell: int, zeta_moments: Sequence[float], exposure: float) -> float:
    """
    E[Xi**ell * exp(-Xi)] for Xi = sum over parent points of zeta(parent).

    Args:
        ell: Moment order
        zeta_moments: J_1..J_ell with J_j = integral zeta**j e**-zeta lambda*
        exposure: E = integral (e**-zeta - 1) lambda* (nonpositive)

    Returns:
        ell! * e**E * sum over M_ell of prod_j J_j**m_j / (m_j! (j!)**m_j)
    """
    if exposure > 0:
        raise DomainError(f"exposure integral must be nonpositive, got {exposure}")
    if any(j < 0 for j in zeta_moments[:ell]):
        raise DomainError("zeta moments must be nonnegative")
    return math.factorial(ell) * math.exp(exposure) * partition_weight_sum(ell, zeta_moments)


NeymanScottModel = Union[MaternClusterConditioned, ThomasClusterConditioned]


def _zeta_function(model: NeymanScottModel, alpha: float, gamma: float) -> Callable[[float], float]:
    if isinstance(model, MaternClusterConditioned):
        return lambda r: zeta_disk(r, model.cluster_radius, model.daughter_density, alpha, gamma)
    return lambda r: _gaussian_cluster_psi(r, model.width, model.mean_daughters, alpha, gamma)


def _cluster_spread(model: NeymanScottModel) -> float:
    if isinstance(model, MaternClusterConditioned):
        return model.cluster_radius
    return THOMAS_SPAN * model.width


def neyman_scott_cutoff(model: NeymanScottModel, alpha: float, gamma: float) -> float:
    """
    Parent distance beyond which zeta < 1e-12 and the neglected exposure
    integral is below 1e-10, from zeta(r) <= mu_d gamma (r - spread)**-alpha.
    """
    spread = _cluster_spread(model)
    mu = model.mean_daughters
    rho_p = model.parent_density
    r = 2.0 * spread + gamma ** (1.0 / alpha)
    while r < 1e15:
        s = r - spread
        zeta_bound = mu * gamma * s ** -alpha
        tail = 2.0 * math.pi * rho_p * mu * gamma * (
            s ** (2.0 - alpha) / (alpha - 2.0) + spread * s ** (1.0 - alpha) / (alpha - 1.0))
        if zeta_bound < ZETA_CUTOFF and tail < EXPOSURE_TAIL:
            return r
        r *= 2.0
    raise NumericError(f"no truncation radius found for gamma={gamma}")


def neyman_scott_moments(model: NeymanScottModel, alpha: float, gamma: float, order: int,
                         rel_tol: float = OUTER_REL_TOL) -> Tuple[float, List[float]]:
    """
    Exposure E = 2 pi rho_p integral (e**-zeta - 1) r dr and moments
    J_j = 2 pi rho_p integral zeta**j e**-zeta r dr for j = 1..order.
    """
    rho_p = model.parent_density
    if rho_p == 0 or gamma == 0:
        return 0.0, [0.0] * order
    zeta = _zeta_function(model, alpha, gamma)
    spread = _cluster_spread(model)
    r_max = neyman_scott_cutoff(model, alpha, gamma)
    powers = np.arange(1, order + 1)

    def integrand(r):
        z = zeta(r)
        weight = 2.0 * math.pi * rho_p * r
        return weight * np.concatenate(([math.expm1(-z)], z ** powers * math.exp(-z)))

    points = [spread, 2.0 * spread]
    edge = 4.0 * spread
    while edge < r_max:
        points.append(edge)
        edge *= 2.0
    knee = gamma ** (1.0 / alpha)
    points.append(knee + spread)
    result = integrate_vector(integrand, 0.0, r_max, rel_tol=rel_tol, points=points)
    values = np.asarray(result.value, dtype=float)
    logger.debug("[CDF] Neyman-Scott moments at gamma=%g: r_max=%.4g, %d evaluations",
                 gamma, r_max, result.evaluations)
    return float(min(values[0], 0.0)), [max(float(v), 0.0) for v in values[1:]]


def cdf_neyman_scott(params: SystemParams, model: NeymanScottModel, gamma: float,
                     extra_psi: float = 0.0, rel_tol: float = OUTER_REL_TOL) -> float:
    """
    CDF for a Neyman-Scott process conditioned on a cluster at the origin.

    The origin cluster (mean mu_d - 1 interferers) acts as a deterministic
    intensity psi_p; the other clusters contribute Xi = sum zeta(parent), so
    F = 1 - e**E * sum_{ell<L} B_ell * Q(L - ell, a), a = psi_p + extra + sigma2 gamma,
    where B_ell is the partition sum and ell! e**E B_ell = E[Xi**ell e**-Xi].
    """
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    L, alpha = params.L, params.alpha
    _check_alpha(alpha)
    if L - 1 > PARTITION_CAP:
        raise DomainError(f"L={L} exceeds the partition cap ({PARTITION_CAP + 1} antennas)")
    if gamma == 0:
        return 0.0
    if isinstance(model, MaternClusterConditioned):
        psi_p = matern_origin_cluster_psi(model.cluster_radius, model.mean_daughters, alpha, gamma)
    else:
        psi_p = _gaussian_cluster_psi(0.0, model.width, model.mean_daughters - 1.0, alpha, gamma)
    a = psi_p + extra_psi + params.sigma2 * gamma
    exposure, moments = neyman_scott_moments(model, alpha, gamma, L - 1, rel_tol)
    survival = math.fsum(partition_weight_sum(ell, moments) * reg_upper_gamma(L - ell, a)
                         for ell in range(L))
    return float(min(1.0, max(0.0, 1.0 - math.exp(exposure) * survival)))


# ---------------------------------------------------------------------------
# Dispatch over models and curves
# ---------------------------------------------------------------------------

def sinr_cdf(params: SystemParams, model: IntensityModel, gamma: float,
             extra_psi: float = 0.0) -> float:
    """
    Outage probability Pr(gamma_out <= gamma) for any supported model.

    Superpositions hold deterministic members plus at most one random member;
    the deterministic psi is carried into the random member's CDF.
    """
    validate_model(model, params.alpha)
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return 0.0
    if isinstance(model, Mixture):
        return math.fsum(w * sinr_cdf(params, m, gamma, extra_psi) for w, m in model.components)
    if isinstance(model, Superposition) and model.is_random:
        fixed = [m for m in model.members if not m.is_random]
        random_member = next(m for m in model.members if m.is_random)
        fixed_psi = sum(PsiFunction(m, params.alpha)(gamma) for m in fixed)
        return sinr_cdf(params, random_member, gamma, extra_psi + fixed_psi)
    if isinstance(model, RandomCenterGaussianCluster) and model.is_random:
        return cdf_single_random_cluster(params, model, gamma, extra_psi)
    if isinstance(model, (MaternClusterConditioned, ThomasClusterConditioned)):
        return cdf_neyman_scott(params, model, gamma, extra_psi)
    if (extra_psi == 0 and isinstance(model, PiecewisePowerLaw) and model.is_pure_power_law
            and -2 < model.segments[0].epsilon <= 0):
        seg = model.segments[0]
        return cdf_power_law_closed_form(params, seg.rho, seg.epsilon, gamma)
    return cdf_nonhomog(params, PsiFunction(model, params.alpha)(gamma) + extra_psi, gamma)


@dataclass(frozen=True)
class SinrCdfCurve:
    """Analytic CDF of the distance-normalised SINR on a sorted gamma grid."""
    gamma_grid: Tuple[float, ...]
    cdf_values: Tuple[float, ...]
    params: SystemParams
    model: IntensityModel

    @property
    def sinr_grid(self) -> np.ndarray:
        return np.asarray(self.gamma_grid) * self.params.r_T ** -self.params.alpha

    def at_sinr(self, sinr):
        """Interpolated CDF at SINR values (log-linear in SINR, clamped to the grid ends)."""
        grid = np.log(self.sinr_grid)
        x = np.log(np.maximum(np.asarray(sinr, dtype=float), 1e-300))
        return np.interp(x, grid, np.asarray(self.cdf_values))


def analytic_curve(params: SystemParams, model: IntensityModel,
                   gamma_grid: Sequence[float]) -> SinrCdfCurve:
    """Evaluate the outage CDF on a gamma grid."""
    grid = np.asarray(gamma_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("gamma grid is empty")
    if np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise DomainError("gamma grid must be increasing and nonnegative")
    values = np.array([sinr_cdf(params, model, float(g)) for g in grid])
    values = np.clip(values, 0.0, 1.0)
    monotone = np.maximum.accumulate(values)
    if np.max(monotone - values) > 1e-8:
        logger.warning("[CDF] curve not monotone by %.3g; quadrature noise clipped",
                       float(np.max(monotone - values)))
    return SinrCdfCurve(tuple(grid.tolist()), tuple(monotone.tolist()), params, model)


# ---------------------------------------------------------------------------
# Scaling limit
# ---------------------------------------------------------------------------

def _scaling_limit_gamma(model: IntensityModel, ell_ratio: float, alpha: float, beta: float) -> float:
    if not ell_ratio > 0:
        raise DomainError(f"ell must be positive, got {ell_ratio}")
    nominal = PsiFunction(model, alpha).nominal(beta)
    target = 1.0 / ell_ratio
    lo, hi = 1e-12, 1e12
    f_lo, f_hi = nominal(lo) - target, nominal(hi) - target
    if f_lo > 0 or f_hi < 0:
        raise NumericError(f"psi_c(gamma) = {target:g} is not bracketed in [{lo:g}, {hi:g}]")
    return brentq(lambda g: nominal(g) - target, lo, hi, xtol=1e-300, rtol=1e-12, maxiter=500)


def scaling_limit_sir(model: IntensityModel, ell_ratio: float, alpha: float, r_T: float,
                      beta: float = 1.0) -> float:
    """
    SIR limit psi_c^{-1}(1/ell) * r_T**-alpha when L grows with beta = ell * L.

    Args:
        model: Deterministic intensity beta * lambda_c
        ell_ratio: Density-to-antenna ratio ell
        alpha: Path-loss exponent
        r_T: Link distance
        beta: Nominal density the model was scaled by (psi_c = psi / beta)
    """
    return _scaling_limit_gamma(model, ell_ratio, alpha, beta) * r_T ** -alpha


def scaling_limit_cdf(model: IntensityModel, ell_ratio: float, alpha: float, gamma: float,
                      beta: float = 1.0) -> float:
    """Limiting CDF of gamma: a step per realisation, averaged over a finite mixture."""
    if isinstance(model, Mixture):
        return math.fsum(w * scaling_limit_cdf(m, ell_ratio, alpha, gamma, beta)
                         for w, m in model.components)
    return 1.0 if gamma > _scaling_limit_gamma(model, ell_ratio, alpha, beta) else 0.0


# ---------------------------------------------------------------------------
# Path-loss equivalence
# ---------------------------------------------------------------------------

def equivalent_intensity(pathloss: PathLoss, base_intensity: Union[float, Callable[[float], float]],
                         alpha: float) -> CustomRadialProfile:
    """
    Isotropic intensity lambda_S under r**-alpha path loss that reproduces the
    interference of lambda_G under path loss phi.

    With u = phi(r)**(-1/alpha):
    lambda_S(u) = lambda_G(r) * r * (phi^-1)'(u**-alpha) * (-alpha) * u**(-alpha-2),
    r = phi^-1(u**-alpha), supported on [phi(0)**(-1/alpha), phi(inf)**(-1/alpha)].
    """
    _check_alpha(alpha)
    pathloss.check_monotone()
    if callable(base_intensity):
        base = base_intensity
        density = None
    else:
        if base_intensity < 0:
            raise DomainError(f"base density must be nonnegative, got {base_intensity}")
        density = float(base_intensity)
        base = lambda r: density

    phi0 = pathloss.value_at_zero
    phi_inf = pathloss.value_at_infinity
    u_min = 0.0 if math.isinf(phi0) else phi0 ** (-1.0 / alpha)
    u_max = math.inf if phi_inf == 0 else phi_inf ** (-1.0 / alpha)

    if isinstance(pathloss, ExponentialPathLoss) and density is not None:
        nu2 = pathloss.nu ** 2

        def lam(u):
            return density * alpha ** 2 * math.log(u) / (nu2 * u * u) if u > 1.0 else 0.0
    elif isinstance(pathloss, PowerLawPathLoss):
        ratio = alpha / pathloss.alpha

        def lam(u):
            if u <= 0:
                return 0.0
            return base(u ** ratio) * ratio * u ** (2.0 * ratio - 2.0)
    else:
        def lam(u):
            if not u_min < u < u_max:
                return 0.0
            y = u ** -alpha
            r = pathloss.inverse(y)
            return base(r) * r * pathloss.inverse_derivative(y) * (-alpha) * u ** (-alpha - 2.0)

    label = f"equivalent to {pathloss.TYPE} path loss"
    return CustomRadialProfile(lambda u: 2.0 * math.pi * lam(u), u_min, u_max, label)


# ---------------------------------------------------------------------------
# Guard-zone design
# ---------------------------------------------------------------------------

def spectral_efficiency_cdf(params: SystemParams, hc: HardCoreApprox, eta: float) -> float:
    """
    Pr(rho(R1) log2(1 + SINR) <= eta) = F_SINR(2**(eta / rho(R1)) - 1)
    under the receiver-centred guard-zone approximation.
    """
    if hc.guard_center != "receiver":
        raise DomainError("spectral efficiency density uses a receiver-centred guard zone")
    if not hc.guard_radius > 0:
        raise DomainError("guard radius must be positive")
    if not eta >= 0:
        raise DomainError(f"eta must be nonnegative, got {eta}")
    if eta == 0:
        return 0.0
    rho = hc.retained_density
    if rho == 0:
        return 1.0
    exponent = eta / rho
    if exponent > 1000:
        return 1.0
    sinr = math.expm1(exponent * math.log(2.0))
    gamma = sinr * params.r_T ** params.alpha
    if math.isinf(gamma):
        return 1.0
    return cdf_nonhomog(params, PsiFunction(hc, params.alpha)(gamma), gamma)


class GuardZoneOptimum(NamedTuple):
    r1_opt: float
    eta: float
    grid_r1: Tuple[float, ...]
    grid_eta: Tuple[float, ...]
    near_flat: bool


def eta_at_outage(params: SystemParams, parent_density: float, guard_radius: float,
                  outage_target: float) -> float:
    """Largest eta with spectral_efficiency_cdf(eta) <= outage_target for guard radius R1."""
    hc = HardCoreApprox(parent_density, guard_radius, "receiver", params.r_T)
    rho = hc.retained_density
    if rho == 0:
        return 0.0
    objective = lambda eta: spectral_efficiency_cdf(params, hc, eta) - outage_target
    hi = rho
    for _ in range(200):
        if objective(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NumericError(f"outage target {outage_target} never reached for R1={guard_radius}")
    lo = 0.0
    return brentq(objective, lo, hi, xtol=1e-14 * max(hi, 1e-300), rtol=1e-12, maxiter=500)


def optimize_guard_zone(params: SystemParams, parent_density: float, outage_target: float,
                        r1_max: Optional[float] = None, r1_points: int = 50) -> GuardZoneOptimum:
    """
    Guard radius maximising the spectral efficiency density at a fixed outage.

    Scans R1 on a grid, inverting the outage CDF in eta at each point, then
    refines the best grid point with a golden-section search.
    """
    if not 0 < outage_target < 1:
        raise DomainError(f"outage target must lie in (0, 1), got {outage_target}")
    if parent_density < 0:
        raise DomainError("parent density must be nonnegative")
    if r1_points < 3:
        raise DomainError("guard-zone grid needs at least 3 points")
    if r1_max is None:
        r1_max = 2.0 * params.r_T
        if parent_density > 0:
            r1_max = max(r1_max, 3.0 / math.sqrt(math.pi * parent_density))
    grid = np.linspace(r1_max / r1_points, r1_max, r1_points)
    etas = np.array([eta_at_outage(params, parent_density, float(r1), outage_target) for r1 in grid])
    best = int(np.argmax(etas))
    spread = float(np.max(etas) - np.min(etas))
    near_flat = spread <= 1e-9 * max(float(np.max(etas)), 1e-300) or float(np.max(etas)) < 1e-300
    if near_flat:
        logger.warning("[GUARD] objective is flat over R1 in (0, %g]; optimum is not meaningful", r1_max)

    r1_opt, eta_opt = float(grid[best]), float(etas[best])
    if not near_flat and 0 < best < len(grid) - 1:
        negative = lambda r1: -eta_at_outage(params, parent_density, float(r1), outage_target)
        try:
            refined = minimize_scalar(negative, bracket=(grid[best - 1], grid[best], grid[best + 1]),
                                      method="golden", tol=1e-6)
            if refined.success and -refined.fun >= eta_opt and grid[best - 1] <= refined.x <= grid[best + 1]:
                r1_opt, eta_opt = float(refined.x), float(-refined.fun)
        except ValueError as e:
            logger.debug("[GUARD] golden-section refinement skipped: %s", e)
    logger.info("[GUARD] R1_opt=%.6g eta=%.6g (target %.3g)", r1_opt, eta_opt, outage_target)
    return GuardZoneOptimum(r1_opt, eta_opt, tuple(grid.tolist()), tuple(etas.tolist()), near_flat)
