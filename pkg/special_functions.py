"""
Scalar special functions used by the outage formulas.

Everything here is a pure function of its arguments. The regularized gamma
and Bessel functions are thin, validated wrappers around scipy.special; the
hypergeometric family 2F1(1, b; b+1; z <= 0) and the power-law integral are
evaluated by series chosen for the size of |z|.
"""

import math

import numpy as np
from scipy import special

from errors import DomainError, NumericError


SERIES_REL_TOL = 1e-15
SERIES_MAX_TERMS = 10_000
SIN_POLE_GUARD = 1e-12

# |z| thresholds for the three 2F1 evaluation regimes
DIRECT_SERIES_LIMIT = 0.9
INVERSE_SERIES_START = 2.0
# 1 - b below which the two pole terms of the large-|z| form are combined
NEAR_ONE = 1e-2


def reg_upper_gamma(L: int, x: float) -> float:
    """
    Upper regularized gamma function Q(L, x) = exp(-x) * sum_{k<L} x**k / k!.

    Args:
        L: Positive integer order
        x: Nonnegative argument (may be +inf)

    Returns:
        Q(L, x) in [0, 1]
    """
    if int(L) != L or L < 1:
        raise DomainError(f"Q(L, x) needs a positive integer L, got {L}")
    if not x >= 0:
        raise DomainError(f"Q(L, x) needs x >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    return float(special.gammaincc(L, x))


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero."""
    if not x >= 0:
        raise DomainError(f"I0 needs x >= 0, got {x}")
    return float(special.i0(x))


def bessel_i0_scaled(x: float) -> float:
    """exp(-x) * I0(x); finite for arbitrarily large x."""
    if not x >= 0:
        raise DomainError(f"I0 needs x >= 0, got {x}")
    return float(special.i0e(x))


def csc_pi(u: float) -> float:
    """1 / sin(pi*u), rejecting arguments at (or numerically at) a pole."""
    s = math.sin(math.pi * u)
    if abs(s) < SIN_POLE_GUARD:
        raise DomainError(f"csc(pi*u) is singular at u={u}")
    return 1.0 / s


def _accumulate(terms, label: str) -> float:
    """Sum a generator of series terms until a term is negligible."""
    total = 0.0
    for n, term in enumerate(terms):
        total += term
        if abs(term) <= SERIES_REL_TOL * abs(total):
            return total
        if n + 1 >= SERIES_MAX_TERMS:
            break
    raise NumericError(f"{label} did not converge in {SERIES_MAX_TERMS} terms", best_estimate=total)


def _direct_series(b: float, x: float) -> float:
    # sum_n b/(b+n) * (-x)**n
    def terms():
        power = 1.0
        n = 0
        while True:
            yield b * power / (b + n)
            n += 1
            power *= -x
    return _accumulate(terms(), "2F1 power series")


def _pfaff_series(b: float, x: float) -> float:
    # 2F1(1,b;b+1;-x) = (1+x)**-1 * 2F1(1,1;b+1; x/(1+x))
    w = x / (1.0 + x)

    def terms():
        term = 1.0
        n = 0
        while True:
            yield term
            term *= (n + 1) * w / (b + 1 + n)
            n += 1
    return _accumulate(terms(), "2F1 Pfaff series") / (1.0 + x)


def _unit_integral_large_x(b: float, x: float) -> float:
    """
    I(b) = integral_0^1 t**(b-1) / (1 + x t) dt for 0 < b <= 1 and x >= 2.

    Written as the integral over (0, inf) minus the inverse-power series of
    the integral over (1, inf).
    """
    delta = 1.0 - b
    log_x = math.log(x)
    if delta < NEAR_ONE:
        # pi*x**-b/sin(pi*b) - 1/(x*delta), combined without cancellation
        if delta == 0.0:
            head = log_x / x
        else:
            pd2 = (math.pi * delta) ** 2
            log_sinc = pd2 / 6.0 + pd2 ** 2 / 180.0 + pd2 ** 3 / 2835.0
            head = math.expm1(delta * log_x + log_sinc) / (delta * x)
        start = 1
    else:
        head = math.pi * math.exp(-b * log_x) / math.sin(math.pi * b)
        start = 0

    def terms():
        n = start
        inv_power = x ** -(n + 1)
        while True:
            yield -((-1) ** n) * inv_power / (n + 1 - b)
            n += 1
            inv_power /= x
    return head + _accumulate(terms(), "2F1 inverse-power series")


def gauss_2f1_unit_a(b: float, c: float, z: float) -> float:
    """
    Gauss hypergeometric function 2F1(1, b; b+1; z) for z <= 0.

    Args:
        b: Second parameter, b > 0
        c: Third parameter; must equal b + 1
        z: Nonpositive argument

    Returns:
        The function value, in (0, 1]
    """
    if not b > 0:
        raise DomainError(f"2F1(1,b;b+1;z) needs b > 0, got {b}")
    if abs(c - (b + 1.0)) > 1e-12 * max(1.0, abs(c)):
        raise DomainError(f"only c = b + 1 is supported, got b={b}, c={c}")
    if z > 0:
        raise DomainError(f"2F1(1,b;b+1;z) is implemented for z <= 0, got z={z}")
    x = -z
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x <= DIRECT_SERIES_LIMIT:
        return _direct_series(b, x)
    if x < INVERSE_SERIES_START:
        return _pfaff_series(b, x)

    # bring b into (0, 1], then step back up with I(b+1) = (1/b - I(b)) / x
    steps = max(0, math.ceil(b) - 1)
    base = b - steps
    unit = _unit_integral_large_x(base, x)
    for k in range(steps):
        unit = (1.0 / (base + k) - unit) / x
    return b * unit


def powerlaw_integral_term(kappa: float, alpha: float, gamma: float, r_limit: float) -> float:
    """
    Value of integral_0^R r**(kappa+1) * gamma / (r**alpha + gamma) dr.

    Args:
        kappa: Power-law exponent of the intensity
        alpha: Path-loss exponent (> 2)
        gamma: Distance-normalised SINR threshold (>= 0)
        r_limit: Upper limit R, 0 <= R <= inf

    Returns:
        0 at R = 0, R**(kappa+2)/(kappa+2) * 2F1(1, u; u+1; -R**alpha/gamma)
        for finite R and (pi/alpha) * gamma**u * csc(pi*u) at R = inf,
        where u = (kappa+2)/alpha.
    """
    if not alpha > 2:
        raise DomainError(f"path-loss exponent must exceed 2, got {alpha}")
    if not gamma >= 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if not r_limit >= 0:
        raise DomainError(f"upper limit must be nonnegative, got {r_limit}")
    if r_limit == 0:
        return 0.0
    if not kappa > -2:
        raise DomainError(f"integral diverges at the origin for kappa={kappa}")
    u = (kappa + 2.0) / alpha
    if math.isinf(r_limit):
        if not kappa < alpha - 2:
            raise DomainError(f"integral diverges at infinity: kappa={kappa} >= alpha-2={alpha - 2}")
        cosec = csc_pi(u)
        if gamma == 0:
            return 0.0
        return (math.pi / alpha) * gamma ** u * cosec
    if gamma == 0:
        return 0.0
    try:
        x = math.exp(alpha * math.log(r_limit) - math.log(gamma))
    except OverflowError:
        raise NumericError(f"R**alpha/gamma overflows for R={r_limit}, gamma={gamma}")
    return r_limit ** (kappa + 2.0) / (kappa + 2.0) * gauss_2f1_unit_a(u, u + 1.0, -x)


def powerlaw_tail(kappa: float, alpha: float, gamma: float, r_lower: float) -> float:
    """
    integral_R^inf r**(kappa+1) * gamma / (r**alpha + gamma) dr for kappa < alpha - 2.

    Far from the origin the integrand is expanded in powers of gamma / r**alpha,
    which avoids subtracting two nearly equal antiderivative values.
    """
    if not kappa < alpha - 2:
        raise DomainError(f"tail integral diverges: kappa={kappa} >= alpha-2={alpha - 2}")
    if gamma == 0:
        return 0.0
    if r_lower == 0:
        return powerlaw_integral_term(kappa, alpha, gamma, math.inf)
    if math.isinf(r_lower):
        return 0.0
    ratio = gamma * r_lower ** -alpha
    if ratio > 1.0 / INVERSE_SERIES_START:
        return (powerlaw_integral_term(kappa, alpha, gamma, math.inf)
                - powerlaw_integral_term(kappa, alpha, gamma, r_lower))
    lead = r_lower ** (kappa + 2.0)

    def terms():
        n = 0
        power = ratio
        while True:
            yield ((-1) ** n) * lead * power / (alpha * (n + 1) - kappa - 2.0)
            n += 1
            power *= ratio
    return _accumulate(terms(), "power-law tail series")


def rician_pdf(r, center_distance: float, width: float):
    """
    Density of the distance from the origin to a 2-D Gaussian point.

    The point has mean at distance `center_distance` and per-coordinate
    standard deviation `width`. Uses the exponentially scaled Bessel function
    so the density stays finite when r * center_distance / width**2 is large.
    """
    if not width > 0:
        raise DomainError(f"Rician width must be positive, got {width}")
    r = np.asarray(r, dtype=float)
    nu2 = width * width
    return (r / nu2) * np.exp(-(r - center_distance) ** 2 / (2.0 * nu2)) \
        * special.i0e(r * center_distance / nu2)
