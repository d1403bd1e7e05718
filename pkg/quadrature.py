"""
One-dimensional adaptive integration.

Wraps scipy.integrate.quad (QUADPACK, Gauss-Kronrod 21/10 pairs) and
quad_vec with the error contract the analytic engine relies on: the
returned error estimate must be within rel_tol * |value| + ABS_FLOOR,
otherwise a NumericError carrying the best estimate is raised.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from errors import DomainError, NumericError

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-9
ABS_FLOOR = 1e-14
DEFAULT_LIMIT = 500
# accepted excess over the tolerance when QUADPACK reports roundoff (ier=2)
ROUNDOFF_SLACK = 1e3
GEOMETRIC_RATIO = 0.5
GEOMETRIC_PIECES = 40


@dataclass(frozen=True)
class IntegrationResult:
    """Integral estimate with its error estimate and integrand evaluation count."""
    value: Union[float, np.ndarray]
    abs_error_estimate: float
    evaluations: int

    def __add__(self, other: "IntegrationResult") -> "IntegrationResult":
        return IntegrationResult(self.value + other.value,
                                 self.abs_error_estimate + other.abs_error_estimate,
                                 self.evaluations + other.evaluations)

    def __float__(self):
        return float(self.value)


ZERO = IntegrationResult(0.0, 0.0, 0)


def clamped_arccos(x):
    """arccos with its argument clipped to [-1, 1] (annulus-boundary roundoff)."""
    return np.arccos(np.clip(x, -1.0, 1.0))


def clamped_arcsin(x):
    return np.arcsin(np.clip(x, -1.0, 1.0))


def _check_accuracy(value: float, abserr: float, ier: int, message: str, rel_tol: float,
                    a: float, b: float):
    allowed = rel_tol * abs(value) + ABS_FLOOR
    if abserr <= allowed:
        return
    if ier == 2 and abserr <= ROUNDOFF_SLACK * allowed:
        logger.warning("[QUAD] roundoff limits accuracy on [%g, %g]: error %.3g for value %.6g",
                       a, b, abserr, value)
        return
    raise NumericError(
        f"integral over [{a:g}, {b:g}] did not meet tolerance {rel_tol:g}: "
        f"error estimate {abserr:.3g} for value {value:.10g} ({message or 'ier=' + str(ier)})",
        best_estimate=value,
    )


def _quad(f: Callable[[float], float], a: float, b: float, rel_tol: float,
          points: Optional[Sequence[float]], limit: int) -> IntegrationResult:
    inner = None
    if points is not None:
        inner = sorted(p for p in points if a < p < b)
        inner = inner or None
    out = integrate.quad(f, a, b, epsabs=ABS_FLOOR, epsrel=rel_tol, limit=limit,
                         points=inner, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    # quad appends a message only when ier > 0
    message = str(out[3]) if len(out) > 3 else ""
    if not message:
        ier = 0
    else:
        ier = 2 if "roundoff" in message.lower() else 1
    if not math.isfinite(value):
        raise NumericError(f"integral over [{a:g}, {b:g}] is not finite", best_estimate=value)
    _check_accuracy(value, abserr, ier, message, rel_tol, a, b)
    return IntegrationResult(value, abserr, int(info["neval"]))


def integrate_finite(f: Callable[[float], float], a: float, b: float,
                     rel_tol: float = DEFAULT_REL_TOL, points: Optional[Sequence[float]] = None,
                     singular_endpoint: Optional[str] = None,
                     limit: int = DEFAULT_LIMIT) -> IntegrationResult:
    """
    Adaptive quadrature of f over [a, b].

    Args:
        f: Scalar integrand, finite on [a, b] except possibly at an endpoint
        a: Lower limit
        b: Upper limit (a <= b)
        rel_tol: Relative tolerance
        points: Interior break points (kinks, support edges)
        singular_endpoint: "a" or "b" to subdivide geometrically toward an
            integrable endpoint singularity before adaptive refinement
        limit: Maximum subintervals per adaptive call

    Returns:
        IntegrationResult
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate_finite needs finite limits; use integrate_semi_infinite")
    if a > b:
        raise DomainError(f"lower limit {a} exceeds upper limit {b}")
    if a == b:
        return ZERO
    if singular_endpoint is None:
        return _quad(f, a, b, rel_tol, points, limit)
    if singular_endpoint not in ("a", "b"):
        raise DomainError(f"singular_endpoint must be 'a' or 'b', got {singular_endpoint!r}")

    width = b - a
    cuts = [width * GEOMETRIC_RATIO ** k for k in range(GEOMETRIC_PIECES + 1)]
    if singular_endpoint == "a":
        edges = [a + c for c in reversed(cuts)]
        edges.insert(0, a)
    else:
        edges = [b - c for c in cuts]
        edges.append(b)
    total = ZERO
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total = total + _quad(f, lo, hi, rel_tol, points, limit)
    return total


def integrate_semi_infinite(f: Callable[[float], float], a: float,
                            rel_tol: float = DEFAULT_REL_TOL, scale: float = 1.0,
                            points: Optional[Sequence[float]] = None,
                            limit: int = DEFAULT_LIMIT) -> IntegrationResult:
    """
    Integral of f over [a, inf) through r = a + scale * t / (1 - t), t in [0, 1).

    `scale` should be of the order of the distance over which f varies;
    break points given in r are mapped to t.
    """
    if not math.isfinite(a) or a < 0:
        raise DomainError(f"lower limit must be finite and nonnegative, got {a}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")

    def mapped(t: float) -> float:
        if t >= 1.0:
            return 0.0
        one_minus = 1.0 - t
        return f(a + scale * t / one_minus) * scale / (one_minus * one_minus)

    mapped_points = None
    if points:
        mapped_points = [(p - a) / (p - a + scale) for p in points if a < p < math.inf]
    return integrate_finite(mapped, 0.0, 1.0, rel_tol=rel_tol, points=mapped_points, limit=limit)


def integrate_vector(f: Callable[[float], np.ndarray], a: float, b: float,
                     rel_tol: float = DEFAULT_REL_TOL, points: Optional[Sequence[float]] = None,
                     limit: int = 2000) -> IntegrationResult:
    """
    Integrate a vector-valued f over [a, b] (b may be inf) in one adaptive pass.

    The error contract is checked against the largest-magnitude component.
    """
    if a > b:
        raise DomainError(f"lower limit {a} exceeds upper limit {b}")
    inner = None
    if points is not None:
        inner = sorted(p for p in points if a < p < b) or None
    value, abserr, info = integrate.quad_vec(f, a, b, epsabs=ABS_FLOOR, epsrel=rel_tol,
                                             norm="max", limit=limit, points=inner,
                                             full_output=True)
    value = np.asarray(value, dtype=float)
    scale = float(np.max(np.abs(value))) if value.size else 0.0
    if not info.success:
        if abserr > ROUNDOFF_SLACK * (rel_tol * scale + ABS_FLOOR):
            raise NumericError(f"vector integral over [{a:g}, {b:g}] did not converge: "
                               f"{info.message}", best_estimate=value)
        logger.warning("[QUAD] vector integral over [%g, %g] stopped early: %s", a, b, info.message)
    return IntegrationResult(value, float(abserr), int(info.neval))
