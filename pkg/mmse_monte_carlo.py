"""
Monte Carlo evaluation of the linear-MMSE SINR.

Each trial samples an interferer realization, draws i.i.d. Rayleigh
channels and evaluates

    SINR = r_T**-alpha * g_T^H (G P G^H + sigma2 I)^-1 g_T,   P = diag(r_i**-alpha)

with a Cholesky solve. Trials are independent and may run on a thread pool;
per-trial generator streams keep the result identical to a sequential run.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from analytic_engine import SinrCdfCurve
from errors import DomainError, NumericError, SingularSystemError
from models import IntensityModel, PathLoss, SystemParams
from point_process import (
    DEFAULT_TAIL_TOLERANCE, Realization, SimWindow, sample, trial_rng, validate_window,
)

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e15
MAX_DISCARD_RATE = 1e-4
DEFAULT_SINR_MAX = 1e3


@dataclass(frozen=True, eq=False)
class ChannelDraw:
    """Target channel g_T (length L) and interferer channels G (L x n), CN(0, 1) entries."""
    g_T: np.ndarray
    G: np.ndarray

    @property
    def antennas(self) -> int:
        return len(self.g_T)


def draw_channels(L: int, n: int, rng: np.random.Generator) -> ChannelDraw:
    """Unit-variance circular complex Gaussian entries (variance 1/2 per real part)."""
    scale = math.sqrt(0.5)
    g_T = scale * (rng.standard_normal(L) + 1j * rng.standard_normal(L))
    G = scale * (rng.standard_normal((L, n)) + 1j * rng.standard_normal((L, n)))
    return ChannelDraw(g_T, G)


def mmse_sinr(draw: ChannelDraw, distances: Sequence[float], params: SystemParams,
              pathloss: Optional[PathLoss] = None) -> float:
    """
    Linear-MMSE output SINR for one channel draw.

    Args:
        draw: Channels of the target and the interferers
        distances: Interferer distances r_i (one per column of G)
        params: System parameters
        pathloss: Interferer path-loss law; r**-alpha when omitted

    Returns:
        SINR; +inf when sigma2 = 0 and fewer than L interferers can be nulled
    """
    distances = np.asarray(distances, dtype=float)
    n = len(distances)
    if draw.G.shape != (draw.antennas, n):
        raise DomainError(f"channel matrix shape {draw.G.shape} does not match {n} interferers")
    link_gain = params.r_T ** -params.alpha
    signal = float(np.vdot(draw.g_T, draw.g_T).real)
    if params.sigma2 == 0 and n < draw.antennas:
        return math.inf
    if n == 0:
        return link_gain * signal / params.sigma2

    powers = np.asarray(pathloss(distances), dtype=float) if pathloss is not None \
        else distances ** -params.alpha
    if not np.all(np.isfinite(powers)):
        raise SingularSystemError("interferer at zero distance")
    weighted = draw.G * powers
    system = weighted @ draw.G.conj().T + params.sigma2 * np.eye(draw.antennas)
    condition = np.linalg.cond(system)
    if not condition <= CONDITION_LIMIT:
        raise SingularSystemError(f"condition estimate {condition:.3g} exceeds {CONDITION_LIMIT:g}")
    try:
        factor = cho_factor(system, lower=True, check_finite=False)
    except LinAlgError as e:
        raise SingularSystemError(f"Cholesky factorisation failed: {e}")
    solved = cho_solve(factor, draw.g_T, check_finite=False)
    return link_gain * float(np.vdot(draw.g_T, solved).real)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Sorted Monte Carlo SINR samples."""
    sorted_samples: np.ndarray
    trial_count: int
    seed: Optional[int] = None
    discarded: int = 0
    # per-trial values in trial order, NaN for discarded trials
    by_trial: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.trial_count != len(self.sorted_samples):
            raise DomainError("trial_count must equal the number of samples")
        if np.any(np.diff(self.sorted_samples) < 0):
            raise DomainError("samples must be sorted ascending")

    @classmethod
    def from_samples(cls, samples, seed: Optional[int] = None, discarded: int = 0,
                     by_trial: Optional[np.ndarray] = None) -> "EmpiricalCdf":
        values = np.sort(np.asarray(samples, dtype=float))
        return cls(values, len(values), seed, discarded, by_trial)

    def __call__(self, x):
        """Fraction of samples <= x."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.trial_count

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.sorted_samples, q))

    def scaled(self, factor: float) -> "EmpiricalCdf":
        """Samples multiplied by a positive factor (e.g. r_T**alpha to get gamma)."""
        by_trial = None if self.by_trial is None else self.by_trial * factor
        return EmpiricalCdf(self.sorted_samples * factor, self.trial_count, self.seed, self.discarded, by_trial)


def sup_deviation(emp: EmpiricalCdf, analytic: Union[SinrCdfCurve, Callable]) -> float:
    """
    One-sample Kolmogorov-Smirnov statistic between samples and an analytic CDF.

    `analytic` is a SinrCdfCurve or a callable taking SINR. A curve is only
    known on its grid, so samples outside the grid range are skipped and the
    deviations at the grid points themselves are included.
    """
    n = emp.trial_count
    if n == 0:
        raise DomainError("empirical CDF has no samples")
    x = emp.sorted_samples
    i = np.arange(1, n + 1)
    if isinstance(analytic, SinrCdfCurve):
        grid = analytic.sinr_grid
        inside = (x >= grid[0]) & (x <= grid[-1])
        values = analytic.at_sinr(x[inside])
        upper, lower = i[inside] / n, (i[inside] - 1) / n
        at_grid = np.abs(np.asarray(analytic.cdf_values) - emp(grid))
        candidates = [float(np.max(at_grid))]
        if values.size:
            candidates += [float(np.max(upper - values)), float(np.max(values - lower))]
        return max(candidates)

    finite = np.isfinite(x)
    values = np.ones(n)
    try:
        values[finite] = np.asarray(analytic(x[finite]), dtype=float)
    except (TypeError, ValueError):
        values[finite] = [float(analytic(v)) for v in x[finite]]
    return float(max(np.max(i / n - values), np.max(values - (i - 1) / n)))


def _one_trial(model: IntensityModel, params: SystemParams, window: SimWindow, master_seed: int,
               index: int, pathloss: Optional[PathLoss], hard_core: str) -> float:
    rng = trial_rng(master_seed, index)
    realization: Realization = sample(model, window, rng, (master_seed, index), hard_core)
    draw = draw_channels(params.L, len(realization), rng)
    try:
        return mmse_sinr(draw, realization.distances, params, pathloss)
    except SingularSystemError as e:
        logger.debug("[MMSE] trial %d discarded: %s", index, e)
        return math.nan


def run_trials(model: IntensityModel, params: SystemParams, trials: int, master_seed: int,
               window: Optional[SimWindow] = None, threads: int = 1,
               pathloss: Optional[PathLoss] = None, gamma_max: Optional[float] = None,
               tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
               hard_core: str = "matern") -> EmpiricalCdf:
    """
    Run independent MMSE trials and collect the SINR samples.

    Args:
        model: Interferer intensity model
        params: System parameters
        trials: Number of trials (>= 1)
        master_seed: Seed; trial i uses stream (master_seed, i)
        window: Simulation window; validated from gamma_max when omitted
        threads: Worker threads
        pathloss: Interferer path-loss law (r**-alpha when omitted)
        gamma_max: Largest gamma of interest for window validation
        tail_tolerance: Window truncation tolerance
        hard_core: Sampler for HardCoreApprox models ("matern" or "poisson")

    Returns:
        EmpiricalCdf of the kept SINR samples
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    if window is None:
        if gamma_max is None:
            gamma_max = DEFAULT_SINR_MAX * params.r_T ** params.alpha
        window = validate_window(model, params.alpha, gamma_max, tail_tolerance)

    logger.info("[MMSE] start: %d trials, seed %d, %d thread(s), window %.6g",
                trials, master_seed, threads, window.outer_radius)
    started = time.perf_counter()
    run = lambda i: _one_trial(model, params, window, master_seed, i, pathloss, hard_core)
    if threads == 1:
        samples = [run(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(run, range(trials)))
    samples = np.asarray(samples, dtype=float)

    discarded = int(np.count_nonzero(np.isnan(samples)))
    if discarded:
        logger.warning("[MMSE] %d of %d trials discarded as numerically singular", discarded, trials)
    if discarded > MAX_DISCARD_RATE * trials:
        raise NumericError(f"{discarded} of {trials} trials discarded; rate exceeds {MAX_DISCARD_RATE:g}")
    kept = samples[~np.isnan(samples)]
    logger.info("[MMSE] done: %d samples in %.2f s", len(kept), time.perf_counter() - started)
    return EmpiricalCdf.from_samples(kept, seed=master_seed, discarded=discarded, by_trial=samples)
