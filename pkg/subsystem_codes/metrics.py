from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from subsystem_codes import logger


class Estimator(Enum):
    direct = "direct"
    importance = "importance"


class NoCrossingError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    A: float
    D: float
    residual: float
    points: int

    def predict(self, p):
        return self.A * np.power(p, self.D)


def binomial_std(failures, trials):
    """Standard error of a failure fraction estimated from `trials` Bernoulli samples."""
    trials = np.maximum(np.asarray(trials, dtype=np.float64), 1.0)
    rate = np.asarray(failures, dtype=np.float64) / trials
    return np.sqrt(rate * (1 - rate) / trials)


def fit_power_law(points: Sequence[Tuple[float, float]]) -> FitResult:
    """Least squares fit of P_L = A p^D in log-log space over the points with P_L > 0."""
    usable = [(p, rate) for p, rate in points if p > 0 and rate > 0]
    if len(usable) < 2:
        raise ValueError(f"A power-law fit needs at least 2 points with nonzero failure rate, got {len(usable)}")
    log_p = np.log([p for p, _ in usable])
    log_rate = np.log([rate for _, rate in usable])
    (slope, intercept), residuals, *_ = np.polyfit(log_p, log_rate, 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    if len(usable) < len(points):
        logger.warning(f"Fit ignores {len(points) - len(usable)} points with zero failure rate")
    return FitResult(A=float(np.exp(intercept)), D=float(slope), residual=residual, points=len(usable))


def crossing_point(p_values: Sequence[float], rates: Sequence[float], tolerance: float = 1e-9) -> float:
    """
    Physical error rate where the log-log interpolated failure curve meets the line rate = p, found by
    bisection on the first bracketing pair of grid points.
    """
    p = np.asarray(p_values, dtype=np.float64)
    rate = np.asarray(rates, dtype=np.float64)
    order = np.argsort(p)
    p, rate = p[order], rate[order]
    usable = (p > 0) & (rate > 0)
    p, rate = p[usable], rate[usable]
    if p.size < 2:
        raise NoCrossingError("Fewer than two grid points with a nonzero failure rate")
    log_p, log_rate = np.log(p), np.log(rate)
    gap = log_rate - log_p
    brackets = np.flatnonzero(np.sign(gap[:-1]) * np.sign(gap[1:]) <= 0)
    if brackets.size == 0:
        raise NoCrossingError(f"Failure rate never crosses p on the grid [{p[0]:.3g}, {p[-1]:.3g}]")
    i = int(brackets[0])
    lo, hi = log_p[i], log_p[i + 1]
    slope = (log_rate[i + 1] - log_rate[i]) / (hi - lo)

    def f(x: float) -> float:
        return log_rate[i] + slope * (x - log_p[i]) - x

    f_lo = f(lo)
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if np.sign(f_mid) == np.sign(f_lo) and f_mid != 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float(np.exp(0.5 * (lo + hi)))
