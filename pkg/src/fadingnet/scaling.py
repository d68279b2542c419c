"""Closed-form sum-rate laws and the threshold optimizer.

All rates are in nats.  ``n`` may be any real >= 1 here (e.g. ``e**30``);
only the simulators need integer link counts.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from fadingnet.decentralized import SlackFunctions
from fadingnet.fading import FadingModel, log_tail_probability
from fadingnet.optimize import OptimizationError, grid_then_golden


def analytic_sum_rate(n: float, t, model: FadingModel):
    """``nq log(1 + t / (mu nq))`` with the exact tail ``q``; vectorized in ``t``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    t_arr = np.asarray(t, dtype=float)
    nq = np.exp(math.log(n) + log_tail_probability(model, t_arr))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = nq * np.log1p(t_arr / (model.mu * nq))
    r = np.where(nq > 0, r, 0.0)
    return float(r) if r.ndim == 0 else r


def rayleigh_sum_rate(n: float, t):
    """Rayleigh special case written directly in terms of ``n e^{-t}``."""
    x = n * np.exp(-np.asarray(t, dtype=float))
    r = x * np.log1p(t / x)
    return float(r) if np.ndim(r) == 0 else r


def theorem1_bound(
    n: float, t: float, model: FadingModel, slack: SlackFunctions = SlackFunctions(), xi_n: Optional[float] = None
) -> float:
    """Achievable sum-rate with the concentration slack kept.

    ``xi_n`` overrides the slack-function value of the concentration width.
    """
    nq = n * math.exp(log_tail_probability(model, t))
    xi = slack.xi(nq) if xi_n is None else xi_n
    m = nq - xi * math.sqrt(nq)
    if not m > 0:
        raise ValueError(f"effective link count nq - xi sqrt(nq) = {m:g} is not positive")
    return m * math.log1p(t / (model.mu * m + slack.psi(m)))


@dataclass(frozen=True)
class ThresholdGrid:
    points: int = 10_000
    margin: float = 10.0
    tol: float = 1e-6


def threshold_grid(n: float, model: FadingModel, grid: ThresholdGrid = ThresholdGrid()) -> np.ndarray:
    L = math.log(n)
    if model.is_rayleigh:
        return np.linspace(0.0, L + grid.margin, grid.points)
    # log-normal optima sit at t ~ exp(M + S sqrt(2 log n)); grid in u = log t - M
    u = np.linspace(-4 * model.S, L + grid.margin, grid.points)
    return np.exp(model.M + u)


def optimize_threshold(n: float, model: FadingModel, grid: ThresholdGrid = ThresholdGrid()):
    """``(t_star, R_star)`` maximizing :func:`analytic_sum_rate`."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return grid_then_golden(lambda t: analytic_sum_rate(n, t, model), threshold_grid(n, model, grid), grid.tol)


@dataclass(frozen=True)
class ScalingPrediction:
    t_star: float
    R_star: float
    k_pred: float
    lambda_pred: float
    u: Optional[float] = None
    B: Optional[float] = None


def rayleigh_predictions(n: float) -> ScalingPrediction:
    """Leading-order optimum for Rayleigh fading; ``R_star`` omits its O(1) term."""
    if n < 3:
        raise ValueError("n must be >= 3")
    L = math.log(n)
    LL = math.log(L)
    return ScalingPrediction(
        t_star=L - 2 * LL + math.log(2),
        R_star=L - 2 * LL,
        k_pred=0.5 * L * L,
        lambda_pred=2.0 / L,
    )


def lognormal_B(S: float) -> float:
    return math.sqrt(2 * math.pi) * math.exp(-(S**2) / 2) / S


def lognormal_predictions(n: float, M: float, S: float) -> ScalingPrediction:
    if n < 3:
        raise ValueError("n must be >= 3")
    if not S > 0:
        raise ValueError("S must be > 0")
    L = math.log(n)
    growth = math.exp(S * math.sqrt(2 * L))
    t_star = math.exp(M - S**2) * growth
    return ScalingPrediction(
        t_star=t_star,
        R_star=math.exp(-1.5 * S**2) * growth,
        k_pred=math.exp(-1.5 * S**2) / (math.sqrt(8) * S) * math.sqrt(L) * growth,
        lambda_pred=math.sqrt(8) * S / math.sqrt(L),
        u=math.log(t_star) - M,
        B=lognormal_B(S),
    )


def lognormal_closed_sum_rate(n: float, u, S: float):
    """Sum-rate after substituting the log-normal tail approximation, in ``u``."""
    u = np.asarray(u, dtype=float)
    B = lognormal_B(S)
    e = u**2 / (2 * S**2)
    r = S / (math.sqrt(2 * math.pi) * u) * n * np.exp(-e) * np.log1p(B * u * np.exp(u + e) / n)
    return float(r) if r.ndim == 0 else r


class RegimeKind(str, enum.Enum):
    SUB_LOG = "SubLog"
    ALPHA_LOG = "AlphaLog"
    MID_RANGE = "MidRange"
    POWER_LAW = "PowerLaw"
    NEAR_LINEAR = "NearLinear"


@dataclass(frozen=True)
class RegimeCutoffs:
    """Finite-n boundaries between the asymptotic regimes.

    ``k / log n`` below ``sub_log`` is SubLog, up to ``alpha_log_max`` it is
    AlphaLog.  Above that, ``k <= (log n)**polylog_exponent`` or
    ``log k / log n < mid_range_power`` is MidRange; otherwise the power
    ``log k / log n`` decides between PowerLaw and NearLinear.
    """

    sub_log: float = 0.25
    alpha_log_max: float = 4.0
    mid_range_power: float = 0.1
    near_linear_power: float = 0.9
    polylog_exponent: float = 2.5


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    predicted_sum_rate: float
    alpha: Optional[float] = None


def regime_classify(n: float, k: float, cutoffs: RegimeCutoffs = RegimeCutoffs()) -> Regime:
    """Label the sum-rate regime of the ``k`` best links out of ``n``."""
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n], got k={k}, n={n}")
    L = math.log(n)
    r1 = k / L
    r2 = math.log(k) / L
    if r1 < cutoffs.sub_log:
        kind, alpha = RegimeKind.SUB_LOG, None
    elif r1 <= cutoffs.alpha_log_max:
        kind, alpha = RegimeKind.ALPHA_LOG, r1
    elif r2 < cutoffs.mid_range_power or math.log(k) <= cutoffs.polylog_exponent * math.log(L):
        kind, alpha = RegimeKind.MID_RANGE, None
    elif r2 <= cutoffs.near_linear_power:
        kind, alpha = RegimeKind.POWER_LAW, r2
    else:
        kind, alpha = RegimeKind.NEAR_LINEAR, None

    if kind is RegimeKind.ALPHA_LOG:
        rate = alpha * math.log1p(1 / alpha) * L
    elif kind is RegimeKind.MID_RANGE:
        rate = L
    elif kind is RegimeKind.POWER_LAW:
        rate = (1 - alpha) * L
    else:
        # threshold t ~ log n - log k plugged back into the Rayleigh sum-rate
        rate = k * math.log1p((L - math.log(k)) / k)
    return Regime(kind, rate, alpha)


def tradeoff_decentralized(kappa):
    """Rate-per-link ``log(1 + 1/kappa)`` for ``k ~ kappa log n`` active links."""
    kappa_arr = np.asarray(kappa, dtype=float)
    if np.any(kappa_arr <= 0):
        raise ValueError("kappa must be > 0")
    lam = np.log1p(1.0 / kappa_arr)
    return float(lam) if lam.ndim == 0 else lam


__all__ = [
    "OptimizationError",
    "analytic_sum_rate",
    "rayleigh_sum_rate",
    "theorem1_bound",
    "ThresholdGrid",
    "threshold_grid",
    "optimize_threshold",
    "ScalingPrediction",
    "rayleigh_predictions",
    "lognormal_predictions",
    "lognormal_B",
    "lognormal_closed_sum_rate",
    "RegimeKind",
    "RegimeCutoffs",
    "Regime",
    "regime_classify",
    "tradeoff_decentralized",
]
