"""Fading distributions, reproducible channel sampling, tails and conditional means.

Channel matrices are stored with the transmitter on the row axis and the
receiver on the column axis, so ``G[j, i]`` is the gain from transmitter
``j`` to receiver ``i`` and interference at receiver ``i`` is a column sum.
Entry ``(j, i)`` of an ``n``-link matrix is drawn from counter position
``j * n + i`` of the trial's stream; a sub-block sampled lazily therefore
matches the same entries of the full matrix bit for bit.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from fadingnet import rng
from fadingnet.rng import Seed


class FadingKind(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    LOGNORMAL = "lognormal"


@dataclass(frozen=True)
class FadingModel:
    """I.i.d. channel-gain distribution.

    Rayleigh fading means unit-mean exponential power gains.  For the
    log-normal family ``M`` and ``S`` are the location and scale of
    ``log g``.  ``mu`` and ``sigma2`` are derived.
    """

    kind: FadingKind = FadingKind.RAYLEIGH
    M: float = 0.0
    S: float = 1.0
    mu: float = field(init=False)
    sigma2: float = field(init=False)

    def __post_init__(self):
        kind = FadingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is FadingKind.RAYLEIGH:
            mu, sigma2 = 1.0, 1.0
        else:
            if not self.S > 0 or not math.isfinite(self.S) or not math.isfinite(self.M):
                raise ValueError(f"log-normal needs finite M and S > 0, got M={self.M}, S={self.S}")
            mu = math.exp(self.M + self.S**2 / 2)
            sigma2 = math.expm1(self.S**2) * math.exp(2 * self.M + self.S**2)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", sigma2)

    @classmethod
    def rayleigh(cls) -> "FadingModel":
        return cls(FadingKind.RAYLEIGH)

    @classmethod
    def lognormal(cls, M: float = 0.0, S: float = 1.0) -> "FadingModel":
        return cls(FadingKind.LOGNORMAL, float(M), float(S))

    @property
    def is_rayleigh(self) -> bool:
        return self.kind is FadingKind.RAYLEIGH

    def label(self) -> str:
        if self.is_rayleigh:
            return "rayleigh"
        return f"lognormal(M={self.M:g};S={self.S:g})"


RAYLEIGH = FadingModel.rayleigh()


def _gains_from_bits(bits: np.ndarray, model: FadingModel) -> np.ndarray:
    if model.is_rayleigh:
        # inverse CDF with u in (0, 1], so the draw is finite and >= 0
        return -np.log(rng.uniform_open_closed(bits))
    z = special.ndtri(rng.uniform_open(bits))
    return np.exp(model.M + model.S * z)


def sample_gains(rows, cols, n: int, model: FadingModel, seed: Seed) -> np.ndarray:
    """Sample the ``rows x cols`` block of the ``n``-link channel matrix."""
    rows = np.asarray(rows, dtype=np.uint64).reshape(-1)
    cols = np.asarray(cols, dtype=np.uint64).reshape(-1)
    index = rows[:, None] * np.uint64(n) + cols[None, :]
    return _gains_from_bits(rng.random_bits(seed, index), model)


def sample_direct_gains(n: int, model: FadingModel, seed: Seed) -> np.ndarray:
    """The diagonal ``g_ii`` of the ``n``-link matrix, without the rest."""
    if n < 1:
        raise ValueError(f"number of links must be >= 1, got {n}")
    i = np.arange(n, dtype=np.uint64)
    return _gains_from_bits(rng.random_bits(seed, i * np.uint64(n) + i), model)


def sample_channel_matrix(n: int, model: FadingModel, seed: Seed) -> np.ndarray:
    """Full ``n x n`` matrix of i.i.d. gains; row = transmitter, column = receiver."""
    if n < 1:
        raise ValueError(f"number of links must be >= 1, got {n}")
    idx = np.arange(n, dtype=np.uint64)
    return np.ascontiguousarray(sample_gains(idx, idx, n, model, seed))


def gain_scalar(j: int, i: int, n: int, model: FadingModel, seed: Seed) -> float:
    """One entry through pure-Python arithmetic; used to cross-check the vector path."""
    bits = rng.random_bits_scalar(seed, j * n + i)
    if model.is_rayleigh:
        return -math.log(((bits >> 11) + 1) * 2.0**-53)
    from statistics import NormalDist

    z = NormalDist().inv_cdf(((bits >> 12) + 0.5) * 2.0**-52)
    return math.exp(model.M + model.S * z)


def tail_probability(model: FadingModel, t):
    """Exact activation probability ``q = 1 - F(t)``.  Accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise ValueError("threshold must be >= 0")
    if model.is_rayleigh:
        q = np.exp(-t_arr)
    else:
        with np.errstate(divide="ignore"):
            q = special.ndtr(-(np.log(t_arr) - model.M) / model.S)
    return float(q) if q.ndim == 0 else q


def log_tail_probability(model: FadingModel, t):
    """``log q``, accurate far into the tail where ``q`` itself underflows."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("threshold must be >= 0")
    if model.is_rayleigh:
        out = -t_arr
    else:
        with np.errstate(divide="ignore"):
            out = special.log_ndtr(-(np.log(t_arr) - model.M) / model.S)
    return float(out) if out.ndim == 0 else out


def threshold_for_tail(model: FadingModel, q: float) -> float:
    """Inverse of :func:`tail_probability`: the ``t`` with ``1 - F(t) = q``."""
    if not 0 < q <= 1:
        raise ValueError(f"tail probability must lie in (0, 1], got {q}")
    if model.is_rayleigh:
        return -math.log(q)
    return math.exp(model.M + model.S * float(special.ndtri(1.0 - q))) if q < 1 else 0.0


def lognormal_tail_approx(model: FadingModel, t):
    """Large-threshold approximation of the log-normal tail (Mills ratio)."""
    if model.is_rayleigh:
        raise ValueError("tail approximation is defined for the log-normal model only")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("threshold must be > 0")
    u = np.log(t_arr) - model.M
    if np.any(u <= 0):
        raise ValueError("approximation needs log t > M")
    if np.any(u < 2 * model.S):
        warnings.warn("log-normal tail approximation is inaccurate for log t - M < 2S", stacklevel=2)
    S = model.S
    q = S / (math.sqrt(2 * math.pi) * u) * np.exp(-(u**2) / (2 * S**2))
    return float(q) if q.ndim == 0 else q


def _rayleigh_conditional_mean(delta: float) -> float:
    if delta < 1e-3:
        # series of 1 - d/(e^d - 1); avoids cancellation
        return delta / 2 - delta**2 / 12 + delta**4 / 720
    return 1.0 - delta / math.expm1(delta)


def conditional_mean_below(model: FadingModel, delta: float) -> float:
    """``E[g | g <= delta]``."""
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if model.is_rayleigh:
        return _rayleigh_conditional_mean(float(delta))
    M, S = model.M, model.S
    z0 = (math.log(delta) - M) / S
    log_norm = float(special.log_ndtr(z0))

    # w = z0 - z >= 0, integrand is the truncated-normal density times e^{S z}
    def integrand(w):
        z = z0 - w
        return math.exp(S * z - 0.5 * z * z - 0.5 * math.log(2 * math.pi) - log_norm)

    value, _ = integrate.quad(integrand, 0.0, math.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    return math.exp(M) * value
