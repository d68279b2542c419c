"""Exact SINR rates for on-off power vectors.

Rates are in nats per channel use.  Interference in reports is normalized
by ``P`` (a plain sum of active cross gains), and the receiver sees
``eta + P * I_i``.
"""

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Input outside the domain of the rate formula."""


@dataclass(frozen=True)
class NetworkParams:
    n: int
    P: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.P > 0:
            raise ValueError(f"P must be > 0, got {self.P}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @property
    def rho(self) -> float:
        return self.eta / self.P


def on_off_powers(active, P: float) -> np.ndarray:
    """Power vector with ``P`` where ``active`` is true and 0 elsewhere."""
    return np.where(np.asarray(active, dtype=bool), float(P), 0.0)


def check_powers(p, params: NetworkParams) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (params.n,):
        raise ValueError(f"power vector has shape {p.shape}, expected ({params.n},)")
    if not np.all((p == 0.0) | (p == params.P)):
        raise ValueError("on-off power vector entries must be exactly 0 or P")
    return p


def _check_matrix(G, n: int) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.shape != (n, n):
        raise ValueError(f"channel matrix has shape {G.shape}, expected ({n}, {n})")
    return G


@dataclass(frozen=True)
class ThroughputReport:
    rates: np.ndarray
    interference: np.ndarray
    sum_rate: float
    active_count: int
    rate_per_link: float
    no_active_links: bool
    active: np.ndarray

    @property
    def mean_interference(self) -> float:
        """Mean of ``I_i`` over active links (0 when the network is silent)."""
        if self.active_count == 0:
            return 0.0
        return math.fsum(self.interference[self.active]) / self.active_count


def _rates(G, p, params):
    on = (p > 0).astype(float)
    direct = np.diagonal(G).copy()
    cross = G.copy()
    np.fill_diagonal(cross, 0.0)
    # column reduction over active transmitters
    interference = on @ cross
    signal = direct * p
    denom = params.eta + params.P * interference
    active = p > 0
    if np.any(active & (denom == 0) & (signal > 0)):
        raise DomainError("zero noise and zero interference: rate is unbounded")
    rates = np.zeros_like(signal)
    rates[active] = np.log1p(signal[active] / denom[active])
    return rates, interference, active


def link_rate(i: int, G, p, params: NetworkParams) -> float:
    G = _check_matrix(G, params.n)
    p = check_powers(p, params)
    if not 0 <= i < params.n:
        raise IndexError(f"link index {i} out of range")
    if p[i] == 0:
        return 0.0
    others = np.delete(np.arange(params.n), i)
    denom = params.eta + float(np.dot(G[others, i], p[others]))
    signal = G[i, i] * p[i]
    if denom == 0 and signal > 0:
        raise DomainError("zero noise and zero interference: rate is unbounded")
    return float(np.log1p(signal / denom))


def evaluate(G, p, params: NetworkParams) -> "ThroughputReport":
    G = _check_matrix(G, params.n)
    p = check_powers(p, params)
    rates, interference, active = _rates(G, p, params)
    k = int(active.sum())
    total = math.fsum(rates)
    return ThroughputReport(
        rates=rates,
        interference=interference,
        sum_rate=total,
        active_count=k,
        rate_per_link=total / k if k else 0.0,
        no_active_links=k == 0,
        active=active,
    )


def scale_invariance_check(G, p, params: NetworkParams, c: float) -> bool:
    if not c > 0:
        raise ValueError("scale factor must be > 0")
    base = evaluate(G, p, params)
    scaled = evaluate(np.asarray(G) * c, p, NetworkParams(params.n, params.P, params.eta * c))
    return bool(np.allclose(scaled.rates, base.rates, rtol=1e-10, atol=0.0))
