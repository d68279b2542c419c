"""Threshold activation (each link only needs its own direct gain) and its bounds."""

import math
from dataclasses import dataclass

import numpy as np

from fadingnet.fading import FadingModel, sample_direct_gains, tail_probability
from fadingnet.network import NetworkParams, on_off_powers
from fadingnet.rng import Seed


@dataclass(frozen=True)
class ThresholdPolicy:
    t: float
    q: float

    @classmethod
    def for_model(cls, model: FadingModel, t: float) -> "ThresholdPolicy":
        return cls(float(t), tail_probability(model, t))


@dataclass(frozen=True)
class SlackFunctions:
    """Slack sequences ``xi_n = (nq)**xi_exponent`` and ``psi(m) = m**psi_exponent``."""

    xi_exponent: float = 0.25
    psi_exponent: float = 0.5

    def __post_init__(self):
        if not 0 < self.xi_exponent < 0.5:
            raise ValueError("xi_exponent must lie in (0, 1/2)")
        if not 0 < self.psi_exponent < 1:
            raise ValueError("psi_exponent must lie in (0, 1)")

    def xi(self, nq: float) -> float:
        return nq**self.xi_exponent

    def psi(self, m: float) -> float:
        return m**self.psi_exponent


def _direct(G) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    return np.diagonal(G) if G.ndim == 2 else G


def strategy1_activate(G, policy: ThresholdPolicy, params: NetworkParams) -> np.ndarray:
    """``P`` on links with ``g_ii > t`` (strict), 0 elsewhere.

    ``G`` may be the full matrix or just its diagonal; nothing off the
    diagonal is read.
    """
    return on_off_powers(_direct(G) > policy.t, params.P)


def topk_activate(G, k: int, params: NetworkParams) -> np.ndarray:
    """Activate the ``k`` largest direct gains; ties go to the lower index."""
    g = _direct(G)
    if not 0 <= k <= len(g):
        raise ValueError(f"k must lie in [0, {len(g)}], got {k}")
    # stable sort on -g keeps index order among equal gains
    chosen = np.argsort(-g, kind="stable")[:k]
    active = np.zeros(len(g), dtype=bool)
    active[chosen] = True
    return on_off_powers(active, params.P)


def jensen_bound(G, p, t: float, params: NetworkParams) -> float:
    """``k log(1 + t / (rho + mean I))`` over the active links."""
    G = np.asarray(G, dtype=float)
    active = np.asarray(p) > 0
    k = int(active.sum())
    if k == 0:
        return 0.0
    direct = np.diagonal(G)
    if np.any(direct[active] <= t):
        raise ValueError("every active link must have direct gain > t")
    sub = G[np.ix_(active, active)].copy()
    np.fill_diagonal(sub, 0.0)
    mean_interference = math.fsum(sub.sum(axis=0)) / k
    return k * math.log1p(t / (params.rho + mean_interference))


def concentration_check(
    n: int, model: FadingModel, policy: ThresholdPolicy, trials: int, xi: float, seed: Seed
) -> float:
    """Fraction of trials with ``|k - nq| < xi sqrt(nq)``."""
    nq = n * policy.q
    if not nq > 0:
        raise ValueError("nq must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    band = xi * math.sqrt(nq)
    hits = 0
    for trial in range(trials):
        k = int(np.count_nonzero(sample_direct_gains(n, model, seed.child(trial)) > policy.t))
        hits += abs(k - nq) < band
    return hits / trials
