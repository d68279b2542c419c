"""Clique-based activation: candidate filtering, delta-cap interference graph, max clique.

A central controller keeps links whose direct gain clears
``t = (1 - alpha) log n``, joins two candidates when both cross gains
between them are at most ``delta``, and activates a maximum clique.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from fadingnet import clique
from fadingnet.fading import RAYLEIGH, FadingModel, conditional_mean_below, tail_probability
from fadingnet.network import NetworkParams, on_off_powers
from fadingnet.optimize import OptimizationError, grid_then_golden
from fadingnet.rng import Seed

log = logging.getLogger(__name__)

GREEDY_RESTARTS = 64


@dataclass(frozen=True)
class CentralizedConfig:
    n: float
    alpha: float
    delta: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")

    @property
    def t(self) -> float:
        return (1 - self.alpha) * math.log(self.n)


@dataclass(frozen=True)
class InterferenceGraph:
    vertices: tuple
    adjacency: np.ndarray
    pi: Optional[float]

    def check(self):
        """Raise if the adjacency is not symmetric with an empty diagonal."""
        adj = self.adjacency
        if adj.shape != (len(self.vertices), len(self.vertices)):
            raise ValueError("adjacency shape does not match the vertex list")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency matrix is not symmetric")
        if np.any(np.diagonal(adj)):
            raise ValueError("adjacency matrix has self-loops")


class SolverKind(str, enum.Enum):
    EXACT = "exact"
    GREEDY = "greedy"


@dataclass(frozen=True)
class CliqueResult:
    members: frozenset
    size: int
    method: SolverKind
    predicted_size: float


def candidate_pool(G, n: float, alpha: float) -> np.ndarray:
    """Indices with direct gain strictly above ``(1 - alpha) log n``.

    ``G`` may be the full matrix or the vector of direct gains.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    G = np.asarray(G, dtype=float)
    direct = np.diagonal(G) if G.ndim == 2 else G
    return np.flatnonzero(direct > (1 - alpha) * math.log(n))


def edge_probability(delta: float, model: FadingModel = RAYLEIGH) -> float:
    if not model.is_rayleigh:
        raise ValueError("the closed-form edge probability holds for Rayleigh fading only")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return (-math.expm1(-delta)) ** 2


def graph_from_block(block, vertices, delta: float, model: FadingModel = RAYLEIGH) -> InterferenceGraph:
    """Graph over ``vertices`` from their mutual gain block (``block[a, b] = g_{v_a v_b}``)."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    block = np.asarray(block, dtype=float)
    small = block <= delta
    adjacency = small & small.T
    np.fill_diagonal(adjacency, False)
    pi = edge_probability(delta) if model.is_rayleigh else (1 - tail_probability(model, delta)) ** 2
    return InterferenceGraph(tuple(int(v) for v in vertices), adjacency, pi)


def build_graph(G, pool, delta: float, model: FadingModel = RAYLEIGH) -> InterferenceGraph:
    G = np.asarray(G, dtype=float)
    pool = np.asarray(pool, dtype=int)
    return graph_from_block(G[np.ix_(pool, pool)], pool, delta, model)


def clique_number_prediction(k: float, pi: float) -> float:
    """Asymptotic clique number ``2 log k / log(1/pi)`` of a ``G(k, pi)`` graph."""
    if not 0 < pi < 1:
        raise ValueError(f"edge probability must lie in (0, 1), got {pi}")
    if k < 2:
        raise ValueError("k must be >= 2")
    return 2 * math.log(k) / -math.log(pi)


def _predicted(graph: InterferenceGraph) -> float:
    m = len(graph.vertices)
    if graph.pi is None or not 0 < graph.pi < 1 or m < 2:
        return math.nan
    return clique_number_prediction(m, graph.pi)


def _result(graph, positions, method) -> CliqueResult:
    if not clique.is_clique(graph.adjacency, positions):
        raise AssertionError("solver returned a vertex set that is not a clique")
    members = frozenset(graph.vertices[p] for p in positions)
    return CliqueResult(members, len(members), method, _predicted(graph))


def max_clique_exact(graph: InterferenceGraph, cap: int = clique.EXACT_CAP) -> CliqueResult:
    return _result(graph, clique.max_clique_positions(graph.adjacency, cap), SolverKind.EXACT)


def max_clique_greedy(graph: InterferenceGraph, restarts: int = GREEDY_RESTARTS, seed: Seed = Seed(0)) -> CliqueResult:
    return _result(graph, clique.greedy_clique_positions(graph.adjacency, restarts, seed), SolverKind.GREEDY)


def solve_clique(graph: InterferenceGraph, solver: str = "auto", seed: Seed = Seed(0)) -> CliqueResult:
    """``auto`` runs the exact search up to the size cap and greedy above it."""
    if solver == "auto":
        solver = SolverKind.EXACT if len(graph.vertices) <= clique.EXACT_CAP else SolverKind.GREEDY
    if SolverKind(solver) is SolverKind.EXACT:
        return max_clique_exact(graph)
    return max_clique_greedy(graph, seed=seed)


def strategy2_select(
    G, n: int, config: CentralizedConfig, params: NetworkParams, solver: str = "auto", seed: Seed = Seed(0)
) -> np.ndarray:
    pool = candidate_pool(G, n, config.alpha)
    active = np.zeros(n, dtype=bool)
    if len(pool):
        result = solve_clique(build_graph(G, pool, config.delta), solver, seed)
        active[sorted(result.members)] = True
    return on_off_powers(active, params.P)


def _log_one_minus_exp(delta):
    # log(1 - e^{-delta}), accurate for both small and large delta
    delta = np.asarray(delta, dtype=float)
    return np.where(delta > math.log(2), np.log1p(-np.exp(-delta)), np.log(-np.expm1(-np.minimum(delta, math.log(2)))))


_conditional_mean = np.vectorize(lambda d: conditional_mean_below(RAYLEIGH, d), otypes=[float])


def centralized_coefficients(alpha: float, delta):
    """``(kappa_c, lambda_c)`` for scalar or array ``delta``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    d = np.asarray(delta, dtype=float)
    if np.any(d <= 0):
        raise ValueError("delta must be > 0")
    l1 = _log_one_minus_exp(d)
    kappa = -alpha / l1
    lam = np.log1p(-(1 - alpha) * l1 / (alpha * _conditional_mean(d)))
    if d.ndim == 0:
        return float(kappa), float(lam)
    return kappa, lam


@dataclass(frozen=True)
class CentralizedPrediction:
    kappa: float
    lam: float
    coefficient: float
    k_hat: float
    sum_rate_bound: float


def centralized_predictions(n: float, alpha: float, delta: float) -> CentralizedPrediction:
    kappa, lam = centralized_coefficients(alpha, delta)
    L = math.log(n)
    return CentralizedPrediction(kappa, lam, kappa * lam, kappa * L, kappa * lam * L)


@dataclass(frozen=True)
class DeltaGrid:
    lo: float = 1e-8
    hi: float = 20.0
    points: int = 4000
    tol: float = 1e-4


def optimize_delta(alpha: float, grid: DeltaGrid = DeltaGrid()):
    """``(delta_star, coefficient)`` maximizing ``kappa_c * lambda_c`` on ``(0, hi]``.

    The grid is log-spaced; the golden-section tolerance shrinks with the
    bracket location so small optima are resolved too.
    """

    def coefficient(d):
        kappa, lam = centralized_coefficients(alpha, d)
        return np.asarray(kappa) * np.asarray(lam)

    xs = np.geomspace(grid.lo, grid.hi, grid.points)
    values = coefficient(xs)
    i = int(np.argmax(values))
    tol = min(grid.tol, grid.tol * xs[i])
    return grid_then_golden(coefficient, xs, tol)


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: float
    delta_star: float
    kappa: float
    lam: float


def default_alpha_grid(points: int = 64) -> np.ndarray:
    return np.geomspace(0.02, 0.98, points)


def tradeoff_centralized(alphas=None, grid: DeltaGrid = DeltaGrid()) -> list:
    """Centralized (kappa, lambda) frontier at the optimal delta, sorted by kappa.

    Alphas whose optimum is not interior to the delta range are skipped.
    """
    alphas = default_alpha_grid() if alphas is None else alphas
    out = []
    for alpha in alphas:
        try:
            delta_star, _ = optimize_delta(float(alpha), grid)
        except OptimizationError as exc:
            log.warning("alpha=%g skipped: %s", alpha, exc)
            continue
        kappa, lam = centralized_coefficients(float(alpha), delta_star)
        out.append(TradeoffPoint(float(alpha), delta_star, kappa, lam))
    out.sort(key=lambda p: p.kappa)
    return out
