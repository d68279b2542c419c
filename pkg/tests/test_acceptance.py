"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single PASS/FAIL line (collected in the terminal
summary) before asserting.  Monte Carlo criteria use master seed 1.
"""

import itertools
import math
import time

import numpy as np
import pytest

from fadingnet import centralized as cz
from fadingnet import experiments as ex
from fadingnet import scaling
from fadingnet.clique import is_clique
from fadingnet.fading import RAYLEIGH, FadingModel, lognormal_tail_approx, sample_channel_matrix, tail_probability
from fadingnet.network import NetworkParams, evaluate
from fadingnet.rng import Seed

pytestmark = pytest.mark.acceptance

MASTER = 1


@pytest.fixture(scope="module")
def rayleigh_1e5():
    start = time.perf_counter()
    config = ex.ExperimentConfig(n=(100_000,), t=("auto",), trials=200, master_seed=MASTER)
    result = ex.run_experiment(config)
    return result, time.perf_counter() - start


def test_criterion_01_jensen(acceptance_report):
    start = time.perf_counter()
    config = ex.ExperimentConfig(n=(1000,), t=("auto",), trials=1, master_seed=MASTER)
    (cell,) = ex.resolve(config)
    violations = 0
    for i in range(1000):
        try:
            r = ex.run_trial(cell, i)
        except ex.TrialError:
            violations += 1
            continue
        violations += r.sum_rate < r.bound
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30
    acceptance_report(1, ok, f"Jensen violations {violations}/1000 at t*={cell.t:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_02_concentration(acceptance_report, rayleigh_1e5):
    result, elapsed = rayleigh_1e5
    cell = result.cells[0]
    nq = cell.n * math.exp(-cell.t)
    ks = np.array([r.k for r in result.records])
    mean_ratio = ks.mean() / nq
    inside = np.mean(np.abs(ks - nq) < 3 * math.sqrt(nq))
    ok = abs(mean_ratio - 1) <= 0.02 and inside >= 0.95 and elapsed < 120
    acceptance_report(2, ok, f"mean k/nq = {mean_ratio:.4f} (nq={nq:.2f}), within 3 sd: {inside:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_optimal_threshold(acceptance_report):
    gaps = []
    for L in (10, 20, 30):
        t_grid, _ = scaling.optimize_threshold(math.exp(L), RAYLEIGH)
        gaps.append(abs(t_grid - scaling.rayleigh_predictions(math.exp(L)).t_star))
    shrinking = gaps[0] > gaps[1] > gaps[2]
    ok = gaps[2] <= 0.3 and shrinking
    acceptance_report(3, ok, f"|t_grid - t_closed| at e^10, e^20, e^30 = {', '.join(f'{g:.3f}' for g in gaps)} "
                             f"(need <= 0.3 at e^30, shrinking: {shrinking})")
    assert ok


def test_criterion_04_rayleigh_predictions(acceptance_report, rayleigh_1e5):
    result, elapsed = rayleigh_1e5
    cell = result.cells[0]
    agg = result.aggregates
    k_cmp = ex.compare_to_prediction(agg, "k_vs_rayleigh", cell)
    lam_cmp = ex.compare_to_prediction(agg, "lambda_vs_rayleigh", cell)
    r_cmp = ex.compare_to_prediction(agg, "sum_rate_vs_analytic", cell)
    ok = k_cmp.within_band and lam_cmp.within_band and r_cmp.within_band and elapsed < 120
    acceptance_report(4, ok, f"k/(log^2 n / 2) = {k_cmp.ratio:.3f} [0.85, 1.15], "
                             f"lambda/(2/log n) = {lam_cmp.ratio:.3f} [0.8, 1.25], R/R(t*) = {r_cmp.ratio:.3f} >= 0.9")
    assert ok


def test_criterion_05_edge_model(acceptance_report):
    start = time.perf_counter()
    m = 448  # 448 * 447 / 2 = 100128 pairs
    iu = np.triu_indices(m, 1)
    details, ok = [], True
    for j, delta in enumerate((0.5, 1.0, 2.0)):
        G = sample_channel_matrix(m, RAYLEIGH, Seed(MASTER, j))
        graph = cz.build_graph(G, np.arange(m), delta)
        edges = graph.adjacency[iu][:100_000]
        pi = cz.edge_probability(delta)
        z = (edges.mean() - pi) / math.sqrt(pi * (1 - pi) / 100_000)
        ok &= abs(z) <= 4
        details.append(f"delta={delta}: z={z:+.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    acceptance_report(5, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


def test_criterion_06_clique_number(acceptance_report):
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER)
    details, ok = [], True
    for k, pi in ((50, 0.5), (100, 0.5), (100, 0.3)):
        sizes = []
        for _ in range(20):
            upper = np.triu(rng.random((k, k)) < pi, 1)
            adj = upper | upper.T
            sizes.append(cz.max_clique_exact(cz.InterferenceGraph(tuple(range(k)), adj, pi)).size)
        pred = cz.clique_number_prediction(k, pi)
        mean = float(np.mean(sizes))
        ok &= abs(mean - pred) <= 2
        details.append(f"G({k},{pi}): {mean:.2f} vs {pred:.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 180
    acceptance_report(6, ok, "; ".join(details) + f" (band +-2), {elapsed:.1f}s")
    assert ok


def test_criterion_07_strategy2(acceptance_report):
    start = time.perf_counter()
    config = ex.ExperimentConfig(scenario="Strategy2", n=(10_000,), alpha=0.5, delta="auto", trials=50,
                                 master_seed=MASTER)
    result = ex.run_experiment(config)
    cell = result.cells[0]
    k_cmp = ex.compare_to_prediction(result.aggregates, "k_vs_centralized", cell)
    lam_cmp = ex.compare_to_prediction(result.aggregates, "lambda_vs_centralized", cell)
    # the harness raises on a per-link violation; recheck the stored margins anyway
    margins = [r.min_rate - r.link_bound for r in result.records if r.k]
    link_ok = all(m >= 0 for m in margins)
    elapsed = time.perf_counter() - start
    ok = k_cmp.within_band and lam_cmp.within_band and link_ok and elapsed < 180
    acceptance_report(7, ok, f"delta*={cell.delta:.4f}, k/k_hat = {k_cmp.ratio:.3f} [0.6, 1.4], "
                             f"min link margin {min(margins):.3g}, lambda/lambda_c = {lam_cmp.ratio:.3f} >= 0.5, "
                             f"{elapsed:.1f}s")
    assert ok


def test_criterion_08_tradeoff(acceptance_report):
    start = time.perf_counter()
    rows = ex.tradeoff_rows("both")
    dec = np.array([(k, lam) for s, _, _, k, lam in rows if s == "dec"])
    cent = np.array([(k, lam) for s, _, _, k, lam in rows if s == "cent"])
    dec_err = np.max(np.abs(dec[:, 1] - np.log1p(1 / dec[:, 0])))
    big = cent[:, 1] >= 1
    ordering = bool(big.any()) and bool(np.all(cent[big, 0] > 1 / np.expm1(cent[big, 1])))
    monotone = bool(np.all(np.diff(cent[:, 0]) > 0) and np.all(np.diff(cent[:, 1]) < 0))
    elapsed = time.perf_counter() - start
    ok = dec_err <= 1e-12 and ordering and monotone and elapsed < 30
    acceptance_report(8, ok, f"dec max error {dec_err:.1e}, ordering at {int(big.sum())} points with lambda>=1: "
                             f"{ordering}, monotone frontier ({len(cent)} points): {monotone}, {elapsed:.1f}s")
    assert ok


def test_criterion_09_lognormal(acceptance_report):
    start = time.perf_counter()
    ratios = []
    for S in (0.5, 1.0, 2.0):
        model = FadingModel.lognormal(0.0, S)
        t = math.exp(8 * S)
        ratios.append(lognormal_tail_approx(model, t) / tail_probability(model, t))
    tail_ok = all(abs(r - 1) <= 0.05 for r in ratios)

    worst = 0.0
    for S in (0.5, 1.0, 2.0):
        model = FadingModel.lognormal(0.0, S)
        for n in (1e3, 1e6, 1e12, math.exp(50)):
            for u in np.linspace(4 * S, 10 * S, 13):
                t = math.exp(u)
                nq = n * lognormal_tail_approx(model, t)
                direct = nq * math.log1p(t / (model.mu * nq))
                worst = max(worst, abs(scaling.lognormal_closed_sum_rate(n, u, S) / direct - 1))
    identity_ok = worst <= 1e-9

    n = math.exp(50)
    model = FadingModel.lognormal(0.0, 1.0)
    t_grid, _ = scaling.optimize_threshold(n, model)
    t_closed = scaling.lognormal_predictions(n, 0.0, 1.0).t_star
    opt_ok = abs(t_grid / t_closed - 1) <= 0.2
    elapsed = time.perf_counter() - start
    ok = tail_ok and identity_ok and opt_ok and elapsed < 10
    acceptance_report(9, ok, f"tail ratios {', '.join(f'{r:.4f}' for r in ratios)}; identity max rel err {worst:.1e}; "
                             f"t_grid/t_closed = {t_grid:.1f}/{t_closed:.1f} = {t_grid / t_closed:.3f} (need 0.8..1.2)")
    assert ok


def test_criterion_10_regimes(acceptance_report):
    L = 40.0
    n = math.exp(L)
    r_log = scaling.regime_classify(n, L).predicted_sum_rate / L
    r_sqrt = scaling.regime_classify(n, math.sqrt(n)).predicted_sum_rate / L
    r_log2 = scaling.regime_classify(n, L**2).predicted_sum_rate / L
    ok = abs(r_log - math.log(2)) <= 0.02 and abs(r_sqrt - 0.5) <= 0.05 and 0.85 <= r_log2 <= 1.0
    acceptance_report(10, ok, f"R/log n at k=log n: {r_log:.4f}, k=sqrt n: {r_sqrt:.4f}, k=log^2 n: {r_log2:.4f}")
    assert ok


def _naive_rates(G, p, eta):
    out = []
    for i in range(3):
        interference = sum(G[j][i] * p[j] for j in range(3) if j != i)
        out.append(math.log(1 + G[i][i] * p[i] / (eta + interference)))
    return out


def test_criterion_11_determinism_and_oracles(acceptance_report, tmp_path):
    start = time.perf_counter()
    paths = [str(tmp_path / f"run{i}.csv") for i in range(2)]
    for path in paths:
        ex.run_experiment(ex.ExperimentConfig(n=(2000,), t=("auto",), trials=20, master_seed=MASTER, output=path))
    same = all(open(p, "rb").read() == open(paths[0], "rb").read() for p in paths) and all(
        open(ex.aggregate_path(p), "rb").read() == open(ex.aggregate_path(paths[0]), "rb").read() for p in paths
    )

    worst = 0.0
    params = NetworkParams(3, P=1.0, eta=1.0)
    for s in range(50):
        G = sample_channel_matrix(3, RAYLEIGH, Seed(MASTER, s))
        for bits in itertools.product((0.0, 1.0), repeat=3):
            p = np.array(bits)
            got = evaluate(G, p, params).rates
            worst = max(worst, max(abs(a - b) for a, b in zip(got, _naive_rates(G.tolist(), bits, 1.0))))
    rates_ok = worst <= 1e-12

    rng = np.random.default_rng(MASTER)
    violations = 0
    for s in range(20):
        upper = np.triu(rng.random((60, 60)) < 0.5, 1)
        graph = cz.InterferenceGraph(tuple(range(60)), upper | upper.T, 0.5)
        greedy = cz.max_clique_greedy(graph, seed=Seed(MASTER, s))
        exact = cz.max_clique_exact(graph)
        violations += greedy.size > exact.size or not is_clique(graph.adjacency, sorted(greedy.members))
    elapsed = time.perf_counter() - start
    ok = same and rates_ok and violations == 0 and elapsed < 30
    acceptance_report(11, ok, f"byte-identical reruns: {same}; n=3 exhaustive max error {worst:.1e}; "
                              f"greedy > exact violations {violations}/20, {elapsed:.1f}s")
    assert ok
