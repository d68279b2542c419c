"""Optimal threshold and Strategy-1 statistics under Rayleigh fading.

Prints the grid optimum against the closed-form threshold over a range of
log n, then a Monte Carlo run at a simulated n against the leading-order
predictions.
"""

import argparse
import math

from fadingnet import experiments, scaling
from fadingnet.fading import RAYLEIGH


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100_000, help="simulated network size")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print(f"{'log n':>6} {'t grid':>10} {'t closed':>10} {'gap':>8} {'nq at t*':>10} {'log^2n/2':>10}")
    for L in (5, 10, 20, 30, 40, 60, 100):
        n = math.exp(L)
        t, _ = scaling.optimize_threshold(n, RAYLEIGH)
        pred = scaling.rayleigh_predictions(n)
        print(f"{L:6d} {t:10.4f} {pred.t_star:10.4f} {t - pred.t_star:8.4f} {n * math.exp(-t):10.2f} {pred.k_pred:10.2f}")

    config = experiments.ExperimentConfig(n=(args.n,), t=("auto",), trials=args.trials, master_seed=args.seed)
    result = experiments.run_experiment(config)
    cell = result.cells[0]
    print(f"\nn={args.n}, t*={cell.t:.4f}, {args.trials} trials")
    for kind in ("k_vs_nq", "k_vs_rayleigh", "lambda_vs_rayleigh", "sum_rate_vs_analytic"):
        c = experiments.compare_to_prediction(result.aggregates, kind, cell)
        flag = "ok" if c.within_band else "outside band"
        print(f"  {kind:<22s} empirical {c.empirical:10.4f}  predicted {c.predicted:10.4f}  ratio {c.ratio:6.3f}  {flag}")


if __name__ == "__main__":
    main()
