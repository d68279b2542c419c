"""Clique-based scheduling at a single (n, alpha) with the optimal delta cap."""

import argparse

from fadingnet import centralized, experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--solver", choices=["auto", "exact", "greedy"], default="auto")
    args = ap.parse_args()

    config = experiments.ExperimentConfig(
        scenario="Strategy2", n=(args.n,), alpha=args.alpha, delta="auto", trials=args.trials,
        master_seed=args.seed, solver=args.solver,
    )
    result = experiments.run_experiment(config)
    cell = result.cells[0]
    pred = centralized.centralized_predictions(args.n, args.alpha, cell.delta)
    print(f"n={args.n} alpha={args.alpha} delta*={cell.delta:.5f} t={cell.t:.4f}")
    print(f"predicted k {pred.k_hat:.3f}, lambda_c {pred.lam:.4f}, sum-rate bound {pred.sum_rate_bound:.3f}")
    for kind in ("k_vs_centralized", "lambda_vs_centralized"):
        c = experiments.compare_to_prediction(result.aggregates, kind, cell)
        print(f"  {kind:<22s} empirical {c.empirical:8.4f}  predicted {c.predicted:8.4f}  ratio {c.ratio:6.3f}")
    margin = min(r.min_rate - r.link_bound for r in result.records if r.k)
    print(f"smallest per-link margin over the delta-cap bound: {margin:.4g}")


if __name__ == "__main__":
    main()
