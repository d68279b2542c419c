"""Command-line entry point: ``fadingnet <subcommand> ...``.

Exit codes: 0 success, 1 domain error or failed self-check, 2 usage error.
"""

import argparse
import math
import os
import sys
import time

import numpy as np

from fadingnet import centralized, clique, experiments, scaling
from fadingnet.fading import FadingModel, sample_channel_matrix, tail_probability
from fadingnet.optimize import OptimizationError
from fadingnet.rng import Seed


class UsageError(Exception):
    pass


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _add_model(p):
    p.add_argument("--model", choices=["rayleigh", "lognormal"], default="rayleigh")
    p.add_argument("--M", type=float, default=0.0, help="log-normal location")
    p.add_argument("--S", type=positive_float, default=1.0, help="log-normal scale")


def _model(args) -> FadingModel:
    return FadingModel.rayleigh() if args.model == "rayleigh" else FadingModel.lognormal(args.M, args.S)


def _n_value(args) -> float:
    if args.n is not None and args.log_n is not None:
        raise UsageError("give either --n or --log-n, not both")
    if args.log_n is not None:
        return math.exp(args.log_n)
    if args.n is None:
        raise UsageError("--n or --log-n is required")
    return float(args.n)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fadingnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a seeded Monte Carlo experiment")
    p.add_argument("--config", help="key = value experiment file")
    p.add_argument("--scenario", choices=[s.value for s in experiments.Scenario])
    p.add_argument("--model", choices=["rayleigh", "lognormal"])
    p.add_argument("--M", type=float)
    p.add_argument("--S", type=positive_float)
    p.add_argument("--n", type=positive_int, nargs="+")
    p.add_argument("--t", "--threshold", dest="t", nargs="+", help="threshold(s) or 'auto'")
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", help="delta cap or 'auto'")
    p.add_argument("--P", "--power", dest="P", type=positive_float)
    p.add_argument("--eta", "--noise", dest="eta", type=float)
    p.add_argument("--trials", type=positive_int)
    p.add_argument("--seed", "--master-seed", dest="master_seed", type=int)
    p.add_argument("--solver", choices=["auto", "exact", "greedy"])
    p.add_argument("--out", "--output", dest="output")
    p.add_argument("--workers", type=positive_int, default=None,
                   help="worker processes (default: available parallelism)")

    p = sub.add_parser("analytic", help="tabulate the analytic sum-rate R(t)")
    _add_model(p)
    p.add_argument("--n", type=positive_float)
    p.add_argument("--log-n", type=float)
    p.add_argument("--sweep-t", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--out", "--output", dest="output")

    p = sub.add_parser("optimize-threshold", help="maximize the analytic sum-rate over t")
    _add_model(p)
    p.add_argument("--n", type=positive_float)
    p.add_argument("--log-n", type=float)

    p = sub.add_parser("optimize-delta", help="maximize the centralized sum-rate coefficient over delta")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=positive_float)
    p.add_argument("--log-n", type=float)

    p = sub.add_parser("tradeoff", help="rate-per-link versus active-link tradeoff curves")
    p.add_argument("--scheme", choices=["dec", "cent", "both"], default="both")
    p.add_argument("--out", "--output", dest="output")

    p = sub.add_parser("regimes", help="classify (n, k) pairs into sum-rate regimes")
    p.add_argument("--n", type=positive_float)
    p.add_argument("--log-n", type=float)
    p.add_argument("--k", type=positive_float, nargs="+", required=True)

    p = sub.add_parser("selfcheck", help="quick end-to-end consistency checks")
    p.add_argument("--inject-fault", choices=["graph-symmetry"], help=argparse.SUPPRESS)
    return parser


def _simulate_config(args) -> experiments.ExperimentConfig:
    inline = {
        key: getattr(args, key)
        for key in ("scenario", "model", "M", "S", "n", "t", "k", "alpha", "delta", "P", "eta", "trials",
                    "master_seed", "solver", "output")
        if getattr(args, key) is not None
    }
    if args.config:
        if inline:
            raise UsageError(f"--config conflicts with inline flags: {', '.join(sorted(inline))}")
        config = experiments.load_config(args.config)
    else:
        if "n" not in inline:
            raise UsageError("--n is required without --config")
        if "t" in inline:
            inline["t"] = tuple(x if x == experiments.AUTO else float(x) for x in inline["t"])
        if "delta" in inline and inline["delta"] != experiments.AUTO:
            inline["delta"] = float(inline["delta"])
        if "scenario" not in inline:
            if "k" in inline:
                inline["scenario"] = experiments.Scenario.STRATEGY1_TOPK
            elif len(inline.get("t", ())) > 1:
                inline["scenario"] = experiments.Scenario.THRESHOLD_SWEEP
            elif len(inline["n"]) > 1:
                inline["scenario"] = experiments.Scenario.N_SWEEP
        config = experiments.ExperimentConfig(**inline)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    return experiments.replace(config, workers=workers)


def cmd_simulate(args) -> int:
    config = _simulate_config(args)
    result = experiments.run_experiment(config)
    if config.scenario is experiments.Scenario.TRADEOFF_CURVES:
        print(f"tradeoff rows: {len(result.tradeoff)}")
    else:
        print(f"scenario {config.scenario.value}, model {config.fading_model().label()}, "
              f"{config.trials} trials, master seed {config.master_seed}")
        for cell in result.cells:
            print(f"  n={cell.n} t={cell.t} delta={cell.delta} k={cell.k}")
        for agg in result.aggregates.values():
            print(f"  {agg.metric:<40s} mean {agg.mean:12.6g}  sd {agg.sd:10.4g}  +/- {agg.ci95_halfwidth:.4g}")
    if config.output:
        print(f"wrote {config.output}")
        if config.scenario is not experiments.Scenario.TRADEOFF_CURVES:
            print(f"wrote {experiments.aggregate_path(config.output)}")
    return 0


def _parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed sweep {text!r}; expected MIN:MAX:STEPS")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"malformed sweep {text!r}: {exc}") from exc
    if steps < 2 or lo < 0 or hi <= lo:
        raise UsageError(f"malformed sweep {text!r}; need 0 <= MIN < MAX and STEPS >= 2")
    return np.linspace(lo, hi, steps)


def cmd_analytic(args) -> int:
    n = _n_value(args)
    ts = _parse_sweep(args.sweep_t)
    model = _model(args)
    q = tail_probability(model, ts)
    R = scaling.analytic_sum_rate(n, ts, model)
    i = int(np.argmax(R))
    print(f"n={n:.6g} model={model.label()}: peak R={R[i]:.6g} at t={ts[i]:.6g} ({len(ts)} rows)")
    if args.output:
        rows = [[experiments.fmt(float(a)), experiments.fmt(float(b)), experiments.fmt(float(c))] for a, b, c in zip(ts, q, R)]
        experiments.write_atomic({args.output: experiments._csv_text(("t", "q", "R"), rows)})
        print(f"wrote {args.output}")
    return 0


def cmd_optimize_threshold(args) -> int:
    n = _n_value(args)
    model = _model(args)
    t_star, r_star = scaling.optimize_threshold(n, model)
    print(f"t_star {t_star:.9g}")
    print(f"R_star {r_star:.9g}")
    if n >= 3:
        pred = scaling.rayleigh_predictions(n) if model.is_rayleigh else scaling.lognormal_predictions(n, model.M, model.S)
        print(f"closed-form t_star {pred.t_star:.9g}")
    return 0


def cmd_optimize_delta(args) -> int:
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    delta_star, coef = centralized.optimize_delta(args.alpha)
    pred = centralized.centralized_predictions(math.e, args.alpha, delta_star)
    print(f"delta_star {delta_star:.9g}")
    print(f"coefficient {coef:.9g}")
    print(f"kappa {pred.kappa:.9g}")
    print(f"lambda {pred.lam:.9g}")
    if args.n is not None or args.log_n is not None:
        n = _n_value(args)
        print(f"predicted active links {pred.kappa * math.log(n):.9g}")
    return 0


def cmd_tradeoff(args) -> int:
    rows = experiments.tradeoff_rows(args.scheme)
    print(f"{len(rows)} rows ({args.scheme})")
    text = experiments.tradeoff_csv(rows)
    if args.output:
        experiments.write_atomic({args.output: text})
        print(f"wrote {args.output}")
    return 0


def cmd_regimes(args) -> int:
    n = _n_value(args)
    L = math.log(n)
    for k in args.k:
        regime = scaling.regime_classify(n, k)
        alpha = "" if regime.alpha is None else f" alpha={regime.alpha:.4g}"
        print(f"k={k:<12.6g} {regime.kind.value:<10s}{alpha}  R/log n = {regime.predicted_sum_rate / L:.6f}")
    return 0


def _selfcheck_items(fault):
    from fadingnet.decentralized import ThresholdPolicy, jensen_bound, strategy1_activate
    from fadingnet.network import NetworkParams, evaluate

    def moments():
        g = sample_channel_matrix(500, FadingModel.rayleigh(), Seed(1))
        assert abs(g.mean() - 1) < 0.01, g.mean()
        ln = FadingModel.lognormal(0, 0.5)
        g = sample_channel_matrix(500, ln, Seed(2))
        assert abs(g.mean() - ln.mu) < 0.01, g.mean()

    def jensen():
        model = FadingModel.rayleigh()
        n = 200
        t, _ = scaling.optimize_threshold(n, model)
        params = NetworkParams(n)
        for s in range(100):
            G = sample_channel_matrix(n, model, Seed(3, s))
            p = strategy1_activate(G, ThresholdPolicy.for_model(model, t), params)
            if p.any():
                assert evaluate(G, p, params).sum_rate >= jensen_bound(G, p, t, params)

    def edge_probability():
        delta = 1.0
        G = sample_channel_matrix(300, FadingModel.rayleigh(), Seed(4))
        small = G <= delta
        both = small & small.T
        iu = np.triu_indices(300, 1)
        freq = both[iu].mean()
        pi = centralized.edge_probability(delta)
        sd = math.sqrt(pi * (1 - pi) / len(iu[0]))
        assert abs(freq - pi) < 4 * sd, (freq, pi)

    def graph_symmetry():
        G = sample_channel_matrix(60, FadingModel.rayleigh(), Seed(5))
        graph = centralized.build_graph(G, np.arange(60), 1.0)
        if fault == "graph-symmetry":
            adj = graph.adjacency.copy()
            i, j = np.argwhere(adj)[0]
            adj[i, j] = False
            graph = centralized.InterferenceGraph(graph.vertices, adj, graph.pi)
        graph.check()

    def exact_clique():
        from itertools import combinations

        rs = np.random.default_rng(6)
        for _ in range(10):
            m = 10
            upper = np.triu(rs.random((m, m)) < 0.5, 1)
            adj = upper | upper.T
            exact = len(clique.max_clique_positions(adj))
            brute = max(
                size for size in range(1, m + 1)
                for sub in combinations(range(m), size)
                if all(adj[a, b] for a, b in combinations(sub, 2))
            )
            assert exact == brute, (exact, brute)

    return [("moments", moments), ("jensen", jensen), ("edge-probability", edge_probability),
            ("graph-symmetry", graph_symmetry), ("exact-clique", exact_clique)]


def cmd_selfcheck(args) -> int:
    failed = []
    for name, check in _selfcheck_items(args.inject_fault):
        start = time.perf_counter()
        try:
            check()
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - every failure is reported by name
            status = f"FAIL ({exc})"
            failed.append(name)
        print(f"{name:<18s} {status}  {time.perf_counter() - start:.2f}s")
    if failed:
        print(f"failed checks: {', '.join(failed)}")
        return 1
    print("all checks passed")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "optimize-threshold": cmd_optimize_threshold,
    "optimize-delta": cmd_optimize_delta,
    "tradeoff": cmd_tradeoff,
    "regimes": cmd_regimes,
    "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fadingnet: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OptimizationError, experiments.TrialError) as exc:
        print(f"fadingnet: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
