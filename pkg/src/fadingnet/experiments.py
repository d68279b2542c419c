"""Seeded Monte Carlo harness.

Trial ``i`` of an experiment draws every channel gain from stream
``Seed(master_seed, i)``, so any trial can be replayed alone and the
per-trial table does not depend on worker count or execution order.

Strategy-1 trials never build the full ``n x n`` matrix: the diagonal is
sampled first and cross gains only among the active links.  Strategy-2
trials sample cross gains only inside the candidate pool.  Because entry
``(j, i)`` is a fixed function of the stream and its position, this lazy
sampling is exactly the full-matrix experiment restricted to the entries
that are ever observed.
"""

import csv
import dataclasses
import enum
import io
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Optional, Union

import numpy as np

from fadingnet import centralized, scaling
from fadingnet.decentralized import jensen_bound
from fadingnet.fading import (
    FadingModel,
    gain_scalar,
    sample_direct_gains,
    sample_gains,
    tail_probability,
    threshold_for_tail,
)
from fadingnet.network import NetworkParams, evaluate, on_off_powers
from fadingnet.rng import Seed

log = logging.getLogger(__name__)

TRIAL_COLUMNS = (
    "trial", "n", "model", "t", "delta", "k", "sum_rate", "rate_per_link", "mean_interference", "bound", "prediction",
)
AGGREGATE_COLUMNS = ("metric", "mean", "sd", "ci95_halfwidth", "trials")
TRADEOFF_COLUMNS = ("scheme", "alpha", "delta_star", "kappa", "lambda")
METRICS = ("k", "sum_rate", "rate_per_link", "mean_interference", "bound", "prediction")

# largest cross-gain block a single trial may sample
MAX_BLOCK_ENTRIES = 50_000_000


class Scenario(str, enum.Enum):
    STRATEGY1_THRESHOLD = "Strategy1Threshold"
    STRATEGY1_TOPK = "Strategy1TopK"
    STRATEGY2 = "Strategy2"
    THRESHOLD_SWEEP = "ThresholdSweep"
    N_SWEEP = "NSweep"
    TRADEOFF_CURVES = "TradeoffCurves"


class InvariantViolation(AssertionError):
    """A deterministic per-realization inequality failed."""


class TrialError(RuntimeError):
    pass


Auto = str
AUTO = "auto"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario = Scenario.STRATEGY1_THRESHOLD
    n: tuple = (1000,)
    model: str = "rayleigh"
    M: float = 0.0
    S: float = 1.0
    P: float = 1.0
    eta: float = 1.0
    t: tuple = (AUTO,)
    k: Optional[int] = None
    alpha: float = 0.5
    delta: Union[float, Auto] = AUTO
    trials: int = 30
    master_seed: int = 0
    output: Optional[str] = None
    solver: str = "auto"
    workers: int = 1
    verify_fraction: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        n = self.n if isinstance(self.n, (tuple, list)) else (self.n,)
        t = self.t if isinstance(self.t, (tuple, list)) else (self.t,)
        object.__setattr__(self, "n", tuple(int(x) for x in n))
        object.__setattr__(self, "t", tuple(x if x == AUTO else float(x) for x in t))
        if any(x < 1 for x in self.n):
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.fading_model()

    def fading_model(self) -> FadingModel:
        if self.model == "rayleigh":
            return FadingModel.rayleigh()
        if self.model == "lognormal":
            return FadingModel.lognormal(self.M, self.S)
        raise ValueError(f"unknown fading model {self.model!r}")


_FIELD_TYPES = {
    "scenario": Scenario, "n": "int_list", "model": str, "M": float, "S": float, "P": float, "eta": float,
    "t": "t_list", "k": int, "alpha": float, "delta": "float_or_auto", "trials": int, "master_seed": int,
    "output": str, "solver": str, "workers": int, "verify_fraction": float,
}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "int_list":
        return tuple(int(x) for x in raw.split(","))
    if kind == "t_list":
        return tuple(x.strip() if x.strip() == AUTO else float(x) for x in raw.split(","))
    if kind == "float_or_auto":
        return raw if raw == AUTO else float(raw)
    return kind(raw)


def parse_config_text(text: str, base: Optional[dict] = None) -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment; unknown keys are an error."""
    values = dict(base or {})
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


@dataclass(frozen=True)
class Cell:
    """One fully resolved (n, policy) setting of an experiment."""

    scenario: Scenario
    n: int
    model: FadingModel
    params: NetworkParams
    master_seed: int
    t: Optional[float] = None
    k: Optional[int] = None
    alpha: Optional[float] = None
    delta: Optional[float] = None
    solver: str = "auto"


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n: int
    model: str
    t: Optional[float]
    delta: Optional[float]
    k: int
    sum_rate: float
    rate_per_link: float
    mean_interference: float
    bound: float
    prediction: float
    # not persisted; Strategy-2 per-link check
    min_rate: Optional[float] = field(default=None, compare=False)
    link_bound: Optional[float] = field(default=None, compare=False)

    def row(self) -> list:
        return [fmt(getattr(self, c)) for c in TRIAL_COLUMNS]


def fmt(value) -> str:
    """Locale-independent CSV cell: integers verbatim, floats with 9 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.8e}"


def resolve(config: ExperimentConfig) -> list:
    """Expand a config into cells, resolving every ``auto`` once per (n, model)."""
    model = config.fading_model()
    cells = []
    scenario = config.scenario
    if scenario is Scenario.TRADEOFF_CURVES:
        return cells
    for n in config.n:
        params = NetworkParams(n, config.P, config.eta)
        base = dict(scenario=scenario, n=n, model=model, params=params, master_seed=config.master_seed)
        if scenario is Scenario.STRATEGY2:
            if config.delta == AUTO:
                delta, _ = centralized.optimize_delta(config.alpha)
            else:
                delta = float(config.delta)
            cells.append(Cell(**base, t=(1 - config.alpha) * math.log(n), alpha=config.alpha, delta=delta,
                              solver=config.solver))
        elif scenario is Scenario.STRATEGY1_TOPK:
            if config.k is None:
                raise ValueError("Strategy1TopK needs k")
            if not 0 <= config.k <= n:
                raise ValueError(f"k must lie in [0, {n}]")
            cells.append(Cell(**base, k=config.k))
        else:
            for t in config.t:
                if t == AUTO:
                    t, _ = scaling.optimize_threshold(n, model)
                cells.append(Cell(**base, t=float(t)))
    return cells


def _block(active, n, model, seed):
    if len(active) ** 2 > MAX_BLOCK_ENTRIES:
        raise ValueError(f"{len(active)} active links need a cross-gain block beyond the sampling cap")
    return sample_gains(active, active, n, model, seed)


def _strategy1(cell: Cell, index: int) -> TrialRecord:
    seed = Seed(cell.master_seed, index)
    direct = sample_direct_gains(cell.n, cell.model, seed)
    if cell.scenario is Scenario.STRATEGY1_TOPK:
        order = np.argsort(-direct, kind="stable")
        active = np.sort(order[: cell.k])
        # effective threshold: the best inactive gain (0 if all links are on)
        t = float(direct[order[cell.k]]) if cell.k < cell.n else 0.0
        prediction = scaling.analytic_sum_rate(cell.n, threshold_for_tail(cell.model, cell.k / cell.n), cell.model) \
            if cell.k else 0.0
    else:
        t = cell.t
        active = np.flatnonzero(direct > t)
        prediction = scaling.analytic_sum_rate(cell.n, t, cell.model)
    k = len(active)
    if k == 0:
        return TrialRecord(index, cell.n, cell.model.label(), t, None, 0, 0.0, 0.0, 0.0, 0.0, prediction)
    block = _block(active, cell.n, cell.model, seed)
    params = NetworkParams(k, cell.params.P, cell.params.eta)
    p = on_off_powers(np.ones(k, dtype=bool), params.P)
    report = evaluate(block, p, params)
    bound = jensen_bound(block, p, t, params)
    if report.sum_rate < bound:
        raise InvariantViolation(f"sum-rate {report.sum_rate} below the Jensen bound {bound}")
    return TrialRecord(
        index, cell.n, cell.model.label(), t, None, k, report.sum_rate, report.rate_per_link,
        report.mean_interference, bound, prediction,
    )


def _strategy2(cell: Cell, index: int) -> TrialRecord:
    seed = Seed(cell.master_seed, index)
    direct = sample_direct_gains(cell.n, cell.model, seed)
    pool = centralized.candidate_pool(direct, cell.n, cell.alpha)
    prediction = centralized.centralized_predictions(cell.n, cell.alpha, cell.delta).sum_rate_bound
    t = cell.t
    if len(pool) == 0:
        return TrialRecord(index, cell.n, cell.model.label(), t, cell.delta, 0, 0.0, 0.0, 0.0, 0.0, prediction)
    block = _block(pool, cell.n, cell.model, seed)
    graph = centralized.graph_from_block(block, pool, cell.delta, cell.model)
    graph.check()
    result = centralized.solve_clique(graph, cell.solver, seed)
    positions = np.array(sorted(graph.vertices.index(v) for v in result.members))
    sub = block[np.ix_(positions, positions)]
    k = len(positions)
    params = NetworkParams(k, cell.params.P, cell.params.eta)
    report = evaluate(sub, on_off_powers(np.ones(k, dtype=bool), params.P), params)
    link_bound = math.log1p(t / (params.rho + (k - 1) * cell.delta))
    min_rate = float(report.rates.min())
    if min_rate < link_bound:
        raise InvariantViolation(f"link rate {min_rate} below the delta-cap bound {link_bound}")
    return TrialRecord(
        index, cell.n, cell.model.label(), t, cell.delta, k, report.sum_rate, report.rate_per_link,
        report.mean_interference, k * link_bound, prediction, min_rate=min_rate, link_bound=link_bound,
    )


def run_trial(cell: Union[Cell, ExperimentConfig], index: int) -> TrialRecord:
    """One seeded realization; a pure function of ``(cell, index)``."""
    if isinstance(cell, ExperimentConfig):
        cells = resolve(cell)
        if len(cells) != 1:
            raise ValueError("run_trial needs a config that resolves to a single cell")
        cell = cells[0]
    try:
        if cell.scenario is Scenario.STRATEGY2:
            return _strategy2(cell, index)
        return _strategy1(cell, index)
    except Exception as exc:
        raise TrialError(f"trial {index}: {exc}") from exc


def spot_check_activation(cell: Cell, index: int, record: TrialRecord) -> None:
    """Recompute the threshold active set through the scalar sampling path."""
    seed = Seed(cell.master_seed, index)
    k = sum(gain_scalar(i, i, cell.n, cell.model, seed) > cell.t for i in range(cell.n))
    if k != record.k:
        raise InvariantViolation(f"trial {index}: scalar path activates {k} links, vector path {record.k}")


@dataclass(frozen=True)
class Aggregate:
    metric: str
    mean: float
    sd: float
    ci95_halfwidth: float
    trials: int

    def row(self) -> list:
        return [self.metric, fmt(self.mean), fmt(self.sd), fmt(self.ci95_halfwidth), str(self.trials)]


def aggregate(values, metric: str) -> Aggregate:
    """Mean, sample sd and normal 95% half-width; exact-sum so order does not matter."""
    xs = [float(v) for v in values]
    m = len(xs)
    mean = math.fsum(xs) / m
    sd = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (m - 1)) if m > 1 else 0.0
    return Aggregate(metric, mean, sd, 1.96 * sd / math.sqrt(m), m)


def aggregate_records(records, prefix: str = "") -> dict:
    return {prefix + name: aggregate([getattr(r, name) for r in records], prefix + name) for name in METRICS}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list
    records: list
    aggregates: dict
    tradeoff: list = field(default_factory=list)

    def cell_records(self, cell_index: int) -> list:
        trials = self.config.trials
        return self.records[cell_index * trials:(cell_index + 1) * trials]


def _cell_label(cell: Cell, multi: bool) -> str:
    if not multi:
        return ""
    parts = [f"n={cell.n}"]
    if cell.scenario in (Scenario.THRESHOLD_SWEEP, Scenario.N_SWEEP, Scenario.STRATEGY1_THRESHOLD):
        parts.append(f"t={cell.t:.8e}")
    return "[" + ",".join(parts) + "]:"


def _run_cell(cell: Cell, config: ExperimentConfig) -> list:
    indices = range(config.trials)
    if config.workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(partial(run_trial, cell), indices, chunksize=max(1, config.trials // (4 * config.workers))))
    else:
        records = [run_trial(cell, i) for i in indices]
    if cell.scenario is not Scenario.STRATEGY2 and cell.scenario is not Scenario.STRATEGY1_TOPK and config.verify_fraction > 0:
        stride = max(1, round(1 / config.verify_fraction))
        for i in range(0, config.trials, stride):
            spot_check_activation(cell, i, records[i])
    return records


def tradeoff_rows(scheme: str = "both", alphas=None, kappas=None) -> list:
    """Rows of the tradeoff table: decentralized curve and/or centralized frontier."""
    rows = []
    if scheme in ("dec", "both"):
        kappas = np.geomspace(0.01, 100.0, 64) if kappas is None else np.asarray(kappas, dtype=float)
        for kappa in kappas:
            rows.append(("dec", None, None, float(kappa), scaling.tradeoff_decentralized(float(kappa))))
    if scheme in ("cent", "both"):
        for p in centralized.tradeoff_centralized(alphas):
            rows.append(("cent", p.alpha, p.delta_star, p.kappa, p.lam))
    if scheme not in ("dec", "cent", "both"):
        raise ValueError(f"unknown scheme {scheme!r}")
    return rows


def aggregate_path(output: str) -> str:
    root, ext = os.path.splitext(output)
    return f"{root}.aggregate{ext or '.csv'}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_atomic(files: dict) -> None:
    """Write every ``path -> text`` to a temporary sibling, then promote them all."""
    staged = []
    try:
        for path, text in files.items():
            directory = os.path.dirname(os.path.abspath(path))
            fd, tmp = tempfile.mkstemp(prefix=".partial-", dir=directory)
            staged.append((tmp, path))
            try:
                fh = os.fdopen(fd, "w", encoding="utf-8", newline="")
            except BaseException:
                os.close(fd)
                raise
            with fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def tradeoff_csv(rows) -> str:
    return _csv_text(TRADEOFF_COLUMNS, ([scheme, fmt(a), fmt(d), fmt(k), fmt(lam)] for scheme, a, d, k, lam in rows))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    if config.scenario is Scenario.TRADEOFF_CURVES:
        rows = tradeoff_rows("both")
        if config.output:
            write_atomic({config.output: tradeoff_csv(rows)})
        return ExperimentResult(config, [], [], {}, rows)

    cells = resolve(config)
    multi = len(cells) > 1
    records, aggregates = [], {}
    for cell in cells:
        cell_records = _run_cell(cell, config)
        records.extend(cell_records)
        aggregates.update(aggregate_records(cell_records, _cell_label(cell, multi)))

    if config.output:
        trial_rows = (r.row() for r in records)
        agg_rows = [a.row() for a in aggregates.values()]
        agg_rows.append(["master_seed", str(config.master_seed), "0", "0", str(config.trials)])
        write_atomic({
            config.output: _csv_text(TRIAL_COLUMNS, trial_rows),
            aggregate_path(config.output): _csv_text(AGGREGATE_COLUMNS, agg_rows),
        })
    return ExperimentResult(config, cells, records, aggregates)


@dataclass(frozen=True)
class Comparison:
    kind: str
    empirical: float
    predicted: float
    ratio: float
    difference: float
    ci95_halfwidth: float
    band: tuple
    within_band: bool


# kind -> (metric, default ratio band)
PREDICTION_KINDS = {
    "k_vs_nq": ("k", (0.98, 1.02)),
    "k_vs_rayleigh": ("k", (0.85, 1.15)),
    "lambda_vs_rayleigh": ("rate_per_link", (0.8, 1.25)),
    "sum_rate_vs_analytic": ("sum_rate", (0.9, math.inf)),
    "k_vs_centralized": ("k", (0.6, 1.4)),
    "lambda_vs_centralized": ("rate_per_link", (0.5, math.inf)),
}


def predicted_value(kind: str, cell: Cell) -> float:
    if kind == "k_vs_nq":
        return cell.n * tail_probability(cell.model, cell.t)
    if kind == "k_vs_rayleigh":
        return scaling.rayleigh_predictions(cell.n).k_pred
    if kind == "lambda_vs_rayleigh":
        return scaling.rayleigh_predictions(cell.n).lambda_pred
    if kind == "sum_rate_vs_analytic":
        return scaling.analytic_sum_rate(cell.n, cell.t, cell.model)
    pred = centralized.centralized_predictions(cell.n, cell.alpha, cell.delta)
    if kind == "k_vs_centralized":
        return pred.k_hat
    if kind == "lambda_vs_centralized":
        return pred.lam
    raise ValueError(f"unknown prediction kind {kind!r}")


def compare_to_prediction(aggregates: dict, kind: str, cell: Cell, band: Optional[tuple] = None) -> Comparison:
    metric, default_band = PREDICTION_KINDS[kind]
    band = default_band if band is None else band
    agg = aggregates[metric]
    predicted = predicted_value(kind, cell)
    ratio = agg.mean / predicted
    return Comparison(kind, agg.mean, predicted, ratio, agg.mean - predicted, agg.ci95_halfwidth, band,
                      band[0] <= ratio <= band[1])


def replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return dataclasses.replace(config, **changes)
