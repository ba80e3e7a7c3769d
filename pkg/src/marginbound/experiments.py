"""Experiment configuration and the pipelines behind the command-line tools.

A run trains one ensemble per repetition, evaluates the requested bounds on
every ``every``-th round, averages the rows over repetitions and writes a
``BoundReport`` CSV.  Each repetition draws from its own child stream
``rep/<r>`` of the configured seed, so results do not depend on the order
in which repetitions run.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .data import (IntervalsConcept, LabeledDataset, gen_boolean_dnf, gen_intervals, gen_twonorm,
                   load_csv, save_csv, split)
from .dimension import DeltaBoundParams, WeightSpectrum, bound_args, delta_dimension, eps_n, \
    log_inv_delta_hat, normalized_eps, optimal_dimension, weighted_eps
from .doomlp import choose_delta, default_delta_grid, doom_lp, margin_cost, margin_matrix, \
    rademacher_margin_bound
from .ensemble import ConvexCombination, TrainingTrace, adaboost, bagging, evaluate, \
    exact_margin_distribution, exact_oracle_1d
from .errors import ConfigError, DataError
from .margins import BoundParams, MarginProfile, gamma_bound, gamma_margin, vc_psi_bound
from .rng import RngState
from .stumps import class_meta, rademacher_complexity

DATASETS = ("intervals", "twonorm", "boolean", "csv")
ALGORITHMS = ("adaboost", "bagging")
BOUNDS = ("gamma", "delta", "weighted", "normalized", "vc-psi", "doom-lp")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; JSON keys are the field names in kebab-case.

    ``gammas`` entries are numbers, fraction strings such as ``"2/3"``, or
    ``"min"`` for the smallest gamma admissible for stumps in the dataset
    dimension.  ``alpha`` defaults to the stump-class value for that
    dimension.  ``test_n`` sizes the independent test sample for twonorm;
    boolean and csv data are split by ``train_fraction`` instead.
    """

    dataset: str = "intervals"
    n: int = 1000
    num_intervals: int = 20
    dim: int = 20
    test_n: int = 20000
    noise: float = 0.05
    csv_path: str | None = None
    label_column: int | str = -1
    positive_label: str = "1"
    header: bool = False
    train_fraction: float = 0.9
    algorithm: str = "adaboost"
    rounds: int = 500
    gammas: tuple = (1, 0.8, "2/3")
    bounds: tuple = ("gamma", "delta")
    zeta: float = 0.5
    k: float = 1.14
    t: float = 1.0
    alpha: float | None = None
    rademacher_draws: int = 1000
    seed: int = 0
    repetitions: int = 1
    every: int = 1
    output_dir: str = "out"

    def __post_init__(self):
        bad = []
        if self.dataset not in DATASETS:
            bad.append(f"dataset must be one of {', '.join(DATASETS)}")
        if self.dataset == "csv" and not self.csv_path:
            bad.append("dataset 'csv' needs csv-path")
        if self.algorithm not in ALGORITHMS:
            bad.append(f"algorithm must be one of {', '.join(ALGORITHMS)}")
        for key in ("n", "num_intervals", "dim", "test_n", "rounds", "repetitions", "every",
                    "rademacher_draws"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                bad.append(f"{key.replace('_', '-')} must be a positive integer")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            bad.append("seed must be an integer in [0, 2^64)")
        unknown = [b for b in self.bounds if b not in BOUNDS]
        if unknown:
            bad.append(f"unknown bounds {unknown}; choose from {', '.join(BOUNDS)}")
        if not 0 <= self.zeta <= 1:
            bad.append("zeta must lie in [0, 1]")
        if not self.k > 0 or not self.t > 0:
            bad.append("k and t must be positive")
        if not 0 <= self.noise < 0.5:
            bad.append("noise must lie in [0, 1/2)")
        if not 0 < self.train_fraction < 1:
            bad.append("train-fraction must lie in (0, 1)")
        if self.alpha is not None and not 0 < self.alpha < 2:
            bad.append("alpha must lie in (0, 2)")
        for g in self.gammas:
            try:
                v = _gamma_value(g, 1)
            except (ValueError, ZeroDivisionError):
                bad.append(f"cannot read gamma {g!r}")
                continue
            if not 0 < v <= 1:
                bad.append(f"gamma {g!r} outside (0, 1]")
        if bad:
            raise ConfigError("; ".join(bad))

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        names = {f.name.replace("_", "-"): f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - set(names))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {names[k]: v for k, v in raw.items()}
        for key in ("gammas", "bounds"):
            if key in kwargs:
                if not isinstance(kwargs[key], list):
                    raise ConfigError(f"{key} must be a list")
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name.replace("_", "-")] = list(v) if isinstance(v, tuple) else v
        return out

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    @property
    def feature_dim(self) -> int:
        return {"intervals": 1}.get(self.dataset, self.dim)


def _gamma_value(token, dim: int) -> float:
    if token == "min":
        return class_meta(dim).gamma_min
    if isinstance(token, str):
        return float(Fraction(token))
    return float(token)


def _gamma_label(token) -> str:
    return token if isinstance(token, str) else f"{token:g}"


@dataclass(frozen=True)
class Problem:
    """Training data plus whatever measures the true error for it."""

    train: LabeledDataset
    test: LabeledDataset | None = None
    concept: IntervalsConcept | None = None

    def true_error(self, f: ConvexCombination) -> float:
        if self.concept is not None:
            return exact_oracle_1d(f, self.concept)
        return evaluate(f, self.test)[1]


def make_problem(cfg: ExperimentConfig, rng: RngState) -> Problem:
    if cfg.dataset == "intervals":
        ds, concept = gen_intervals(cfg.num_intervals, cfg.n, rng.child("train"))
        return Problem(ds, concept=concept)
    if cfg.dataset == "twonorm":
        return Problem(gen_twonorm(cfg.n, cfg.dim, rng.child("train")),
                       gen_twonorm(cfg.test_n, cfg.dim, rng.child("test")))
    if cfg.dataset == "boolean":
        full = gen_boolean_dnf(cfg.n, cfg.dim, rng.child("data"), cfg.noise)
    else:
        full = load_csv(cfg.csv_path, cfg.label_column, cfg.positive_label, cfg.header)
    train, test = split(full, cfg.train_fraction, rng.child("split"))
    return Problem(train, test)


def train_ensemble(cfg: ExperimentConfig, ds: LabeledDataset, rng: RngState) -> TrainingTrace:
    if cfg.algorithm == "adaboost":
        return adaboost(ds, cfg.rounds)
    return bagging(ds, cfg.rounds, rng.child("bagging"))


def report_rounds(num_rounds: int, every: int) -> list[int]:
    """Rounds ``every, 2 every, ...`` plus round 1 and the last round."""
    rounds = set(range(every, num_rounds + 1, every)) | {1, num_rounds}
    return sorted(rounds)


def report_columns(cfg: ExperimentConfig) -> list[str]:
    cols = ["round", "train_error", "exact_error" if cfg.dataset == "intervals" else "test_error"]
    if "gamma" in cfg.bounds:
        for g in cfg.gammas:
            lab = _gamma_label(g)
            cols += [f"gamma_bound_{lab}", f"gamma_margin_{lab}"]
    if "delta" in cfg.bounds:
        cols += ["delta_bound", "delta_hat", "log_inv_delta_hat", "delta_dim"]
    if "weighted" in cfg.bounds:
        cols.append("weighted_bound")
    if "normalized" in cfg.bounds:
        cols.append("normalized_bound")
    if "vc-psi" in cfg.bounds:
        cols.append("vc_psi_bound")
    if "doom-lp" in cfg.bounds:
        cols += ["rademacher_bound", "rademacher_delta"]
    return cols


def delta_params(cfg: ExperimentConfig, n: int, T: int) -> DeltaBoundParams:
    alpha = cfg.alpha if cfg.alpha is not None else class_meta(cfg.feature_dim).alpha
    return DeltaBoundParams(alpha=alpha, n=n, t=cfg.t, zeta=cfg.zeta, K=cfg.k, T=T)


def evaluate_round(cfg: ExperimentConfig, problem: Problem, f: ConvexCombination, t: int,
                   rad_estimate: float | None = None) -> dict:
    """All requested report values for the combination after round ``t``."""
    ds = problem.train
    margins, train_err = evaluate(f, ds)
    profile = MarginProfile.from_margins(margins)
    n = ds.n
    row = {"round": t, "train_error": train_err}
    row["exact_error" if cfg.dataset == "intervals" else "test_error"] = problem.true_error(f)
    if "gamma" in cfg.bounds:
        for g in cfg.gammas:
            lab = _gamma_label(g)
            gv = _gamma_value(g, cfg.feature_dim)
            row[f"gamma_bound_{lab}"] = gamma_bound(profile, gv, n)
            row[f"gamma_margin_{lab}"] = gamma_margin(profile, gv, n)
    if {"delta", "weighted", "normalized"} & set(cfg.bounds):
        spec = WeightSpectrum.from_combination(f)
        params = delta_params(cfg, n, t)
        u = log_inv_delta_hat(profile, spec, params)
        finite = math.isfinite(u)
        dlt, log_inv = bound_args(u) if finite else (0.0, None)
        if "delta" in cfg.bounds:
            row["delta_hat"] = math.exp(-u)
            row["log_inv_delta_hat"] = u
            if finite:
                row["delta_bound"] = eps_n(spec, dlt, params, log_inv)
                row["delta_dim"] = optimal_dimension(spec, dlt, params, log_inv)[1]
            else:
                row["delta_bound"] = row["delta_dim"] = math.inf
        if "weighted" in cfg.bounds:
            row["weighted_bound"] = (weighted_eps(spec, dlt, params, log_inv_delta=log_inv)
                                     if finite else math.inf)
        if "normalized" in cfg.bounds:
            row["normalized_bound"] = normalized_eps(spec, dlt, params, log_inv) if finite else math.inf
    if "vc-psi" in cfg.bounds:
        row["vc_psi_bound"] = vc_psi_bound(profile, BoundParams(n, cfg.t))
    if "doom-lp" in cfg.bounds:
        d, v = rademacher_margin_bound(profile, rad_estimate, cfg.t, default_delta_grid())
        row["rademacher_bound"], row["rademacher_delta"] = v, d
    return row


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        raise ValueError("NaN in report")
    return repr(v)


def write_csv(path, columns, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(columns)
        for row in rows:
            out.writerow([format_value(row[c]) for c in columns])


def read_csv_columns(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Header and float columns of a report CSV (``inf`` parses as infinity)."""
    try:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = rows[0]
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise DataError(f"{path}: ragged rows")
    return header, {h: data[:, j] for j, h in enumerate(header)}


def _average(rows_per_rep: list[list[dict]], columns: list[str]) -> list[dict]:
    """Column-wise mean over repetitions, truncated to the shortest run."""
    length = min(len(r) for r in rows_per_rep)
    out = []
    for i in range(length):
        row = {"round": rows_per_rep[0][i]["round"]}
        for c in columns[1:]:
            vals = [rep[i][c] for rep in rows_per_rep]
            row[c] = vals[0] if len(vals) == 1 else float(np.mean(vals))
        out.append(row)
    return out


def run_experiment(cfg: ExperimentConfig, progress=None) -> Path:
    """Train, evaluate and write ``bounds.csv``, ``bounds.svg`` and per-repetition artifacts."""
    from .plotting import line_chart

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    root = RngState(cfg.seed)
    columns = report_columns(cfg)
    per_rep = []
    for r in range(cfg.repetitions):
        rng = root.child(f"rep/{r}")
        problem = make_problem(cfg, rng)
        trace = train_ensemble(cfg, problem.train, rng)
        rad = None
        if "doom-lp" in cfg.bounds:
            rad, _ = rademacher_complexity(problem.train, cfg.rademacher_draws, rng.child("rademacher"))
        repdir = outdir / f"rep{r}"
        repdir.mkdir(exist_ok=True)
        trace.save(repdir / "trace.csv")
        trace.combination().save(repdir / "model.txt")
        save_csv(problem.train, repdir / "train.csv")
        if problem.test is not None:
            save_csv(problem.test, repdir / "test.csv")
        rows = []
        for t in report_rounds(len(trace), cfg.every):
            rows.append(evaluate_round(cfg, problem, trace.combination(t), t, rad))
            if progress:
                progress(r, t)
        per_rep.append(rows)
    rows = _average(per_rep, columns)
    path = outdir / "bounds.csv"
    write_csv(path, columns, rows)
    plotted = [c for c in columns[1:] if not c.startswith(("gamma_margin", "delta_hat", "log_inv",
                                                           "delta_dim", "rademacher_delta"))]
    x = np.array([row["round"] for row in rows], dtype=float)
    line_chart(x, {c: np.array([row[c] for row in rows], dtype=float) for c in plotted},
               outdir / "bounds.svg", xlabel="round", ylabel="error / bound")
    (outdir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
    return path


def run_ratio(cfg: ExperimentConfig) -> Path:
    """Per-round ``gamma_margin`` on the sample over the one under the exact law (intervals only)."""
    from .plotting import line_chart

    if cfg.dataset != "intervals":
        raise ConfigError("ratio needs the intervals dataset (exact margin law required)")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    labels = [_gamma_label(g) for g in cfg.gammas]
    columns = ["round"] + [f"ratio_{lab}" for lab in labels]
    root = RngState(cfg.seed)
    per_rep = []
    for r in range(cfg.repetitions):
        rng = root.child(f"rep/{r}")
        problem = make_problem(cfg, rng)
        trace = train_ensemble(cfg, problem.train, rng)
        n = problem.train.n
        rows = []
        for t in report_rounds(len(trace), cfg.every):
            f = trace.combination(t)
            sample = MarginProfile.from_margins(evaluate(f, problem.train)[0])
            values, masses = exact_margin_distribution(f, problem.concept)
            law = MarginProfile.weighted(values, masses, n)
            row = {"round": t}
            for g, lab in zip(cfg.gammas, labels):
                gv = _gamma_value(g, 1)
                num, den = gamma_margin(sample, gv, n), gamma_margin(law, gv, n)
                row[f"ratio_{lab}"] = num / den if den > 0 else math.inf
            rows.append(row)
        per_rep.append(rows)
    rows = _average(per_rep, columns)
    path = outdir / "ratio.csv"
    write_csv(path, columns, rows)
    x = np.array([row["round"] for row in rows], dtype=float)
    line_chart(x, {c: np.array([row[c] for row in rows], dtype=float) for c in columns[1:]},
               outdir / "ratio.svg", xlabel="round", ylabel="ratio")
    return path


def run_rademacher(cfg: ExperimentConfig, sizes, draws: int) -> Path:
    """Monte-Carlo Rademacher complexity of stumps on the configured data at several sizes."""
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    root = RngState(cfg.seed)
    rows = []
    prev = None
    for size in sizes:
        rng = root.child(f"size/{size}")
        problem = make_problem(cfg.replace(n=int(size)), rng)
        mean, se = rademacher_complexity(problem.train, draws, rng.child("rademacher"))
        rows.append({"n": problem.train.n, "mean": mean, "se": se,
                     "ratio": math.inf if prev is None else mean / prev})
        prev = mean
    path = outdir / "rademacher.csv"
    write_csv(path, ["n", "mean", "se", "ratio"], rows)
    return path


DELTA_CURVE = np.linspace(0.0, 1.0, 101)
MARGIN_GRID = np.linspace(-1.0, 1.0, 201)


def run_doomlp(model_path, data_path, outdir, delta="auto", seed: int = 0, draws: int = 1000,
               label_column: int = -1, positive_label: str = "1", header: bool = False) -> Path:
    """Redistribute the weights of a saved combination and write the comparison files.

    ``delta="auto"`` picks the Rademacher-bound minimiser over the default grid.
    """
    f = ConvexCombination.load(model_path)
    if np.any(f.weights < 0):
        raise DataError(f"{model_path}: DOOM-LP needs nonnegative weights")
    ds = load_csv(data_path, label_column, positive_label, header)
    if max(s.feature for s in f.stumps) >= ds.dim:
        raise DataError(f"{model_path}: uses a feature beyond the {ds.dim} columns of {data_path}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    G = margin_matrix(ds, f.stumps)
    before = G @ f.weights
    rad = None
    if delta == "auto":
        rad, _ = rademacher_complexity(ds, draws, RngState(seed).child("doomlp"))
        delta = choose_delta(before, rad)
    delta = float(delta)
    res = doom_lp(f.weights, G, delta)
    g = ConvexCombination(res.weights, f.stumps)
    g.save(outdir / "model_doomlp.txt")
    after = G @ g.weights

    write_csv(outdir / "iterations.csv",
              ["iteration", "C_min", "C", "S_minus", "S_l", "S_0", "margin_cost", "accepted"],
              [{"iteration": it.iteration, "C_min": it.c_min, "C": it.c, "S_minus": it.n_minus,
                "S_l": it.n_linear, "S_0": it.n_safe, "margin_cost": it.margin_cost,
                "accepted": int(it.accepted)} for it in res.iterations])
    wb, wa = np.sort(f.weights)[::-1], np.sort(g.weights)[::-1]
    write_csv(outdir / "coefficients.csv", ["rank", "before", "after"],
              [{"rank": i + 1, "before": wb[i], "after": wa[i]} for i in range(wb.size)])
    sb, sa = WeightSpectrum.from_combination(f), WeightSpectrum.from_combination(g)
    write_csv(outdir / "delta_dimension.csv", ["Delta", "before", "after"],
              [{"Delta": D, "before": delta_dimension(sb, D), "after": delta_dimension(sa, D)}
               for D in DELTA_CURVE])
    pb, pa = MarginProfile.from_margins(before), MarginProfile.from_margins(after)
    write_csv(outdir / "margin_cdf.csv", ["margin", "before", "after"],
              [{"margin": m, "before": pb.cdf(m), "after": pa.cdf(m)} for m in MARGIN_GRID])
    summary = [("delta", delta), ("status", res.status), ("iterations", len(res.iterations)),
               ("margin_cost_before", margin_cost(before, delta)),
               ("margin_cost_after", margin_cost(after, delta)),
               ("train_error_before", float(np.mean(before <= 0))),
               ("train_error_after", float(np.mean(after <= 0))),
               ("delta_dim_0.01_before", delta_dimension(sb, 0.01)),
               ("delta_dim_0.01_after", delta_dimension(sa, 0.01))]
    if rad is not None:
        summary.insert(1, ("rademacher_estimate", rad))
    with (outdir / "summary.csv").open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["key", "value"])
        for k, v in summary:
            out.writerow([k, v if isinstance(v, str) else format_value(v)])
    return outdir
