"""Voting ensembles of stumps: AdaBoost, bagging, margins and the exact 1-D oracle."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import IntervalsConcept, LabeledDataset, bootstrap
from .errors import DataError
from .rng import RngState, as_rng
from .stumps import Stump, StumpSearch, predict_all

# Weighted errors below this are clamped so that beta stays positive.
EPS_CLAMP = 1e-10


@dataclass(frozen=True)
class ConvexCombination:
    """``f = sum_t w_t h_t`` with weights rescaled so that ``sum |w_t| = 1``.

    ``normalization`` keeps the original ``sum |w_t|``.
    """

    weights: np.ndarray
    stumps: tuple[Stump, ...]
    normalization: float = field(default=1.0, init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        stumps = tuple(self.stumps)
        if w.size != len(stumps) or w.size == 0:
            raise ValueError("need one weight per stump and at least one term")
        total = float(np.abs(w).sum())
        if not total > 0:
            raise ValueError("weights must not all be zero")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "stumps", stumps)
        object.__setattr__(self, "normalization", total)

    def __len__(self):
        return len(self.stumps)

    def predict(self, X) -> np.ndarray:
        return self.weights @ predict_all(self.stumps, X)

    def save(self, path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for w, s in zip(self.weights, self.stumps):
                fh.write(f"{float(w)!r},{s.to_line()}\n")

    @classmethod
    def load(cls, path) -> "ConvexCombination":
        weights, stumps = [], []
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    w, rest = line.split(",", 1)
                    weights.append(float(w))
                    stumps.append(Stump.from_line(rest))
                except ValueError as exc:
                    raise DataError(f"{path}: line {lineno}: {exc}") from None
        if not stumps:
            raise DataError(f"{path}: no terms")
        return cls(np.array(weights), tuple(stumps))


@dataclass(frozen=True)
class Round:
    t: int
    stump: Stump
    eps: float
    beta: float
    weight: float  # unnormalised voting weight


@dataclass(frozen=True)
class TrainingTrace:
    method: str
    rounds: tuple[Round, ...]
    stop_reason: str | None = None
    distributions: tuple[np.ndarray, ...] = ()

    def __len__(self):
        return len(self.rounds)

    @property
    def stumps(self) -> tuple[Stump, ...]:
        return tuple(r.stump for r in self.rounds)

    @property
    def raw_weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.rounds])

    def combination(self, t: int | None = None) -> ConvexCombination:
        """Combined classifier after the first ``t`` rounds (all rounds by default)."""
        t = len(self.rounds) if t is None else t
        if not 1 <= t <= len(self.rounds):
            raise ValueError(f"round {t} outside 1..{len(self.rounds)}")
        return ConvexCombination(self.raw_weights[:t], self.stumps[:t])

    def cumulative_outputs(self, X) -> np.ndarray:
        """Row ``t-1`` holds ``f_t(x)`` for every row of ``X``; shape ``(T, n)``."""
        w = self.raw_weights
        H = predict_all(self.stumps, X).astype(float)
        return np.cumsum(w[:, None] * H, axis=0) / np.cumsum(w)[:, None]

    def save(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["round", "eps_t", "beta_t", "weight", "feature", "threshold", "orientation"])
            for r in self.rounds:
                out.writerow([r.t, repr(r.eps), repr(r.beta), repr(r.weight), r.stump.feature,
                              repr(r.stump.threshold), r.stump.orientation.value])

    @classmethod
    def load(cls, path, method: str = "unknown") -> "TrainingTrace":
        rounds = []
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                stump = Stump.from_line(f"{row['feature']},{row['threshold']},{row['orientation']}")
                rounds.append(Round(int(row["round"]), stump, float(row["eps_t"]),
                                    float(row["beta_t"]), float(row["weight"])))
        return cls(method, tuple(rounds))


def adaboost(ds: LabeledDataset, T: int, keep_distributions: bool = False) -> TrainingTrace:
    """Run AdaBoost with exhaustive stumps for up to ``T`` rounds.

    A weighted error of 0 is clamped to ``EPS_CLAMP`` and training goes on;
    an error of 1/2 or more stops training and sets ``stop_reason``.
    With ``keep_distributions`` the trace holds ``D_1, ..., D_{t+1}``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if np.all(ds.labels == ds.labels[0]):
        raise ValueError("AdaBoost needs both labels in the training set")
    search = StumpSearch(ds)
    D = np.full(ds.n, 1.0 / ds.n)
    dists = [D] if keep_distributions else []
    rounds = []
    stop = None
    for t in range(1, T + 1):
        stump, _ = search.best(D)
        correct = stump.predict(ds.features) == ds.labels
        eps = float(D[~correct].sum())
        if eps >= 0.5:
            stop = "weak_learner_failed"
            break
        eps = max(eps, EPS_CLAMP)
        beta = eps / (1.0 - eps)
        D = D * np.where(correct, beta, 1.0)
        D = D / D.sum()
        if keep_distributions:
            dists.append(D)
        rounds.append(Round(t, stump, eps, beta, math.log(1.0 / beta)))
    return TrainingTrace("adaboost", tuple(rounds), stop, tuple(dists))


def bagging(ds: LabeledDataset, T: int, rng: RngState | int) -> TrainingTrace:
    """Majority vote of ``T`` stumps, each fit to its own bootstrap sample."""
    if T < 1:
        raise ValueError("T must be >= 1")
    rng = as_rng(rng)
    rounds = []
    for t in range(1, T + 1):
        sample = bootstrap(ds, rng.child(f"bagging/{t}"))
        stump, eps = StumpSearch(sample).best(np.full(sample.n, 1.0 / sample.n))
        beta = eps / (1.0 - eps) if eps < 1.0 else math.inf
        rounds.append(Round(t, stump, eps, beta, 1.0))
    return TrainingTrace("bagging", tuple(rounds))


def evaluate(f: ConvexCombination, ds: LabeledDataset):
    """Margins ``y f(x)`` and the error rate ``P_n{y f(x) <= 0}``."""
    if max(s.feature for s in f.stumps) >= ds.dim:
        raise ValueError("combination uses a feature index beyond the dataset dimension")
    margins = ds.labels * f.predict(ds.features)
    return margins, float(np.mean(margins <= 0))


def exact_margin_distribution(f: ConvexCombination, concept: IntervalsConcept):
    """Law of ``f_0(X) f(X)`` for ``X ~ U[0, 1]`` as ``(values, probabilities)``.

    ``f`` and the concept are piecewise constant between the stump thresholds
    and the concept endpoints, so each open segment contributes its length.
    """
    if any(s.feature != 0 for s in f.stumps):
        raise ValueError("exact oracle needs one-dimensional stumps (feature 0)")
    th = np.array([s.threshold for s in f.stumps])
    th = th[np.isfinite(th) & (th > 0.0) & (th < 1.0)]
    cuts = np.unique(np.concatenate([[0.0, 1.0], th, concept.endpoints]))
    lengths = np.diff(cuts)
    keep = lengths > 0
    mids = ((cuts[:-1] + cuts[1:]) / 2.0)[keep]
    values = concept.label(mids) * f.predict(mids.reshape(-1, 1))
    return values, lengths[keep]


def exact_oracle_1d(f: ConvexCombination, concept: IntervalsConcept, delta: float = 0.0) -> float:
    """``P{y f(x) <= delta}`` under the uniform law on [0, 1], computed exactly."""
    values, mass = exact_margin_distribution(f, concept)
    return float(mass[values <= delta].sum())
