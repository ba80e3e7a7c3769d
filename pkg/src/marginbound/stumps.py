"""Decision stumps: axis-aligned threshold classifiers with outputs in {-1, +1}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import LabeledDataset
from .rng import RngState, as_rng

# Errors within this much of the minimum count as ties.
TIE_TOL = 1e-12


class Orientation(str, Enum):
    LE = "LE"  # +1 when x[feature] <= threshold
    GE = "GE"  # +1 when x[feature] >= threshold

    def __lt__(self, other):
        order = {"LE": 0, "GE": 1}
        return order[self.value] < order[other.value]


@dataclass(frozen=True, order=True)
class Stump:
    feature: int
    threshold: float
    orientation: Orientation = Orientation.LE

    @classmethod
    def constant(cls, sign: int) -> "Stump":
        """The always-``sign`` stump, canonically ``(0, +-inf, LE)``."""
        return cls(0, math.inf if sign > 0 else -math.inf, Orientation.LE)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        col = X[..., self.feature]
        if self.orientation is Orientation.LE:
            hit = col <= self.threshold
        else:
            hit = col >= self.threshold
        return np.where(hit, 1, -1).astype(np.int8)

    def __call__(self, x) -> int:
        return eval_stump(self, x)

    def to_line(self) -> str:
        return f"{self.feature},{self.threshold!r},{self.orientation.value}"

    @classmethod
    def from_line(cls, line: str) -> "Stump":
        feature, threshold, orientation = (s.strip() for s in line.split(","))
        return cls(int(feature), float(threshold), Orientation(orientation))


def eval_stump(s: Stump, x) -> int:
    v = float(x[s.feature])
    ok = v <= s.threshold if s.orientation is Orientation.LE else v >= s.threshold
    return 1 if ok else -1


class StumpSearch:
    """Exhaustive weighted-error minimisation over stumps on a fixed sample.

    Sorting is done once per feature, so repeated calls with different
    weight vectors (boosting rounds) only pay for cumulative sums.
    Candidate thresholds are midpoints between consecutive distinct values of
    each feature, plus the two constant stumps.
    """

    def __init__(self, ds: LabeledDataset):
        self.ds = ds
        self._orders = []
        self._cuts = []
        self._thresholds = []
        for j in range(ds.dim):
            order = np.argsort(ds.features[:, j], kind="stable")
            xs = ds.features[order, j]
            cuts = np.nonzero(xs[:-1] < xs[1:])[0] + 1  # number of points on the <= side
            self._orders.append(order)
            self._cuts.append(cuts)
            self._thresholds.append((xs[cuts - 1] + xs[cuts]) / 2.0)
        self._pos = ds.labels == 1

    def errors(self, weights):
        """Per-feature arrays of (LE errors, GE errors) at the midpoint thresholds."""
        w = np.asarray(weights, dtype=float)
        wpos = np.where(self._pos, w, 0.0)
        wneg = w - wpos
        pos_total, neg_total = wpos.sum(), wneg.sum()
        out = []
        for order, cuts in zip(self._orders, self._cuts):
            pc = np.cumsum(wpos[order])[cuts - 1]
            nc = np.cumsum(wneg[order])[cuts - 1]
            out.append((nc + (pos_total - pc), pc + (neg_total - nc)))
        return out, pos_total, neg_total

    def best(self, weights) -> tuple[Stump, float]:
        per_feature, pos_total, neg_total = self.errors(weights)
        best = min(pos_total, neg_total)
        for le, ge in per_feature:
            if le.size:
                best = min(best, le.min(), ge.min())
        limit = best + TIE_TOL
        for j, (le, ge) in enumerate(per_feature):
            if j == 0 and pos_total <= limit:
                stump = Stump.constant(-1)
                break
            hit = np.nonzero((le <= limit) | (ge <= limit))[0]
            if hit.size:
                i = hit[0]
                orient = Orientation.LE if le[i] <= limit else Orientation.GE
                stump = Stump(j, float(self._thresholds[j][i]), orient)
                break
            if j == 0 and neg_total <= limit:
                stump = Stump.constant(+1)
                break
        else:  # defensive: one constant stump always attains the minimum when no cut does
            stump = Stump.constant(-1 if pos_total <= neg_total else 1)
        w = np.asarray(weights, dtype=float)
        err = float(w[stump.predict(self.ds.features) != self.ds.labels].sum())
        return stump, err


def train_stump(ds: LabeledDataset, weights=None) -> tuple[Stump, float]:
    """Return the stump minimising the weighted training error, and that error.

    Ties are broken lexicographically on (feature, threshold, LE before GE).
    """
    if weights is None:
        weights = np.full(ds.n, 1.0 / ds.n)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (ds.n,) or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector over the examples")
    return StumpSearch(ds).best(weights)


def predict_all(stumps, X) -> np.ndarray:
    """Matrix of stump outputs, shape ``(len(stumps), n)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    out = np.empty((len(stumps), X.shape[0]), dtype=np.int8)
    for k, s in enumerate(stumps):
        out[k] = s.predict(X)
    return out


def rademacher_sup(features, signs) -> np.ndarray:
    """Exact ``sup_h |n^-1 sum_i eps_i h(X_i)|`` over stumps, one value per row of ``signs``.

    For stumps, ``sum eps_i h(X_i) = 2 P - S`` where ``P`` is the sign mass on
    the ``+1`` side of a cut and ``S`` the total; both orientations give the
    same absolute values, so only prefix sums at cut positions matter.
    """
    X = np.asarray(features, dtype=float)
    E = np.atleast_2d(np.asarray(signs, dtype=float))
    n = X.shape[0]
    total = E.sum(axis=1)
    best = np.abs(total)  # constant stumps
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cuts = np.nonzero(xs[:-1] < xs[1:])[0]
        if cuts.size == 0:
            continue
        prefix = np.cumsum(E[:, order], axis=1)[:, cuts]
        best = np.maximum(best, np.abs(2.0 * prefix - total[:, None]).max(axis=1))
    return best / n


def rademacher_complexity(ds: LabeledDataset, num_draws: int, rng: RngState | int,
                          batch: int = 256) -> tuple[float, float]:
    """Monte-Carlo estimate of the empirical Rademacher complexity of stumps.

    Returns ``(mean, standard error)`` over ``num_draws`` sign vectors.
    """
    if num_draws < 1:
        raise ValueError("num_draws must be >= 1")
    g = as_rng(rng).generator("rademacher")
    values = []
    done = 0
    while done < num_draws:
        m = min(batch, num_draws - done)
        signs = np.where(g.random((m, ds.n)) < 0.5, -1.0, 1.0)
        values.append(rademacher_sup(ds.features, signs))
        done += m
    v = np.concatenate(values)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


def stump_vc_dim(d: int) -> int:
    """Smallest ``m >= 2`` with ``2**(m-1) >= (m-1)*d + 1``.

    ``m = 1`` satisfies the inequality trivially for every ``d``, so the scan
    starts at 2; this gives 2 for ``d = 1``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    m = 2
    while 2 ** (m - 1) < (m - 1) * d + 1:
        m += 1
    return m


@dataclass(frozen=True)
class StumpClassMeta:
    dim: int
    vc_dim: int
    cover_exponent: float
    alpha: float

    @property
    def example1_alpha(self) -> float:
        """Entropy exponent ``2(V-1)/V`` of the symmetric convex hull."""
        return 2.0 * (self.vc_dim - 1) / self.vc_dim

    @property
    def gamma_min(self) -> float:
        """Smallest admissible gamma, ``2 alpha / (alpha + 2)`` at ``example1_alpha``."""
        return 2.0 * (self.vc_dim - 1) / (2.0 * self.vc_dim - 1)


def class_meta(d: int, cover_exponent: float | None = None) -> StumpClassMeta:
    vc = stump_vc_dim(d)
    V = 2.0 * (vc - 1) if cover_exponent is None else float(cover_exponent)
    if V <= 0:
        raise ValueError("cover exponent must be positive")
    return StumpClassMeta(d, vc, V, 2.0 * V / (V + 2.0))
