"""Datasets: synthetic generators, CSV I/O, splitting and resampling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .rng import RngState, as_rng


@dataclass(frozen=True)
class LabeledDataset:
    """``n`` examples in ``d`` dimensions with labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.labels)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"features must be a non-empty n x d matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"expected {X.shape[0]} labels, got shape {y.shape}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain missing or non-finite entries")
        if not np.all((y == 1) | (y == -1)):
            raise DataError("labels must be exactly -1 or +1")
        X.setflags(write=False)
        y = y.astype(np.int8)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return LabeledDataset(self.features[idx], self.labels[idx])


@dataclass(frozen=True)
class IntervalsConcept:
    """Union of disjoint closed subintervals of [0, 1]; +1 inside, -1 outside."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev_right = -math.inf
        for a, b in self.intervals:
            if not 0.0 <= a <= b <= 1.0:
                raise ValueError(f"interval [{a}, {b}] not inside [0, 1]")
            if a <= prev_right:
                raise ValueError("intervals must be sorted and pairwise disjoint")
            prev_right = b

    @classmethod
    def alternating(cls, num_intervals: int) -> "IntervalsConcept":
        """Cut [0, 1] into ``2 * num_intervals`` equal cells; cells 1, 3, 5, ... are positive."""
        if num_intervals < 1:
            raise ValueError("num_intervals must be >= 1")
        m = 2 * num_intervals
        return cls(tuple((2 * j / m, (2 * j + 1) / m) for j in range(num_intervals)))

    @property
    def endpoints(self) -> np.ndarray:
        return np.array([e for ab in self.intervals for e in ab], dtype=float)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def label(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x >= a) & (x <= b)
        return np.where(inside, 1, -1).astype(np.int8)


def gen_intervals(num_intervals: int, n: int, rng: RngState | int):
    """Uniform sample on [0, 1] labelled by the alternating intervals concept.

    Returns ``(dataset, concept)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    concept = IntervalsConcept.alternating(num_intervals)
    x = as_rng(rng).generator("gen_intervals").uniform(0.0, 1.0, size=n)
    return LabeledDataset(x.reshape(-1, 1), concept.label(x)), concept


def gen_twonorm(n: int, d: int, rng: RngState | int) -> LabeledDataset:
    """Breiman's twonorm: N(+mu, I) vs N(-mu, I) with mu = (2/sqrt(d), ...)."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    g = as_rng(rng).generator("gen_twonorm")
    y = np.where(g.random(n) < 0.5, 1, -1)
    mu = 2.0 / math.sqrt(d)
    X = g.standard_normal((n, d)) + mu * y[:, None]
    return LabeledDataset(X, y)


def gen_boolean_dnf(n: int, d: int, rng: RngState | int, noise: float = 0.05) -> LabeledDataset:
    """Binary-attribute data with a fixed DNF target and label noise.

    Stand-in for board-position data such as kr-vs-kp: ``d`` attributes in
    {0, 1} with per-attribute biases, labelled +1 by
    ``(x0 & x1) | (x2 & ~x3) | (x4 & x5 & ~x6)`` and then flipped with
    probability ``noise``.
    """
    if n < 1 or d < 7:
        raise ValueError("need n >= 1 and d >= 7")
    g = as_rng(rng).generator("gen_boolean_dnf")
    p = np.linspace(0.25, 0.75, d)
    X = (g.random((n, d)) < p).astype(float)
    b = X.astype(bool)
    target = (b[:, 0] & b[:, 1]) | (b[:, 2] & ~b[:, 3]) | (b[:, 4] & b[:, 5] & ~b[:, 6])
    y = np.where(target, 1, -1)
    flip = g.random(n) < noise
    y[flip] = -y[flip]
    return LabeledDataset(X, y)


def load_csv(path, label_column: int | str = -1, positive_label_token: str = "1",
             header: bool = False) -> LabeledDataset:
    """Read numeric features plus one label column.

    Labels equal to ``positive_label_token`` (after stripping whitespace) map
    to +1, everything else to -1.  ``label_column`` is a column index
    (negative counts from the end) or, with ``header=True``, a column name.
    Row numbers in error messages are 1-based file lines.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    start = 1
    names = None
    if header and rows:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        start = 2
    if not rows:
        raise DataError(f"{path}: no rows")
    width = len(rows[0])
    if width < 2:
        raise DataError(f"{path}: need at least one feature column and a label column")
    if isinstance(label_column, str):
        if names is None or label_column not in names:
            raise DataError(f"{path}: label column {label_column!r} not found in header")
        label_idx = names.index(label_column)
    else:
        label_idx = label_column % width if -width <= label_column < width else None
        if label_idx is None:
            raise DataError(f"{path}: label column {label_column} out of range for {width} columns")

    X = np.empty((len(rows), width - 1))
    y = np.empty(len(rows), dtype=np.int8)
    for r, row in enumerate(rows):
        lineno = r + start
        if len(row) != width:
            raise DataError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        j = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            try:
                X[r, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {lineno}, column {c}: non-numeric value {cell!r}") from None
            if not math.isfinite(X[r, j]):
                raise DataError(f"{path}: row {lineno}, column {c}: non-finite value {cell!r}")
            j += 1
        y[r] = 1 if row[label_idx].strip() == positive_label_token else -1
    return LabeledDataset(X, y)


def save_csv(ds: LabeledDataset, path) -> None:
    """Write features then label (as -1/1) per row, no header."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for x, label in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in x] + [int(label)])


def split(ds: LabeledDataset, train_fraction: float, rng: RngState | int):
    """Uniformly random train/test partition with ``floor(n * fraction)`` training rows."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    n_train = math.floor(ds.n * train_fraction)
    if not 1 <= n_train <= ds.n - 1:
        raise ValueError(f"train fraction {train_fraction} leaves an empty side for n={ds.n}")
    perm = as_rng(rng).generator("split").permutation(ds.n)
    return ds.subset(np.sort(perm[:n_train])), ds.subset(np.sort(perm[n_train:]))


def bootstrap(ds: LabeledDataset, rng: RngState | int) -> LabeledDataset:
    idx = as_rng(rng).generator("bootstrap").integers(0, ds.n, size=ds.n)
    return ds.subset(idx)
