import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marginbound.data import (IntervalsConcept, LabeledDataset, bootstrap, gen_boolean_dnf,
                              gen_intervals, gen_twonorm, load_csv, save_csv, split)
from marginbound.errors import DataError


def test_intervals_shape_and_labels():
    ds, concept = gen_intervals(20, 1000, 0)
    assert (ds.n, ds.dim) == (1000, 1)
    assert set(np.unique(ds.labels)) == {-1, 1}
    assert np.array_equal(ds.labels, concept.label(ds.features[:, 0]))


@pytest.mark.parametrize("k", [1, 2, 7, 20])
def test_intervals_measure_half(k):
    assert IntervalsConcept.alternating(k).measure == pytest.approx(0.5, abs=1e-15)


def test_single_interval():
    ds, concept = gen_intervals(1, 200, 4)
    assert concept.intervals == ((0.0, 0.5),)
    x = ds.features[:, 0]
    assert np.array_equal(ds.labels == 1, x <= 0.5)


def test_concept_validation():
    with pytest.raises(ValueError):
        IntervalsConcept(((0.2, 0.5), (0.4, 0.6)))
    with pytest.raises(ValueError):
        IntervalsConcept(((0.5, 1.2),))
    with pytest.raises(ValueError):
        IntervalsConcept.alternating(0)


def test_twonorm_means():
    ds = gen_twonorm(1000, 20, 1)
    assert ds.features.shape == (1000, 20)
    ds1 = gen_twonorm(40_000, 1, 2)
    pos = ds1.features[ds1.labels == 1, 0]
    assert abs(pos.mean() - 2.0) < 3 * pos.std(ddof=1) / math.sqrt(pos.size)


def test_generators_deterministic():
    assert np.array_equal(gen_twonorm(50, 3, 9).features, gen_twonorm(50, 3, 9).features)
    a, b = gen_boolean_dnf(80, 36, 9), gen_boolean_dnf(80, 36, 9)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)
    assert set(np.unique(a.features)) <= {0.0, 1.0}
    with pytest.raises(ValueError):
        gen_boolean_dnf(10, 6, 0)


def test_dataset_validation():
    with pytest.raises(DataError):
        LabeledDataset(np.zeros((3, 1)), [1, 0, 1])
    with pytest.raises(DataError):
        LabeledDataset(np.array([[1.0], [np.nan]]), [1, -1])
    with pytest.raises(DataError):
        LabeledDataset(np.zeros((3, 1)), [1, -1])
    ds = LabeledDataset([0.1, 0.2], [1, -1])
    assert ds.features.shape == (2, 1)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 3.0


def test_csv_round_trip(tmp_path):
    ds = gen_twonorm(30, 4, 3)
    save_csv(ds, tmp_path / "d.csv")
    back = load_csv(tmp_path / "d.csv")
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)


def test_csv_label_options(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("cls,a,b\nwon,1,2\nnowin,3,4\n\n won ,5,6\n")
    ds = load_csv(p, "cls", "won", header=True)
    assert ds.labels.tolist() == [1, -1, 1]
    assert ds.features.tolist() == [[1, 2], [3, 4], [5, 6]]
    ds = load_csv(p, 0, "won", header=True)
    assert ds.labels.tolist() == [1, -1, 1]


@pytest.mark.parametrize("text, needle", [
    ("", "no rows"),
    ("1,2,1\n1,x,1\n", "row 2, column 1"),
    ("1,2,1\n1,1\n", "row 2 has 2 columns"),
    ("1,inf,1\n", "non-finite"),
    ("1\n", "at least one feature"),
])
def test_csv_errors(tmp_path, text, needle):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=needle):
        load_csv(p)


def test_csv_missing_file_and_column(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "absent.csv")
    p = tmp_path / "x.csv"
    p.write_text("1,2,1\n")
    with pytest.raises(DataError):
        load_csv(p, 5)
    with pytest.raises(DataError):
        load_csv(p, "label")


def test_split_sizes_and_determinism():
    ds = gen_boolean_dnf(3196, 36, 0)
    tr, te = split(ds, 0.9, 1)
    assert (tr.n, te.n) == (2876, 320)
    tr2, _ = split(ds, 0.9, 1)
    assert np.array_equal(tr.features, tr2.features)
    small = gen_twonorm(10, 2, 0)
    a, b = split(small, 0.5, 0)
    assert (a.n, b.n) == (5, 5)
    rows = {tuple(r) for r in np.vstack([a.features, b.features])}
    assert rows == {tuple(r) for r in small.features}
    with pytest.raises(ValueError):
        split(gen_twonorm(1, 2, 0), 0.5, 0)
    with pytest.raises(ValueError):
        split(small, 1.0, 0)


def test_bootstrap():
    one = LabeledDataset([[0.3]], [1])
    assert bootstrap(one, 0).features.tolist() == [[0.3]]
    ds = LabeledDataset(np.arange(20_000, dtype=float), np.ones(20_000))
    b = bootstrap(ds, 5)
    assert b.n == ds.n
    assert abs(np.unique(b.features).size / ds.n - (1 - math.exp(-1))) < 0.01
    assert np.array_equal(bootstrap(ds, 5).features, b.features)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.floats(0.05, 0.95), st.integers(0, 2**32))
def test_split_partitions_rows(n, frac, seed):
    ds = LabeledDataset(np.arange(n, dtype=float), np.ones(n))
    if not 1 <= math.floor(n * frac) <= n - 1:
        with pytest.raises(ValueError):
            split(ds, frac, seed)
        return
    a, b = split(ds, frac, seed)
    assert a.n == math.floor(n * frac)
    assert sorted(np.concatenate([a.features[:, 0], b.features[:, 0]])) == list(range(n))
