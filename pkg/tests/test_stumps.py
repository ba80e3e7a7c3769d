import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marginbound.data import LabeledDataset, gen_intervals
from marginbound.stumps import (Orientation, Stump, class_meta, eval_stump, predict_all,
                                rademacher_complexity, rademacher_sup, stump_vc_dim, train_stump)
from oracles import brute_force_stump


def test_eval_stump_examples():
    assert eval_stump(Stump(0, 0.5, Orientation.LE), [0.3]) == 1
    assert eval_stump(Stump(0, 0.5, Orientation.GE), [0.3]) == -1
    for o in Orientation:
        assert eval_stump(Stump(0, 0.5, o), [0.5]) == 1
        assert Stump(0, 0.5, o).predict([[0.5]]).tolist() == [1]


def test_constant_stumps():
    X = np.array([[-1e300], [0.0], [1e300]])
    assert Stump.constant(1).predict(X).tolist() == [1, 1, 1]
    assert Stump.constant(-1).predict(X).tolist() == [-1, -1, -1]


def test_line_round_trip():
    for s in (Stump(3, 0.125, Orientation.GE), Stump.constant(1), Stump.constant(-1)):
        assert Stump.from_line(s.to_line()) == s


def test_separable_example():
    ds = LabeledDataset([0.1, 0.4, 0.6, 0.9], [1, 1, -1, -1])
    s, err = train_stump(ds)
    assert s == Stump(0, 0.5, Orientation.LE) and err == 0.0


def test_all_positive_labels():
    ds = LabeledDataset([[0.2, 1.0], [0.7, 3.0], [0.9, 2.0]], [1, 1, 1])
    s, err = train_stump(ds, np.array([0.5, 0.25, 0.25]))
    assert err == 0.0
    assert np.all(s.predict(ds.features) == 1)


def test_tie_break_prefers_lowest_feature_then_threshold():
    # feature 0 and feature 1 separate equally well; feature 0 must win
    ds = LabeledDataset([[0.0, 5.0], [1.0, 6.0], [2.0, 7.0], [3.0, 8.0]], [1, 1, -1, -1])
    s, _ = train_stump(ds)
    assert s.feature == 0
    # every cut and both constants err on half the mass; always -1 is lexicographically first
    ds = LabeledDataset([0.0, 0.0, 1.0, 1.0], [1, -1, 1, -1])
    s, err = train_stump(ds)
    assert err == 0.5 and s == Stump.constant(-1)


def test_weight_validation():
    ds = LabeledDataset([0.0, 1.0], [1, -1])
    with pytest.raises(ValueError):
        train_stump(ds, [0.7, 0.7])
    with pytest.raises(ValueError):
        train_stump(ds, [1.2, -0.2])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(1, 3), st.integers(0, 2**32 - 1), st.booleans())
def test_matches_exhaustive_enumeration(n, d, seed, coarse):
    g = np.random.default_rng(seed)
    # coarse grids force duplicate feature values and tied errors
    X = g.integers(0, 4, size=(n, d)).astype(float) if coarse else g.normal(size=(n, d))
    y = np.where(g.random(n) < 0.5, 1, -1)
    w = g.integers(0, 5, size=n).astype(float) if coarse else g.random(n)
    if w.sum() == 0:
        w[0] = 1.0
    w = w / w.sum()
    fast, err = train_stump(LabeledDataset(X, y), w)
    slow, slow_err = brute_force_stump(X, y, w)
    assert fast == slow
    assert err == slow_err


def test_predict_all_shape():
    stumps = [Stump(0, 0.5), Stump(1, 0.0, Orientation.GE)]
    out = predict_all(stumps, [[0.1, -1.0], [0.9, 1.0]])
    assert out.tolist() == [[1, -1], [-1, 1]]


def _brute_rademacher(X, signs):
    cands = [Stump.constant(1)]
    for j in range(X.shape[1]):
        v = np.unique(X[:, j])
        cands += [Stump(j, float(c)) for c in (v[:-1] + v[1:]) / 2]
    H = predict_all(cands, X).astype(float)
    return np.abs(signs @ H.T).max(axis=1) / X.shape[0]


def test_rademacher_sup_matches_brute_force():
    g = np.random.default_rng(0)
    for _ in range(20):
        X = g.integers(0, 6, size=(10, 2)).astype(float)
        E = np.where(g.random((50, 10)) < 0.5, -1.0, 1.0)
        assert np.allclose(rademacher_sup(X, E), _brute_rademacher(X, E), atol=1e-15)


def test_rademacher_single_point():
    ds = LabeledDataset([[0.4]], [1])
    mean, se = rademacher_complexity(ds, 50, 0)
    assert mean == 1.0 and se == 0.0


def test_rademacher_deterministic_and_shrinks():
    ds, _ = gen_intervals(20, 400, 0)
    a = rademacher_complexity(ds, 300, 1)
    assert a == rademacher_complexity(ds, 300, 1)
    big, _ = gen_intervals(20, 1600, 0)
    assert rademacher_complexity(big, 300, 1)[0] < a[0]
    with pytest.raises(ValueError):
        rademacher_complexity(ds, 0, 1)


@pytest.mark.parametrize("d, v", [(1, 2), (2, 4), (20, 9), (36, 10)])
def test_vc_dim_values(d, v):
    assert stump_vc_dim(d) == v


def test_vc_dim_monotone_and_minimal():
    vals = [stump_vc_dim(d) for d in range(1, 200)]
    assert vals == sorted(vals)
    for d, m in zip(range(1, 200), vals):
        assert 2 ** (m - 1) >= (m - 1) * d + 1
        if m > 2:
            assert 2 ** (m - 2) < (m - 2) * d + 1
    with pytest.raises(ValueError):
        stump_vc_dim(0)


def test_class_meta():
    m = class_meta(1)
    assert (m.vc_dim, m.cover_exponent, m.alpha) == (2, 2.0, 1.0)
    assert m.example1_alpha == 1.0
    assert m.gamma_min == pytest.approx(2 / 3)
    m = class_meta(20)
    assert m.alpha == pytest.approx(2 * 16 / 18)
    assert math.isclose(m.gamma_min, 2 * m.example1_alpha / (m.example1_alpha + 2))
    with pytest.raises(ValueError):
        class_meta(3, cover_exponent=0)
