from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from windcop.errors import DataError, DegenerateError, DomainError, InsufficientDataError
from windcop.preprocess import (Dataset, apply_scale, chisq_qq, correlation_matrix, eliminate_collinear,
                                inverse_scale, minmax_scale, prune_high_correlation, train_test_split, vif)


def ds_from(cols, response=None):
    names = list(cols)
    return Dataset(tuple(names), np.column_stack([cols[c] for c in names]), response)


def orthogonal(n=64, p=4):
    # columns of a Hadamard-like +/-1 design are exactly orthogonal and centred
    H = np.array([[1.0]])
    while H.shape[0] < n:
        H = np.block([[H, H], [H, -H]])
    return H[:, 1:p + 1]


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(("a", "a"), np.zeros((2, 2)))
    with pytest.raises(DataError):
        Dataset(("a",), [[np.nan]])
    with pytest.raises(DataError):
        Dataset(("a", "b"), np.zeros((2, 2)), response="c")


def test_correlation_matrix_oracles():
    rng = np.random.default_rng(0)
    a = rng.normal(size=50)
    m = correlation_matrix(ds_from({"a": a, "b": a.copy()}))
    assert m[0, 1] == pytest.approx(1.0)
    u = rng.random((10_000, 2))
    for method in ("spearman", "pearson"):
        m = correlation_matrix(Dataset(("x", "y"), u), method)
        assert abs(m[0, 1]) < 0.05
        assert np.array_equal(m, m.T) and np.all(np.diag(m) == 1.0)
    np.testing.assert_array_equal(correlation_matrix(Dataset(("x",), a[:, None])), [[1.0]])


def test_correlation_constant_column_named():
    with pytest.raises(DegenerateError, match="'c'"):
        correlation_matrix(ds_from({"a": np.arange(5.0), "c": np.ones(5)}))


def test_prune_duplicates():
    rng = np.random.default_rng(1)
    a = rng.normal(size=100)
    y = a + rng.normal(size=100)
    out, log = prune_high_correlation(ds_from({"a": a, "b": a * 2, "c": a + 1, "y": y}, "y"))
    assert len(out.predictors) == 1 and len(log) == 2
    out, log = prune_high_correlation(ds_from({"a": a, "b": rng.normal(size=100), "y": y}, "y"))
    assert log == () and out.columns == ("a", "b", "y")
    with pytest.raises(DomainError):
        prune_high_correlation(out, 0.0)


def test_prune_keeps_column_more_related_to_response():
    rng = np.random.default_rng(2)
    a = rng.normal(size=500)
    b = a + 0.01 * rng.normal(size=500)
    y = b + 0.001 * rng.normal(size=500)
    out, log = prune_high_correlation(ds_from({"a": a, "b": b, "y": y}, "y"))
    assert out.predictors == ("b",) and log[0][:2] == ("a", "b")


def test_vif_oracles():
    X = orthogonal()
    rep = vif(Dataset(tuple("abcd"), X))
    np.testing.assert_allclose([v for _, v in rep.values], 1.0, atol=1e-9)
    rng = np.random.default_rng(3)
    x1 = rng.normal(size=400)
    rep = vif(ds_from({"x1": x1, "x2": x1.copy(), "x3": rng.normal(size=400)}))
    assert rep.as_dict()["x1"] == np.inf
    x2 = x1 + 0.045 * rng.normal(size=400)
    rho = np.corrcoef(x1, x2)[0, 1]
    v = vif(ds_from({"x1": x1, "x2": x2})).as_dict()["x1"]
    assert v == pytest.approx(1 / (1 - rho ** 2), rel=0.1)


def test_eliminate_collinear():
    X = orthogonal()
    rep_ds, rep = eliminate_collinear(Dataset(tuple("abcd"), X))
    assert rep.removal_log == ()
    dup = np.column_stack([X, X[:, 0]])
    out, rep = eliminate_collinear(Dataset(tuple("abcde"), dup))
    assert len(rep.removal_log) == 1 and rep.max() <= 5
    rng = np.random.default_rng(4)
    n = 300
    cols = {k: rng.normal(size=n) for k in "abcd"}
    cols["a2"] = cols["a"] + 0.05 * rng.normal(size=n)
    cols["c2"] = cols["c"] + 0.05 * rng.normal(size=n)
    out, rep = eliminate_collinear(ds_from(cols))
    assert len(rep.removal_log) == 2 and rep.max() <= 5


def test_minmax():
    ds, params = minmax_scale(Dataset(("a",), [[1.0], [2.0], [3.0]]))
    np.testing.assert_array_equal(ds.values[:, 0], [0, 0.5, 1])
    ds, params = minmax_scale(ds_from({"a": np.arange(4.0), "k": np.full(4, 7.0)}))
    assert params.degenerate == ("k",) and np.all(ds.column("k") == 0)
    rng = np.random.default_rng(5)
    raw = Dataset(("a", "b", "y"), rng.normal(size=(50, 3)), "y")
    scaled, params = minmax_scale(raw)
    assert scaled.column("y").tolist() == raw.column("y").tolist()
    assert np.max(np.abs(inverse_scale(scaled, params).values - raw.values)) < 1e-12
    np.testing.assert_array_equal(apply_scale(raw, params).values, scaled.values)
    with pytest.raises(DataError):
        inverse_scale(Dataset(("z",), [[1.0]]), params)


def test_split():
    s = train_test_split(10, 0.2, seed=1)
    assert len(s.train) == 8 and len(s.test) == 2
    t = train_test_split(10, 0.2, seed=1)
    assert np.array_equal(s.train, t.train) and np.array_equal(s.test, t.test)
    with pytest.raises(InsufficientDataError):
        train_test_split(2, 0.1, 0)
    with pytest.raises(DomainError):
        train_test_split(10, 1.0, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 500), st.floats(0.01, 0.99), st.integers(0, 2 ** 32 - 1))
def test_split_partition(n, frac, seed):
    try:
        s = train_test_split(n, frac, seed)
    except InsufficientDataError:
        return
    assert len(np.intersect1d(s.train, s.test)) == 0
    np.testing.assert_array_equal(np.sort(np.concatenate([s.train, s.test])), np.arange(n))
    assert len(s.test) == int(np.floor(frac * n + 0.5))


def test_chisq_qq():
    rng = np.random.default_rng(6)
    X = rng.multivariate_normal([0, 0, 0], [[1, .5, .2], [.5, 1, .3], [.2, .3, 1]], size=5000)
    assert 0.9 <= chisq_qq(Dataset(tuple("abc"), X)).slope() <= 1.1
    z = rng.normal(size=4000)
    qq = chisq_qq(Dataset(("z",), z[:, None]))
    assert qq.slope() == pytest.approx(1.0, abs=0.05)
    t = rng.standard_t(2, size=(4000, 2))
    qq = chisq_qq(Dataset(("a", "b"), t))
    assert qq.observed[-1] > qq.theoretical[-1]
    with pytest.raises(InsufficientDataError):
        chisq_qq(Dataset(("a", "b"), [[1.0, 2.0], [3.0, 4.0]]))
