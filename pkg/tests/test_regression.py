import numpy as np
import pytest

from windcop.errors import DegenerateError, DomainError, NumericalError, SingularDesignError
from windcop.regression import (bagging, fit, fit_bayes_ridge, fit_huber, fit_lasso, fit_ols, fit_ridge,
                                huber_loss, lasso_lambda_max, metrics, predict, residuals)


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(120, 3))
    y = 2.0 + X @ np.array([1.0, -0.5, 0.25]) + 0.3 * rng.normal(size=120)
    return X, y


def test_ols_exact():
    m = fit_ols([[0.0], [1.0], [2.0]], [1.0, 3.0, 5.0])
    assert m.intercept == pytest.approx(1.0) and m.coefficients[0] == pytest.approx(2.0)
    m = fit_ols(np.random.default_rng(1).normal(size=(10, 2)), np.full(10, 4.0))
    assert m.intercept == pytest.approx(4.0) and np.allclose(m.coefficients, 0, atol=1e-12)


def test_ols_normal_equations(data):
    X, y = data
    m = fit_ols(X, y)
    r, _ = residuals(m, X, y)
    A = np.column_stack([np.ones(len(y)), X])
    assert np.max(np.abs(A.T @ r)) < 1e-8
    assert abs(r.sum()) < 1e-8


def test_ols_singular():
    x = np.arange(10.0)
    with pytest.raises(SingularDesignError):
        fit_ols(np.column_stack([x, 2 * x]), x)


def test_ridge(data):
    X, y = data
    o, r = fit_ols(X, y), fit_ridge(X, y, 0.0)
    assert r.intercept == pytest.approx(o.intercept, abs=1e-8)
    np.testing.assert_allclose(r.coefficients, o.coefficients, atol=1e-8)
    m = fit_ridge([[1.0], [2.0]], [1.0, 2.0], 1.0, fit_intercept=False)
    assert m.coefficients[0] == pytest.approx(5 / 6)
    assert np.max(np.abs(fit_ridge(X, y, 1e9).coefficients)) < 1e-6
    norms = [np.linalg.norm(fit_ridge(X, y, lam).coefficients) for lam in (0, 0.1, 1, 10, 100)]
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    with pytest.raises(DomainError):
        fit_ridge(X, y, -1.0)


def test_lasso(data, backend):
    X, y = data
    lmax = lasso_lambda_max(X, y)
    assert np.all(fit_lasso(X, y, lmax).coefficients == 0.0)
    m = fit_lasso(X, y, 0.0, tol=1e-12)
    np.testing.assert_allclose(m.coefficients, fit_ols(X, y).coefficients, atol=1e-4)
    counts = [np.count_nonzero(fit_lasso(X, y, lam).coefficients) for lam in np.linspace(0, lmax, 8)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_lasso_scalar_soft_threshold():
    x = np.array([-1.5, -0.5, 0.5, 1.5])
    x = (x - x.mean()) / x.std()
    y = np.array([0.2, -0.4, 1.1, 0.9])
    lam = 0.1
    rho = float(x @ (y - y.mean())) / x.size
    expected = np.sign(rho) * max(abs(rho) - lam, 0.0)
    assert fit_lasso(x[:, None], y, lam, tol=1e-15).coefficients[0] == pytest.approx(expected, abs=1e-15)


def test_lasso_nonconvergence_flag(data):
    X, y = data
    assert not fit_lasso(X, y, 1e-3, tol=0.0, max_iter=2).converged


def test_bayes_ridge(data):
    X, y = data
    np.testing.assert_allclose(fit_bayes_ridge(X, y, 1e-10).coefficients, fit_ols(X, y).coefficients, atol=1e-6)
    np.testing.assert_array_equal(fit_bayes_ridge(X, y, 2.0, 0.5).coefficients, fit_ridge(X, y, 2.0).coefficients)
    clean = 1.0 + X @ np.array([1.0, 2.0, 3.0])
    m = fit_bayes_ridge(X, clean, evidence=True)
    assert m.hyperparams["noise_variance"] < 1e-6
    with pytest.raises(DomainError):
        fit_bayes_ridge(X, y, 0.0)


def test_huber():
    assert huber_loss(0.5, 1.0) == pytest.approx(0.125)
    assert huber_loss(2.0, 1.0) == pytest.approx(1.5)
    d = 1.3
    assert huber_loss(d, d) == pytest.approx(d * d / 2)
    rng = np.random.default_rng(2)
    x = np.linspace(0, 10, 60)
    y = 1.0 + 2.0 * x + 0.1 * rng.normal(size=60)
    y[-1] += 200.0
    h, o = fit_huber(x[:, None], y), fit_ols(x[:, None], y)
    assert abs(h.coefficients[0] - 2.0) < abs(o.coefficients[0] - 2.0)
    hist = h.objective_history
    assert all(a >= b - 1e-9 for a, b in zip(hist, hist[1:]))
    with pytest.raises(DomainError):
        fit_huber(x[:, None], y, 0.0)


def test_bagging(data):
    X, y = data
    m = bagging(X, y, "ols", b=5, seed=3)
    manual = np.mean([predict(k, X) for k in m.members], axis=0)
    assert np.max(np.abs(predict(m, X) - manual)) < 1e-12
    m2 = bagging(X, y, "ols", b=5, seed=3)
    np.testing.assert_array_equal(predict(m, X), predict(m2, X))
    clean = 1.0 + X @ np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(predict(bagging(X, clean, b=4, seed=0), X), clean, atol=1e-9)
    one = bagging(X, y, b=1, seed=9)
    idx = np.random.Generator(np.random.PCG64(np.random.SeedSequence(9).spawn(1)[0])).integers(0, 120, 120)
    np.testing.assert_allclose(one.coefficients, fit_ols(X[idx], y[idx]).coefficients)
    with pytest.raises(DomainError):
        fit("bagging", X, y)


def test_bagging_member_failure_reports_index():
    # a resample that misses row 0 has a constant zero column
    X = np.zeros((20, 1))
    X[0, 0] = 1.0
    with pytest.raises(NumericalError, match=r"bagging member \d+ failed"):
        bagging(X, np.arange(20.0), b=30, seed=0)


def test_predict_and_residuals(data):
    X, y = data
    m = fit_ols(X, y)
    m.coefficients = np.zeros(3)
    m.intercept = 7.0
    assert np.all(predict(m, X) == 7.0)
    exact = fit_ols(X, 1.0 + X @ [1.0, 1.0, 1.0])
    np.testing.assert_allclose(predict(exact, X), 1.0 + X @ [1.0, 1.0, 1.0], atol=1e-10)
    m = fit_ols(X, y)
    d = np.random.default_rng(4).normal(size=(120, 3))
    np.testing.assert_allclose(predict(m, X + d) - predict(m, X), d @ m.coefficients, atol=1e-12)
    r, f = residuals(m, X, y)
    assert np.max(np.abs(r - (y - predict(m, X)))) <= 1e-15
    with pytest.raises(Exception):
        predict(m, X[:, :2])


def test_metrics():
    y = np.array([1.0, 2.0, 3.0])
    m = metrics(y, y)
    assert (m.mae, m.mse, m.med_ae, m.r2) == (0.0, 0.0, 0.0, 1.0)
    m = metrics(y, [1.0, 2.0, 4.0])
    assert m.mae == pytest.approx(1 / 3) and m.mse == pytest.approx(1 / 3) and m.med_ae == 0 and m.r2 == 0.5
    assert metrics(y, np.full(3, y.mean())).r2 == 0.0
    assert metrics(y, [1.0, 2.0, 4.0], "pred-mean").r2 == pytest.approx(1 - 1 / ((2 / 3) ** 2 + (1 / 3) ** 2 + (4 / 3) ** 2))
    with pytest.raises(DegenerateError):
        metrics([1.0, 1.0], [1.0, 2.0])
