import math

import numpy as np
import pytest
from scipy import integrate

from windcop.errors import DataError, DegenerateError, DomainError, InsufficientDataError
from windcop.marginals import MarginalFit, compare_fits, cullen_frey, fit_marginal
from windcop.stats_core import information_criteria

TRUE = {
    "weibull": {"shape": 2.254787, "scale": 6.922302},
    "gamma": {"shape": 3.8, "rate": 0.62},
    "lognormal": {"meanlog": 1.7, "sdlog": 0.45},
}


def test_lognormal_closed_form():
    f = fit_marginal("lognormal", [1.0, math.e, math.e ** 2] * 4)
    assert f.params["meanlog"] == pytest.approx(1.0)
    assert f.params["sdlog"] == pytest.approx(math.sqrt(2 / 3))


def test_information_criteria_bookkeeping():
    aic, bic = information_criteria(-21011.08, 2, 8570)
    assert aic == pytest.approx(42026.16, abs=1e-9)
    assert bic == pytest.approx(42040.27, abs=0.01)
    f = fit_marginal("weibull", MarginalFit("weibull", TRUE["weibull"]).sample(8570, 1))
    assert f.bic - f.aic == pytest.approx((math.log(8570) - 2) * 2, abs=1e-9)


def test_distribution_oracles():
    e1 = MarginalFit.specified("weibull", shape=1.0, scale=1.0)
    assert e1.cdf(1.0) == pytest.approx(1 - math.exp(-1))
    w = MarginalFit("weibull", TRUE["weibull"])
    assert w.quantile(0.5) == pytest.approx(6.922302 * math.log(2) ** (1 / 2.254787))
    assert round(w.quantile(0.5), 2) == 5.88
    ln = MarginalFit("lognormal", TRUE["lognormal"])
    assert ln.cdf(math.exp(1.7)) == pytest.approx(0.5)
    assert w.cdf(np.inf) == 1.0


@pytest.mark.parametrize("kind", list(TRUE))
def test_pdf_integrates_and_quantile_inverts(kind):
    m = MarginalFit(kind, TRUE[kind])
    hi = m.quantile(1 - 1e-9)
    val, _ = integrate.quad(m.pdf, 0, hi, limit=200)
    assert val == pytest.approx(1.0, abs=1e-6)
    p = np.linspace(0.01, 0.99, 99)
    assert np.max(np.abs(m.cdf(m.quantile(p)) - p)) < 1e-8
    grid = np.linspace(0, hi, 500)
    assert np.all(np.diff(m.cdf(grid)) >= 0)


def test_domain_errors():
    w = MarginalFit("weibull", TRUE["weibull"])
    with pytest.raises(DomainError):
        w.cdf(-1.0)
    with pytest.raises(DomainError):
        w.quantile(1.0)
    with pytest.raises(DomainError):
        MarginalFit("weibull", {"shape": -1.0, "scale": 1.0})
    with pytest.raises(DataError):
        fit_marginal("gamma", [1.0] * 9 + [0.0])
    with pytest.raises(InsufficientDataError):
        fit_marginal("gamma", [1.0, 2.0])
    with pytest.raises(DomainError):
        fit_marginal("rayleigh", np.arange(1.0, 20.0))


@pytest.mark.parametrize("kind", list(TRUE))
def test_mle_round_trip(kind):
    truth = MarginalFit(kind, TRUE[kind])
    hits = 0
    for seed in range(20):
        x = truth.sample(10_000, seed)
        f = fit_marginal(kind, x)
        ok = all(abs(f.params[k] - v) <= 3 * f.std_errors[k] for k, v in TRUE[kind].items())
        hits += ok
        assert f.loglik >= truth.loglik_at(x) - 1e-6
    assert hits >= 19


def test_std_errors_match_fisher_information_weibull():
    x = MarginalFit("weibull", TRUE["weibull"]).sample(8570, 2)
    f = fit_marginal("weibull", x)
    # Table-6 scale standard errors at this n are about 0.035 (scale) and 0.019 (shape)
    assert 0.015 < f.std_errors["shape"] < 0.025
    assert 0.03 < f.std_errors["scale"] < 0.045


def test_compare_fits_orders_weibull_first():
    x = MarginalFit("weibull", {"shape": 2.25, "scale": 6.92}).sample(8570, 3)
    comp = compare_fits(x)
    assert [f.kind for f in comp.rows] == ["weibull", "gamma", "lognormal"]
    assert comp.rows[0].loglik > comp.rows[1].loglik > comp.rows[2].loglik
    assert len(compare_fits(x, ["gamma"]).rows) == 1
    pd = comp.plot_data(50)
    assert pd["grid"].size == 50 and set(pd["kinds"]) == {"weibull", "gamma", "lognormal"}


def test_cullen_frey():
    rng = np.random.default_rng(0)
    sym = cullen_frey(rng.normal(size=5000), n_boot=20, seed=1)
    assert sym.observed[0] < 0.01
    exp = cullen_frey(rng.exponential(size=200_000), n_boot=5, seed=1)
    assert exp.observed[0] == pytest.approx(4, abs=0.3) and exp.observed[1] == pytest.approx(9, abs=1.0)
    a = cullen_frey(rng.gamma(2, size=300), n_boot=50, seed=5)
    x = rng.gamma(2, size=300)
    np.testing.assert_array_equal(cullen_frey(x, 50, 5).bootstrap_points, cullen_frey(x, 50, 5).bootstrap_points)
    pts = np.vstack([a.bootstrap_points, [a.observed]])
    assert np.all(pts[:, 1] >= pts[:, 0] + 1 - 1e-12)
    with pytest.raises(DegenerateError):
        cullen_frey(np.ones(20))


def test_serialization_round_trip():
    f = fit_marginal("gamma", MarginalFit("gamma", TRUE["gamma"]).sample(500, 4))
    g = MarginalFit.from_dict(f.to_dict())
    assert g.params == f.params and g.loglik == f.loglik
