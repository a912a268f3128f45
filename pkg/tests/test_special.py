import math

import numpy as np
import pytest
from scipy import stats

from windcop.special import bvn_cdf, chi2_cdf, chi2_ppf, debye1, gauss_legendre


@pytest.mark.parametrize("rho", [-0.95, -0.5, 0.0, 0.3, 0.9, 0.999])
def test_bvn_against_scipy(rho):
    mvn = stats.multivariate_normal(mean=[0, 0], cov=[[1, rho], [rho, 1]])
    for x, y in [(0.0, 0.0), (-1.2, 0.7), (2.0, -2.5), (1.5, 1.5)]:
        assert bvn_cdf(x, y, rho) == pytest.approx(mvn.cdf([x, y]), abs=1e-7)


def test_bvn_independent_and_orthant():
    assert bvn_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-15)
    rho = 0.5
    assert bvn_cdf(0.0, 0.0, rho) == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), abs=1e-14)


@pytest.mark.parametrize("df", [1, 2, 3, 10])
def test_chi2_ppf_inverts_cdf(df):
    for p in (0.01, 0.5, 0.975):
        q = chi2_ppf(p, df)
        assert chi2_cdf(q, df) == pytest.approx(p, abs=1e-9)
        assert q == pytest.approx(stats.chi2.ppf(p, df), abs=1e-9)


def test_debye1():
    # D1(x) -> 1 - x/4 for small x
    assert debye1(1e-6) == pytest.approx(1 - 0.25e-6, abs=1e-12)
    assert debye1(10.0) == pytest.approx((math.pi ** 2 / 6) / 10, rel=1e-3)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8, 0.0, 2.0)
    assert np.sum(w * x ** 15) == pytest.approx(2 ** 16 / 16, rel=1e-12)
