import math

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from windcop.copulas import (FAMILIES, CopulaFit, CopulaSpec, check_pobs, copula_cdf, copula_fit, copula_h,
                             copula_hinv, copula_loglik, copula_logpdf, copula_pdf, copula_sample, copula_select,
                             copula_tau, family_specs, parse_family, tau_numeric)
from windcop.errors import DataError, DomainError, InsufficientDataError
from windcop.special import gauss_legendre
from windcop.stats_core import kendall_tau, pobs

REPRESENTATIVE = {
    "independence": (),
    "gaussian": (0.5,),
    "frank": (5.0,),
    "clayton": (2.0,),
    "gumbel": (2.0,),
    "joe": (2.0,),
    "bb1": (0.5, 1.5),
    "bb6": (1.5, 1.5),
    "bb7": (1.5, 1.5),
    "bb8": (2.27, 0.9),
}


def spec(name, survival=False):
    return CopulaSpec(name, *REPRESENTATIVE[name], rotation="survival_180" if survival else "none")


ALL_SPECS = ([spec(f) for f in REPRESENTATIVE]
             + [spec(f, True) for f in REPRESENTATIVE if f not in ("independence", "gaussian", "frank")]
             + [CopulaSpec("gaussian", -0.7), CopulaSpec("frank", -4.0), CopulaSpec("bb1", 1.2, 2.0),
                CopulaSpec("bb6", 2.0, 1.2), CopulaSpec("bb7", 2.0, 0.5), CopulaSpec("bb8", 3.0, 0.6),
                CopulaSpec("joe", 4.0), CopulaSpec("clayton", 0.5), CopulaSpec("gumbel", 1.5)])
IDS = [f"{s.label}{s.params}" for s in ALL_SPECS]


# -- parsing and validation ---------------------------------------------------

@pytest.mark.parametrize("text, expected", [
    ("clayton", ("clayton", "none")), ("survival_clayton", ("clayton", "survival_180")),
    ("sgumbel", ("gumbel", "survival_180")), ("bb8_180", ("bb8", "survival_180")),
    ("13", ("clayton", "survival_180")), (5, ("frank", "none")), ("0", ("independence", "none")),
    (20, ("bb8", "survival_180")),
])
def test_parse_family(text, expected):
    assert parse_family(text) == expected


def test_t_copula_rejected():
    with pytest.raises(DomainError, match="t copula"):
        parse_family(2)


@pytest.mark.parametrize("name, params", [
    ("clayton", (0.0,)), ("gumbel", (0.9,)), ("joe", (0.5,)), ("gaussian", (1.0,)), ("bb1", (0.5, 0.9)),
    ("bb6", (0.9, 2.0)), ("bb7", (2.0, 0.0)), ("bb8", (2.0, 1.1)), ("bb8", (0.5, 0.5)),
])
def test_domain_violations(name, params):
    with pytest.raises(DomainError):
        CopulaSpec(name, *params)


def test_spec_round_trip_and_label():
    s = CopulaSpec("survival_bb8", 2.27, 0.9)
    assert s.label == "survival_bb8" and s.k == 2
    assert CopulaSpec.from_dict(s.to_dict()) == s
    with pytest.raises(DomainError):
        CopulaSpec("independence", rotation="survival_180")


# -- closed-form values ---------------------------------------------------------

def test_cdf_closed_forms():
    assert copula_cdf(CopulaSpec("gumbel", 2.0), 0.5, 0.5) == pytest.approx(math.exp(-math.sqrt(2) * math.log(2)),
                                                                            abs=1e-14)
    frank = -math.log1p(math.expm1(-0.5) ** 2 / math.expm1(-1.0))
    assert copula_cdf(CopulaSpec("frank", 1.0), 0.5, 0.5) == pytest.approx(frank, abs=1e-14)
    assert copula_cdf(CopulaSpec("clayton", 2.0), 0.5, 0.5) == pytest.approx(7 ** -0.5, abs=1e-14)
    assert copula_cdf(CopulaSpec("gaussian", 0.0), 0.3, 0.6) == pytest.approx(0.18, abs=1e-12)


def test_tau_closed_forms():
    assert copula_tau(CopulaSpec("clayton", 2.0)) == pytest.approx(0.5, abs=1e-12)
    assert copula_tau(CopulaSpec("gumbel", 1.33)) == pytest.approx(0.248, abs=5e-4)
    assert copula_tau(CopulaSpec("gaussian", 0.17)) == pytest.approx(2 / math.pi * math.asin(0.17), abs=1e-14)
    assert copula_tau(CopulaSpec("bb1", 0.07, 1.02)) == pytest.approx(0.0527, abs=1e-4)
    assert copula_tau(CopulaSpec("survival_gumbel", 2.0)) == copula_tau(CopulaSpec("gumbel", 2.0))
    assert copula_tau(CopulaSpec("frank", 1e-9)) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("name", [f for f in REPRESENTATIVE if f != "independence"])
def test_tau_product_rule_cross_check(name):
    fam = FAMILIES[name]
    assert tau_numeric(fam, REPRESENTATIVE[name]) == pytest.approx(fam.tau(REPRESENTATIVE[name]), abs=1e-4)


@pytest.mark.parametrize("name, grid", [
    ("frank", [-20, -2, -1e-3, 1e-3, 0.5, 3, 10, 40]), ("gumbel", [1, 1.1, 2, 5, 20]),
    ("clayton", [1e-3, 0.5, 2, 10, 40]), ("joe", [1, 1.2, 2, 6, 30]),
])
def test_tau_monotone(name, grid):
    taus = [copula_tau(CopulaSpec(name, t)) for t in grid]
    assert all(b >= a for a, b in zip(taus, taus[1:]))


def test_joe_numeric_tau_matches_closed_form():
    from windcop.copulas import joe_tau_closed
    for t in (1.5, 3.0, 12.0):
        assert FAMILIES["joe"].tau((t,)) == pytest.approx(joe_tau_closed(t), abs=1e-10)


def graded_rule(n=24):
    # Gauss-Legendre panels refined geometrically toward both edges
    edges = np.concatenate([[0.0], 0.5 * 0.25 ** np.arange(8, 0, -1), [0.5]])
    edges = np.unique(np.concatenate([edges, 1.0 - edges]))
    parts = [gauss_legendre(n, a, b) for a, b in zip(edges[:-1], edges[1:])]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


# -- density -------------------------------------------------------------------

def test_independence_and_gaussian_zero_density():
    u = np.linspace(0.05, 0.95, 7)
    assert np.all(copula_pdf(CopulaSpec("independence"), u, u[::-1]) == 1.0)
    np.testing.assert_allclose(copula_pdf(CopulaSpec("gaussian", 0.0), u, u[::-1]), 1.0, atol=1e-14)


@pytest.mark.parametrize("s", ALL_SPECS, ids=IDS)
def test_density_integrates_to_one(s):
    x, w = graded_rule()
    u, v = np.meshgrid(x, x, indexing="ij")
    assert float(w @ copula_pdf(s, u, v) @ w) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("s", ALL_SPECS, ids=IDS)
def test_density_matches_mixed_partial_of_cdf(s):
    h = 1e-4
    pts = np.array([0.2, 0.45, 0.7])
    for a in pts:
        for b in pts:
            num = (copula_cdf(s, a + h, b + h) - copula_cdf(s, a + h, b - h) - copula_cdf(s, a - h, b + h)
                   + copula_cdf(s, a - h, b - h)) / (4 * h * h)
            assert num == pytest.approx(copula_pdf(s, a, b), rel=1e-4)


@pytest.mark.parametrize("s", ALL_SPECS, ids=IDS)
def test_h_matches_cdf_derivative(s):
    eps = 1e-6
    for a in (0.1, 0.5, 0.9):
        for b in (0.15, 0.5, 0.85):
            num = (copula_cdf(s, a, b + eps) - copula_cdf(s, a, b - eps)) / (2 * eps)
            assert copula_h(s, a, b) == pytest.approx(num, abs=1e-6)


def test_boundary_clamp_flag():
    s = CopulaSpec("gumbel", 2.0)
    val, flag = copula_logpdf(s, 0.0, 0.5, return_flag=True)
    assert flag and math.isfinite(val)
    _, flag = copula_logpdf(s, 0.3, 0.5, return_flag=True)
    assert not flag
    with pytest.raises(DomainError):
        copula_cdf(s, 1.2, 0.5)


# -- axioms (fast form; the acceptance suite runs the full grid) ------------------

@pytest.mark.parametrize("s", ALL_SPECS, ids=IDS)
def test_axioms_and_exchangeability(s):
    g = np.linspace(0, 1, 11)
    U, V = np.meshgrid(g, g, indexing="ij")
    C = copula_cdf(s, U, V)
    np.testing.assert_allclose(C[:, -1], g, atol=1e-12)
    np.testing.assert_allclose(C[-1, :], g, atol=1e-12)
    assert np.all(C[0, :] == 0) and np.all(C[:, 0] == 0)
    assert np.all(C >= np.maximum(U + V - 1, 0) - 1e-12) and np.all(C <= np.minimum(U, V) + 1e-12)
    vol = C[1:, 1:] - C[:-1, 1:] - C[1:, :-1] + C[:-1, :-1]
    assert vol.min() >= -1e-9
    np.testing.assert_allclose(C, C.T, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALL_SPECS), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_hinv_inverts_h(s, w, v):
    u = copula_hinv(s, w, v)
    assert copula_h(s, u, v) == pytest.approx(w, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALL_SPECS), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_cdf_monotone_in_u(s, a, b, v):
    lo, hi = min(a, b), max(a, b)
    assert copula_cdf(s, lo, v) <= copula_cdf(s, hi, v) + 1e-12


# -- sampling ------------------------------------------------------------------

def test_sample_is_deterministic_and_inside():
    s = spec("bb7")
    a, b = copula_sample(s, 500, 3), copula_sample(s, 500, 3)
    np.testing.assert_array_equal(a, b)
    assert np.all((a > 0) & (a < 1))
    with pytest.raises(DomainError):
        copula_sample(s, 0, 1)


@pytest.mark.parametrize("s", [CopulaSpec("independence"), CopulaSpec("gaussian", 0.5), spec("bb8"),
                               CopulaSpec("survival_clayton", 3.0)], ids=lambda s: s.label)
def test_sample_tau(s):
    uv = copula_sample(s, 20_000, 11)
    assert kendall_tau(uv[:, 0], uv[:, 1]) == pytest.approx(copula_tau(s), abs=0.02)


def test_empirical_copula_sup_distance():
    s = spec("gumbel")
    n = 100_000
    uv = copula_sample(s, n, 5)
    g = np.linspace(0.05, 0.95, 19)
    su, sv = np.sort(uv[:, 0]), uv[np.argsort(uv[:, 0]), 1]
    worst = 0.0
    for a in g:
        k = np.searchsorted(su, a, side="right")
        emp = np.array([np.count_nonzero(sv[:k] <= b) for b in g]) / n
        worst = max(worst, float(np.max(np.abs(emp - copula_cdf(s, a, g)))))
    assert worst < 2 * 1.5 / math.sqrt(n)


# -- fitting and selection -----------------------------------------------------

def test_check_pobs():
    with pytest.raises(InsufficientDataError):
        check_pobs(np.full((10, 2), 0.5))
    with pytest.raises(DataError):
        check_pobs(np.column_stack([np.linspace(0, 1, 40), np.full(40, 0.5)]))


def test_fit_gumbel_recovers_parameter():
    U = pobs(copula_sample(CopulaSpec("gumbel", 2.0), 5000, 1))
    fit = copula_fit("gumbel", U)
    assert 1.9 <= fit.spec.theta <= 2.1
    assert fit.loglik >= copula_loglik(CopulaSpec("gumbel", 2.0), U) - 1e-6
    assert fit.bic - fit.aic == pytest.approx((math.log(5000) - 2) * 1, abs=1e-9)
    assert not fit.boundary and fit.se[0] > 0
    assert CopulaFit.from_dict(fit.to_dict()).spec == fit.spec


def test_fit_two_parameter_family_optimality():
    true = CopulaSpec("bb8", 2.27, 0.9)
    U = pobs(copula_sample(true, 3000, 2))
    fit = copula_fit("bb8", U)
    assert fit.loglik >= copula_loglik(true, U) - 1e-6


def test_fit_survival_variant():
    U = pobs(copula_sample(CopulaSpec("survival_clayton", 2.0), 3000, 4))
    fit = copula_fit("survival_clayton", U)
    assert fit.spec.survival and fit.spec.theta == pytest.approx(2.0, abs=0.2)


def test_fit_frank_on_independent_data():
    U = pobs(np.random.default_rng(3).random((5000, 2)))
    assert abs(copula_fit("frank", U).tau) < 0.03


def test_boundary_flag():
    U = pobs(np.random.default_rng(4).random((2000, 2)))
    fit = copula_fit("gumbel", U)
    assert fit.boundary and fit.se == ()


def test_select_independence_under_bic():
    U = pobs(np.random.default_rng(5).random((2000, 2)))
    sel = copula_select(U, ["independence", "gaussian", "frank", "clayton", "gumbel"])
    assert sel.best.spec.family == "independence" and sel.best.k == 0
    assert [r["rank"] for r in sel.table()] == [1, 2, 3, 4, 5]


def test_select_ordering_is_deterministic():
    U = pobs(copula_sample(CopulaSpec("frank", 4.0), 1000, 6))
    a = copula_select(U, ["frank", "gaussian", "clayton"], "aic")
    b = copula_select(U, ["frank", "gaussian", "clayton"], "aic", workers=3)
    assert [f.spec.label for f in a.ranked] == [f.spec.label for f in b.ranked]
    assert [f.aic for f in a.ranked] == sorted(f.aic for f in a.ranked)
    with pytest.raises(DomainError):
        copula_select(U, ["frank"], "hqic")


def test_default_family_list():
    specs = family_specs()
    assert len(specs) == 17 and ("bb8", "survival_180") in specs
