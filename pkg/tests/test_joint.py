import math

import numpy as np
import pytest

from windcop.copulas import CopulaSpec, copula_fit, copula_sample
from windcop.errors import DataError, DomainError, InsufficientDataError
from windcop.joint import (GofReport, JointModel, build_joint, conditional, conditional_uv, default_grid, gof,
                           grid_data, joint_cdf, joint_pdf, joint_sample, model_spearman, qq_pairs)
from windcop.marginals import MarginalFit
from windcop.special import gauss_legendre
from windcop.stats_core import corr_std_error, pobs, spearman

M1 = MarginalFit.specified("weibull", shape=2.254787, scale=6.922302)
M2 = MarginalFit.specified("weibull", shape=2.43, scale=7.79)
BB8 = CopulaSpec("bb8", 2.27, 0.9)
MODEL_SPEARMAN = 0.4544360646841291  # 1e6 draws, seed 0


@pytest.fixture
def joint():
    return build_joint(M1, M2, BB8, ("east", "west"))


def test_validation():
    with pytest.raises(DomainError):
        JointModel(M1, "gauss", BB8)
    with pytest.raises(DomainError):
        JointModel(M1, M2, BB8, ("a", "a"))


def test_round_trip(joint):
    assert JointModel.from_dict(joint.to_dict()).to_dict() == joint.to_dict()
    U = pobs(copula_sample(BB8, 500, 1))
    fitted = build_joint(M1, M2, copula_fit("bb8", U))
    again = JointModel.from_dict(fitted.to_dict())
    assert again.spec == fitted.spec and again.copula.loglik == fitted.copula.loglik


def test_cdf_limits(joint):
    for y in (2.0, 5.0, 11.0):
        assert joint_cdf(joint, np.inf, y) == pytest.approx(M2.cdf(y), abs=1e-14)
        assert joint_cdf(joint, -np.inf, y) == 0.0
    assert joint_cdf(joint, 4.0, np.inf) == pytest.approx(M1.cdf(4.0), abs=1e-14)
    with pytest.raises(DomainError):
        joint_cdf(joint, -1.0, 2.0)


def test_frechet_bounds_and_monotone(joint):
    g = np.linspace(0, 20, 41)
    X, Y = np.meshgrid(g, g, indexing="ij")
    G = joint_cdf(joint, X, Y)
    F1, F2 = M1.cdf(X), M2.cdf(Y)
    assert np.all(G <= np.minimum(F1, F2) + 1e-12)
    assert np.all(G >= np.maximum(F1 + F2 - 1, 0) - 1e-12)
    assert np.all(np.diff(G, axis=0) >= -1e-12) and np.all(np.diff(G, axis=1) >= -1e-12)


def test_density_integrates_to_one(joint):
    x, w = gauss_legendre(96, 0.0, 30.0)
    X, Y = np.meshgrid(x, x, indexing="ij")
    assert float(w @ joint_pdf(joint, X, Y) @ w) == pytest.approx(1.0, abs=2e-3)
    assert joint_pdf(joint, 0.0, 3.0) == 0.0


def test_sklar_identities(joint):
    x, y = np.array([1.0, 4.0, 7.5, 12.0]), np.array([3.0, 6.0, 9.0, 2.5])
    c32 = conditional(joint, 32, x, y)
    np.testing.assert_allclose(c32 + conditional(joint, 33, x, y), M1.cdf(x), atol=1e-14)
    np.testing.assert_allclose(c32 + conditional(joint, 34, x, y), M2.cdf(y), atol=1e-14)
    np.testing.assert_allclose(conditional(joint, 35, x, y), c32 / M2.cdf(y), rtol=1e-12)
    np.testing.assert_allclose(conditional(joint, 36, x, y), (M1.cdf(x) - c32) / (1 - M2.cdf(y)), rtol=1e-12)


def test_frank_conditional_value():
    s = CopulaSpec("frank", 1.0)
    c = -math.log1p(math.expm1(-0.5) ** 2 / math.expm1(-1.0))
    assert conditional(s, 32, 0.5, 0.5) == pytest.approx(c, abs=1e-14)
    assert conditional(s, 35, 0.5, 0.5) == pytest.approx(2 * c, abs=1e-14)
    assert conditional(s, 35, 0.5, 0.5) == pytest.approx(0.56186, abs=1e-5)


def test_conditional_domain():
    s = CopulaSpec("gumbel", 2.0)
    with pytest.raises(DomainError):
        conditional_uv(s, 35, 0.5, 0.0)
    with pytest.raises(DomainError):
        conditional_uv(s, 36, 0.5, 1.0)
    with pytest.raises(DomainError):
        conditional_uv(s, 38, 0.5, 0.5)


def test_conditional_on_equality_integrates_to_margin():
    # integrating P(U <= u | V = v) over v recovers u
    x, w = gauss_legendre(64)
    for s in (BB8, CopulaSpec("survival_gumbel", 1.8), CopulaSpec("frank", -3.0)):
        for u in (0.2, 0.5, 0.8):
            assert float(w @ conditional_uv(s, 37, np.full_like(x, u), x)) == pytest.approx(u, abs=1e-3)


def test_sample_pit_uniform(joint):
    xy = joint_sample(joint, 100_000, 9)
    assert xy.shape == (100_000, 2) and np.all(xy > 0)
    for m, col in ((M1, xy[:, 0]), (M2, xy[:, 1])):
        u = np.sort(m.cdf(col))
        ecdf = np.arange(1, u.size + 1) / u.size
        assert np.max(np.abs(ecdf - u)) < 1.63 / math.sqrt(u.size)  # KS at 1%
    np.testing.assert_array_equal(joint_sample(joint, 50, 3), joint_sample(joint, 50, 3))


def test_sample_spearman_matches_model(joint):
    n = 8570
    r = spearman(*joint_sample(joint, n, 21).T)
    assert abs(r - MODEL_SPEARMAN) < 3 * corr_std_error(MODEL_SPEARMAN, n)


def test_model_spearman_is_margin_free(joint):
    other = build_joint(MarginalFit.specified("gamma", shape=2.0, rate=0.5), M2, BB8)
    assert model_spearman(joint, 20_000, 2) == model_spearman(other, 20_000, 2)


def test_independence_spearman():
    j = build_joint(M1, M2, CopulaSpec("independence"))
    assert abs(spearman(*joint_sample(j, 20_000, 4).T)) < 0.03


def test_gof_self_consistency(joint):
    real = joint_sample(joint, 3000, 1)
    rep = gof(joint, real, seed=2)
    assert isinstance(rep, GofReport)
    assert abs(rep.difference) < 3 * math.hypot(rep.se_real, rep.se_sim)
    assert rep.se_real == corr_std_error(rep.spearman_real, 3000)
    assert rep.n_sim == 3000 and len(rep.qq) == 2
    assert gof(joint, real, seed=2).to_dict() == rep.to_dict()
    assert gof(joint, real, n_sim=500, seed=2).n_sim == 500


def test_gof_input_checks(joint):
    with pytest.raises(InsufficientDataError):
        gof(joint, np.ones((2, 2)))
    with pytest.raises(DataError):
        gof(joint, np.ones((5, 3)))
    with pytest.raises(DataError):
        gof(joint, np.array([[1.0, np.nan]] * 5))


def test_qq_pairs_unequal_sizes():
    real, sim = qq_pairs([3.0, 1.0, 2.0], np.arange(1000.0))
    assert list(real) == [1.0, 2.0, 3.0]
    np.testing.assert_allclose(sim, np.quantile(np.arange(1000.0), [1 / 6, 1 / 2, 5 / 6]))


def test_grid(joint):
    xg, yg = default_grid(joint, n=5)
    assert xg[0] == 0.0 and xg[-1] == pytest.approx(M1.quantile(0.999))
    rows = grid_data(joint, xg, yg)
    assert rows.shape == (25, 4)
    assert rows[-1, 3] == pytest.approx(joint_cdf(joint, xg[-1], yg[-1]))
