"""Joint distributions assembled from two marginals and a copula.

``G(x, y) = C(F1(x), F2(y))`` with density ``c(F1(x), F2(y)) f1(x) f2(y)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .copulas import CopulaFit, CopulaSpec, copula_cdf, copula_h, copula_pdf, copula_sample
from .errors import DataError, DomainError, InsufficientDataError
from .marginals import MarginalFit
from .stats_core import corr_std_error, spearman

CONDITIONAL_KINDS = (32, 33, 34, 35, 36, 37)


@dataclass
class JointModel:
    marginal_1: MarginalFit
    marginal_2: MarginalFit
    copula: CopulaFit | CopulaSpec
    labels: tuple = ("x", "y")

    def __post_init__(self):
        if not isinstance(self.marginal_1, MarginalFit) or not isinstance(self.marginal_2, MarginalFit):
            raise DomainError("both margins must be MarginalFit instances")
        if not isinstance(self.copula, (CopulaFit, CopulaSpec)):
            raise DomainError("copula must be a CopulaFit or CopulaSpec")
        self.labels = tuple(str(s) for s in self.labels)
        if len(self.labels) != 2 or self.labels[0] == self.labels[1]:
            raise DomainError(f"labels must be two distinct names, got {self.labels}")

    @property
    def spec(self):
        return self.copula.spec if isinstance(self.copula, CopulaFit) else self.copula

    def to_dict(self):
        cop = self.copula.to_dict() if isinstance(self.copula, CopulaFit) else {"spec": self.copula.to_dict()}
        return {"labels": list(self.labels), "marginal_1": self.marginal_1.to_dict(),
                "marginal_2": self.marginal_2.to_dict(), "copula": cop}

    @classmethod
    def from_dict(cls, d):
        cop = d["copula"]
        copula = CopulaFit.from_dict(cop) if "loglik" in cop else CopulaSpec.from_dict(cop["spec"])
        return cls(MarginalFit.from_dict(d["marginal_1"]), MarginalFit.from_dict(d["marginal_2"]), copula,
                   tuple(d.get("labels", ("x", "y"))))


def build_joint(m1, m2, cop, labels=("x", "y")):
    """Compose two marginals and a copula (fit or spec) into a :class:`JointModel`."""
    return JointModel(m1, m2, cop, labels)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _margin_cdf(m, x):
    # -inf lies below every support; finite negatives remain domain errors
    x = np.asarray(x, dtype=float)
    low = np.isneginf(x)
    out = np.asarray(m.cdf(np.where(low, 0.0, x)), dtype=float)
    return np.where(low, 0.0, out)


def joint_cdf(j, x, y):
    """``P(X <= x, Y <= y)``; infinite arguments give the margins or zero."""
    u, v = np.broadcast_arrays(_margin_cdf(j.marginal_1, x), _margin_cdf(j.marginal_2, y))
    return _out(np.asarray(copula_cdf(j.spec, u, v), dtype=float))


def joint_pdf(j, x, y):
    """Joint density; zero wherever a marginal density vanishes."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    f1 = np.asarray(j.marginal_1.pdf(x), dtype=float)
    f2 = np.asarray(j.marginal_2.pdf(y), dtype=float)
    u = np.asarray(j.marginal_1.cdf(x), dtype=float)
    v = np.asarray(j.marginal_2.cdf(y), dtype=float)
    c = np.asarray(copula_pdf(j.spec, u, v), dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where((f1 > 0) & (f2 > 0), c * f1 * f2, 0.0)
    return _out(out)


def conditional_uv(spec, kind, u, v):
    """The Sklar corollaries in copula coordinates ``u = F1(x)``, ``v = F2(y)``.

    ====  ==========================
    kind  probability
    ====  ==========================
    32    P(X <= x, Y <= y)
    33    P(X <= x, Y > y)
    34    P(X > x, Y <= y)
    35    P(X <= x | Y <= y)
    36    P(X <= x | Y > y)
    37    P(X <= x | Y = y)
    ====  ==========================
    """
    if kind not in CONDITIONAL_KINDS:
        raise DomainError(f"conditional kind must be one of {CONDITIONAL_KINDS}, got {kind!r}")
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if kind == 37:
        return _out(np.asarray(copula_h(spec, u, v), dtype=float))
    c = np.asarray(copula_cdf(spec, u, v), dtype=float)
    if kind == 32:
        out = c
    elif kind == 33:
        out = u - c
    elif kind == 34:
        out = v - c
    elif kind == 35:
        if np.any(v <= 0):
            raise DomainError("P(Y <= y) is zero; conditional undefined")
        out = c / v
    else:
        if np.any(v >= 1):
            raise DomainError("P(Y > y) is zero; conditional undefined")
        out = (u - c) / (1.0 - v)
    return _out(np.clip(out, 0.0, 1.0))


def conditional(j, kind, x, y):
    """Sklar corollary ``kind`` for a joint model (or a bare spec on ``[0, 1]^2``)."""
    if isinstance(j, CopulaSpec):
        return conditional_uv(j, kind, x, y)
    return conditional_uv(j.spec, kind, _margin_cdf(j.marginal_1, x), _margin_cdf(j.marginal_2, y))


def joint_sample(j, n, seed):
    """``n`` draws as an ``(n, 2)`` array: copula pairs mapped through the marginal quantiles."""
    uv = copula_sample(j.spec, n, seed)
    return np.column_stack([j.marginal_1.quantile(uv[:, 0]), j.marginal_2.quantile(uv[:, 1])])


@dataclass
class GofReport:
    spearman_real: float
    spearman_sim: float
    se_real: float
    se_sim: float
    n_real: int
    n_sim: int
    qq: tuple = field(repr=False, default=())

    @property
    def difference(self):
        return self.spearman_real - self.spearman_sim

    def to_dict(self):
        return {"spearman_real": self.spearman_real, "spearman_sim": self.spearman_sim,
                "se_real": self.se_real, "se_sim": self.se_sim, "n_real": self.n_real, "n_sim": self.n_sim,
                "difference": self.difference}


def _pairs(real_pairs):
    arr = np.asarray(real_pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError(f"pairs must have shape (n, 2), got {arr.shape}")
    if arr.shape[0] < 3:
        raise InsufficientDataError(f"goodness of fit needs at least 3 pairs, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DataError("pairs contain non-finite values")
    return arr


def qq_pairs(real, sim):
    """Sorted real values against simulated quantiles at the same plotting positions."""
    real = np.sort(np.asarray(real, dtype=float))
    sim = np.sort(np.asarray(sim, dtype=float))
    if sim.size == real.size:
        return real, sim
    return real, np.quantile(sim, (np.arange(real.size) + 0.5) / real.size)


def gof(j, real_pairs, n_sim=None, seed=100):
    """Compare Spearman correlation and marginal quantiles of real data and a fresh simulation.

    ``n_sim`` defaults to the number of real pairs.
    """
    real = _pairs(real_pairs)
    n_sim = real.shape[0] if n_sim is None else int(n_sim)
    if n_sim < 3:
        raise DomainError(f"n_sim must be at least 3, got {n_sim}")
    sim = joint_sample(j, n_sim, seed)
    r_real = spearman(real[:, 0], real[:, 1])
    r_sim = spearman(sim[:, 0], sim[:, 1])
    qq = tuple(qq_pairs(real[:, i], sim[:, i]) for i in range(2))
    return GofReport(r_real, r_sim, corr_std_error(r_real, real.shape[0]), corr_std_error(r_sim, n_sim),
                     real.shape[0], n_sim, qq)


def grid_data(j, x_grid, y_grid):
    """Rows ``(x, y, pdf, cdf)`` over the Cartesian product of two grids."""
    xs, ys = np.meshgrid(np.asarray(x_grid, dtype=float), np.asarray(y_grid, dtype=float), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    return np.column_stack([xs, ys, np.atleast_1d(joint_pdf(j, xs, ys)), np.atleast_1d(joint_cdf(j, xs, ys))])


def default_grid(j, n=41, p=0.999):
    """Evenly spaced grids from zero to the ``p`` quantile of each margin."""
    if n < 2 or not 0.0 < p < 1.0:
        raise DomainError("grid needs n >= 2 and 0 < p < 1")
    return (np.linspace(0.0, j.marginal_1.quantile(p), n), np.linspace(0.0, j.marginal_2.quantile(p), n))


def model_spearman(j, n=10**6, seed=0):
    """Monte Carlo Spearman correlation of the model (margin invariant)."""
    uv = copula_sample(j.spec, n, seed)
    return spearman(uv[:, 0], uv[:, 1])
