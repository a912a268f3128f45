"""Maximum-likelihood fitting of Weibull, gamma and log-normal marginals.

Parameterizations
-----------------
weibull
    ``shape`` a, ``scale`` b: ``F(x) = 1 - exp(-(x/b)^a)``.
gamma
    ``shape`` a, ``rate`` r: density ``r^a x^(a-1) e^(-r x) / Gamma(a)``.
lognormal
    ``meanlog`` mu, ``sdlog`` sigma of ``ln X``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import numdiff
from .errors import DataError, DegenerateError, DomainError, NumericalError, WindcopError
from .rng import make_rng
from .special import digamma, gammainc, gammaincinv, gammaln, norm_cdf, norm_ppf, trigamma
from .stats_core import as_series, information_criteria, moments

KINDS = ("weibull", "gamma", "lognormal")
PARAM_NAMES = {
    "weibull": ("shape", "scale"),
    "gamma": ("shape", "rate"),
    "lognormal": ("meanlog", "sdlog"),
}
MIN_N = 10


def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError(f"unknown distribution {kind!r}; choose from {KINDS}")


def _check_params(kind, params):
    names = PARAM_NAMES[kind]
    missing = [n for n in names if n not in params]
    if missing:
        raise DomainError(f"{kind} needs parameters {names}, missing {missing}")
    for n in names:
        v = params[n]
        if not math.isfinite(v):
            raise DomainError(f"{kind} parameter {n} must be finite, got {v}")
        if n != "meanlog" and v <= 0:
            raise DomainError(f"{kind} parameter {n} must be positive, got {v}")


def _loglik_vec(kind, theta, x, logx):
    """Log-likelihood in the reported parameterization; -inf outside the domain."""
    p, q = theta
    n = x.size
    if kind == "weibull":
        if p <= 0 or q <= 0:
            return -math.inf
        return float(n * math.log(p) - n * p * math.log(q) + (p - 1.0) * logx.sum()
                     - np.sum(np.exp(p * (logx - math.log(q)))))
    if kind == "gamma":
        if p <= 0 or q <= 0:
            return -math.inf
        return float(n * (p * math.log(q) - gammaln(p)) + (p - 1.0) * logx.sum() - q * x.sum())
    if q <= 0:
        return -math.inf
    z = (logx - p) / q
    return float(-n * (0.5 * math.log(2.0 * math.pi) + math.log(q)) - logx.sum() - 0.5 * (z @ z))


@dataclass
class MarginalFit:
    """A univariate distribution, fitted or specified.

    ``loglik``, ``aic`` and ``bic`` are ``None`` for specified models.
    """

    kind: str
    params: dict
    loglik: float | None = None
    aic: float | None = None
    bic: float | None = None
    std_errors: dict = field(default_factory=dict)
    n: int = 0
    iterations: int = 0

    def __post_init__(self):
        _check_kind(self.kind)
        self.params = {k: float(v) for k, v in self.params.items()}
        _check_params(self.kind, self.params)

    @classmethod
    def specified(cls, kind, **params):
        return cls(kind, params)

    @property
    def k(self):
        return 2

    def _theta(self):
        return tuple(self.params[n] for n in PARAM_NAMES[self.kind])

    def _x(self, x, allow_inf=False):
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)) or np.any(x < 0):
            raise DomainError(f"{self.kind} is supported on x >= 0")
        if not allow_inf and np.any(np.isinf(x)):
            raise DomainError("x must be finite")
        return x

    def logpdf(self, x):
        x = self._x(x)
        a, b = self._theta()
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(x)
            if self.kind == "weibull":
                out = math.log(a) - a * math.log(b) + (a - 1.0) * lx - np.exp(a * (lx - math.log(b)))
                if a == 1.0:
                    out = np.where(x == 0, -math.log(b), out)
            elif self.kind == "gamma":
                out = a * math.log(b) - gammaln(a) + (a - 1.0) * lx - b * x
                if a == 1.0:
                    out = np.where(x == 0, math.log(b), out)
            else:
                z = (lx - a) / b
                out = -0.5 * z * z - lx - math.log(b) - 0.5 * math.log(2.0 * math.pi)
                out = np.where(x == 0, -math.inf, out)
        out = np.where(np.isnan(out), -math.inf, out)
        return out if out.ndim else float(out)

    def pdf(self, x):
        out = np.exp(self.logpdf(x))
        return out if np.ndim(out) else float(out)

    def cdf(self, x):
        x = self._x(x, allow_inf=True)
        a, b = self._theta()
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "weibull":
                out = -np.expm1(-np.power(x / b, a))
            elif self.kind == "gamma":
                out = gammainc(a, b * x)
            else:
                out = norm_cdf((np.log(x) - a) / b)
        out = np.where(np.isinf(x), 1.0, out)
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~((p > 0) & (p < 1))):
            raise DomainError("probabilities must lie strictly inside (0, 1)")
        a, b = self._theta()
        if self.kind == "weibull":
            out = b * np.power(-np.log1p(-p), 1.0 / a)
        elif self.kind == "gamma":
            out = gammaincinv(a, p) / b
        else:
            out = np.exp(a + b * norm_ppf(p))
        return out if out.ndim else float(out)

    def sample(self, n, seed):
        rng = make_rng(seed)
        a, b = self._theta()
        if self.kind == "weibull":
            return b * rng.weibull(a, size=n)
        if self.kind == "gamma":
            return rng.gamma(a, 1.0 / b, size=n)
        return rng.lognormal(a, b, size=n)

    def loglik_at(self, data):
        x = _positive_data(data)
        return _loglik_vec(self.kind, self._theta(), x, np.log(x))

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params), "loglik": self.loglik, "aic": self.aic,
                "bic": self.bic, "std_errors": dict(self.std_errors), "n": self.n}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], d["params"], d.get("loglik"), d.get("aic"), d.get("bic"),
                   dict(d.get("std_errors", {})), int(d.get("n", 0)))


def _positive_data(data):
    x = as_series(data, "data", MIN_N)
    if np.any(x <= 0):
        bad = int(np.flatnonzero(x <= 0)[0])
        raise DataError(f"data must be positive; value {x[bad]} at index {bad}")
    return x


def _weibull_mle(logx, tol=1e-12, max_iter=200):
    """Shape from the profile score equation, scale in closed form.

    ``g(a) = sum(w ln x) / sum(w) - 1/a - mean(ln x)`` with ``w = x^a`` is
    strictly increasing in ``a``; safeguarded Newton with a bisection bracket.
    """
    ybar = logx.mean()
    y = logx - logx.max()  # x^a rescaled to avoid overflow
    sd = float(np.std(logx))
    if sd == 0.0:
        raise DegenerateError("Weibull fit undefined for constant data")

    def g(a):
        w = np.exp(a * y)
        sw = w.sum()
        m1 = float(w @ logx) / sw
        m2 = float(w @ (logx * logx)) / sw
        return m1 - 1.0 / a - ybar, (m2 - m1 * m1) + 1.0 / (a * a)

    lo, hi = 1e-8, math.pi / (math.sqrt(6.0) * sd)
    while g(hi)[0] < 0:
        lo, hi = hi, hi * 2.0
        if hi > 1e8:
            raise NumericalError("Weibull shape bracket search diverged")
    a = min(max(math.pi / (math.sqrt(6.0) * sd), lo), hi)
    trace = []
    for it in range(1, max_iter + 1):
        val, der = g(a)
        trace.append((a, val))
        if val < 0:
            lo = a
        else:
            hi = a
        step = a - val / der
        a_new = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(a_new - a) <= tol * a:
            a = a_new
            break
        a = a_new
    else:
        raise NumericalError(f"Weibull shape solver did not converge; last iterates {trace[-3:]}")
    scale = math.exp(logx.max() + math.log(np.mean(np.exp(a * y))) / a)
    return (a, scale), it


def _gamma_mle(x, logx, tol=1e-12, max_iter=100):
    """Newton on ``ln a - digamma(a) = ln(mean) - mean(ln x)`` from Minka's start."""
    s = math.log(x.mean()) - logx.mean()
    if not s > 0:
        raise DegenerateError("gamma fit undefined for constant data")
    a = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    trace = []
    for it in range(1, max_iter + 1):
        f = math.log(a) - float(digamma(a)) - s
        fp = 1.0 / a - float(trigamma(a))
        trace.append((a, f))
        a_new = a - f / fp
        if a_new <= 0:
            a_new = 0.5 * a
        if abs(a_new - a) <= tol * a:
            a = a_new
            break
        a = a_new
    else:
        raise NumericalError(f"gamma shape solver did not converge; last iterates {trace[-3:]}")
    return (a, a / x.mean()), it


def fit_marginal(kind, data):
    """Maximum-likelihood fit of ``kind`` to positive ``data`` (n >= 10).

    Standard errors are the square roots of the diagonal of the inverse
    numeric observed information in the reported parameterization.
    """
    _check_kind(kind)
    x = _positive_data(data)
    logx = np.log(x)
    n = x.size
    if kind == "weibull":
        theta, it = _weibull_mle(logx)
    elif kind == "gamma":
        theta, it = _gamma_mle(x, logx)
    else:
        sd = float(np.std(logx))
        if sd == 0.0:
            raise DegenerateError("log-normal fit undefined for constant data")
        theta, it = (float(logx.mean()), sd), 0
    ll = numdiff.check_finite(_loglik_vec(kind, theta, x, logx), "log-likelihood")
    aic, bic = information_criteria(ll, 2, n)
    ses = numdiff.std_errors(lambda t: _loglik_vec(kind, t, x, logx), np.array(theta))
    names = PARAM_NAMES[kind]
    return MarginalFit(kind, dict(zip(names, map(float, theta))), ll, aic, bic,
                       dict(zip(names, ses)), n, it)


@dataclass(frozen=True)
class CullenFreyData:
    """Skewness-squared / kurtosis points for a Cullen-Frey graph (kurtosis non-excess)."""

    observed: tuple
    bootstrap_points: np.ndarray
    reference_points: dict
    reference_curves: dict


def _sq_skew_kurt(x):
    g1, g2 = moments(x)
    return g1 * g1, g2 + 3.0


def cullen_frey(data, n_boot=500, seed=0):
    """Observed and bootstrapped (skewness^2, kurtosis) plus reference markers.

    Moments are the biased sample moments, so each point satisfies
    ``kurtosis >= skewness^2 + 1``.
    """
    x = as_series(data, "data", MIN_N)
    if np.std(x) == 0.0:
        raise DegenerateError("Cullen-Frey diagnostics undefined for constant data")
    obs = _sq_skew_kurt(x)
    rng = make_rng(seed)
    pts = np.empty((n_boot, 2))
    for i in range(n_boot):
        xb = x[rng.integers(0, x.size, size=x.size)]
        if np.ptp(xb) == 0.0:
            pts[i] = (0.0, 1.0)  # degenerate resample: minimum feasible kurtosis
        else:
            pts[i] = _sq_skew_kurt(xb)
    ref_points = {"normal": (0.0, 3.0), "uniform": (0.0, 1.8), "exponential": (4.0, 9.0),
                  "logistic": (0.0, 4.2)}
    shapes = np.geomspace(0.05, 1e4, 200)
    gamma_curve = np.column_stack([4.0 / shapes, 3.0 + 6.0 / shapes])
    sig = np.linspace(0.01, 1.0, 200)
    w = np.exp(sig * sig)
    lnorm_curve = np.column_stack([(w + 2.0) ** 2 * (w - 1.0), w ** 4 + 2 * w ** 3 + 3 * w ** 2 - 3.0])
    return CullenFreyData((float(obs[0]), float(obs[1])), pts, ref_points,
                          {"gamma": gamma_curve[::-1], "lognormal": lnorm_curve})


@dataclass
class FitComparison:
    """Fits sorted by BIC ascending plus per-kind failure messages."""

    rows: list
    failures: dict
    data: np.ndarray = field(repr=False)

    def best(self):
        if not self.rows:
            raise NumericalError(f"no distribution could be fitted: {self.failures}")
        return self.rows[0]

    def plot_data(self, n_grid=200):
        """Density, CDF, Q-Q and P-P series for each fitted kind.

        Plotting positions are ``(i - 0.5) / n`` of the sorted data.
        """
        x = np.sort(self.data)
        n = x.size
        pp = (np.arange(1, n + 1) - 0.5) / n
        grid = np.linspace(0.0, x[-1], n_grid)
        hist, edges = np.histogram(x, bins="auto", density=True)
        out = {"grid": grid, "sorted": x, "positions": pp,
               "histogram": (0.5 * (edges[:-1] + edges[1:]), hist), "kinds": {}}
        for f in self.rows:
            out["kinds"][f.kind] = {
                "density": f.pdf(grid),
                "cdf": f.cdf(grid),
                "qq_theoretical": f.quantile(pp),
                "pp_fitted": f.cdf(x),
            }
        return out


def compare_fits(data, kinds=KINDS, workers=1):
    """Fit each kind, sort by BIC, and keep going past per-kind failures."""
    x = _positive_data(data)
    kinds = tuple(kinds)
    for k in kinds:
        _check_kind(k)

    def one(kind):
        try:
            return kind, fit_marginal(kind, x), None
        except WindcopError as exc:
            return kind, None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, kinds))
    else:
        results = [one(k) for k in kinds]
    rows = sorted((f for _, f, _ in results if f is not None), key=lambda f: (f.bic, f.kind))
    failures = {k: msg for k, _, msg in results if msg is not None}
    return FitComparison(rows, failures, x)
