"""Unrotated bivariate copula families.

Each family works on interior points ``0 < u, v < 1`` (the public layer in
:mod:`windcop.copulas` handles boundaries, clamping and the survival
rotation). ``h(params, u, v)`` is the conditional distribution
``P(U <= u | V = v) = dC/dv``; since every family is exchangeable,
``dC/du(u, v) = h(params, v, u)``.
"""

import math

import numpy as np
from scipy import optimize

from ..errors import DomainError
from ..special import bvn_cdf, debye1, digamma, gauss_legendre, norm_cdf, norm_ppf
from ._generators import generator


class Family:
    name = ""
    param_names = ()
    # (lower, upper, lower_open) used by validation
    domain = ()
    # search box for maximum likelihood
    fit_bounds = ()

    @property
    def n_params(self):
        return len(self.param_names)

    def validate(self, params):
        if len(params) != self.n_params:
            raise DomainError(f"{self.name} takes {self.n_params} parameter(s), got {len(params)}")
        for name, value, (lo, hi, lo_open, hi_open) in zip(self.param_names, params, self.domain):
            if not math.isfinite(value):
                raise DomainError(f"{self.name} parameter {name} must be finite, got {value}")
            below = value <= lo if lo_open else value < lo
            above = value >= hi if hi_open else value > hi
            if below or above:
                lb = "(" if lo_open else "["
                rb = ")" if hi_open else "]"
                raise DomainError(f"{self.name} parameter {name}={value} outside {lb}{lo}, {hi}{rb}")

    def cdf(self, params, u, v):
        raise NotImplementedError

    def logpdf(self, params, u, v):
        raise NotImplementedError

    def h(self, params, u, v):
        raise NotImplementedError

    def hinv(self, params, w, v):
        """Solve ``h(u | v) = w`` for ``u``; ``None`` means use bisection."""
        return None

    def tau(self, params):
        return tau_numeric(self, params)

    def tau_start(self, tau):
        """Parameters whose Kendall tau is (close to) ``tau``, clipped into the fit box."""
        raise NotImplementedError


class Independence(Family):
    name = "independence"

    def cdf(self, params, u, v):
        return u * v

    def logpdf(self, params, u, v):
        return np.zeros(np.broadcast(u, v).shape)

    def h(self, params, u, v):
        return np.broadcast_to(u, np.broadcast(u, v).shape).astype(float)

    def hinv(self, params, w, v):
        return np.asarray(w, dtype=float)

    def tau(self, params):
        return 0.0


class Gaussian(Family):
    name = "gaussian"
    param_names = ("rho",)
    domain = ((-1.0, 1.0, True, True),)
    fit_bounds = ((-0.9999, 0.9999),)

    def cdf(self, params, u, v):
        return bvn_cdf(norm_ppf(u), norm_ppf(v), params[0])

    def logpdf(self, params, u, v):
        r = params[0]
        x = norm_ppf(u)
        y = norm_ppf(v)
        one_m = 1.0 - r * r
        return -0.5 * math.log(one_m) - (r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * one_m)

    def h(self, params, u, v):
        r = params[0]
        return norm_cdf((norm_ppf(u) - r * norm_ppf(v)) / math.sqrt(1.0 - r * r))

    def hinv(self, params, w, v):
        r = params[0]
        return norm_cdf(r * norm_ppf(v) + math.sqrt(1.0 - r * r) * norm_ppf(w))

    def tau(self, params):
        return 2.0 / math.pi * math.asin(params[0])

    def tau_start(self, tau):
        return (math.sin(0.5 * math.pi * tau),)


class Frank(Family):
    """Frank copula; negative parameters via ``C_-t(u, v) = u - C_t(u, 1 - v)``."""

    name = "frank"
    param_names = ("theta",)
    domain = ((-math.inf, math.inf, True, True),)
    fit_bounds = ((-100.0, 100.0),)
    SMALL = 1e-6

    @staticmethod
    def _parts(t, u, v):
        # with x = e^{-tu}, y = e^{-tv}, e = e^{-t}:  D = x + y - xy - e > 0 for t > 0,
        # written as a sum of non-negative terms to avoid cancellation
        x = np.exp(-t * u)
        y = np.exp(-t * v)
        d = x * (-np.expm1(-t * v)) + y * (-np.expm1(-t * (1.0 - v)))
        return x, y, d, -math.expm1(-t)

    def cdf(self, params, u, v):
        t = params[0]
        if abs(t) < self.SMALL:
            return u * v * (1.0 + 0.5 * t * (1.0 - u) * (1.0 - v))
        if t < 0:
            return u - self.cdf((-t,), u, 1.0 - v)
        _, _, d, a = self._parts(t, u, v)
        return -(np.log(d) - math.log(a)) / t

    def logpdf(self, params, u, v):
        t = params[0]
        if abs(t) < self.SMALL:
            return np.log1p(t * (1.0 - 2.0 * u) * (1.0 - 2.0 * v))
        if t < 0:
            return self.logpdf((-t,), u, 1.0 - v)
        _, _, d, a = self._parts(t, u, v)
        return math.log(t * a) - t * (u + v) - 2.0 * np.log(d)

    def h(self, params, u, v):
        t = params[0]
        if abs(t) < self.SMALL:
            return u + 0.5 * t * u * (1.0 - u) * (1.0 - 2.0 * v)
        if t < 0:
            return self.h((-t,), u, 1.0 - v)
        x, y, d, _ = self._parts(t, u, v)
        return y * (-np.expm1(-t * u)) / d

    def hinv(self, params, w, v):
        t = params[0]
        if abs(t) < self.SMALL:
            return None
        if t < 0:
            return self.hinv((-t,), w, 1.0 - v)
        # solve y (1 - x) = w D for x = e^{-tu}; D = x (1 - y) + y - e
        y = np.exp(-t * v)
        e = math.exp(-t)
        x = (y - w * (y - e)) / (y + w * (1.0 - y))
        return np.clip(-np.log(x) / t, 0.0, 1.0)

    def tau(self, params):
        t = params[0]
        if abs(t) < 1e-4:
            return t / 9.0
        if t < 0:
            return -self.tau((-t,))
        return 1.0 - 4.0 / t * (1.0 - debye1(t))

    def tau_start(self, tau):
        tau = min(max(tau, -0.95), 0.95)
        if abs(tau) < 1e-6:
            return (9.0 * tau,)
        lo, hi = (1e-8, 100.0) if tau > 0 else (-100.0, -1e-8)
        f = lambda t: self.tau((t,)) - tau  # noqa: E731
        if f(lo) * f(hi) > 0:
            return (hi if tau > 0 else lo,)
        return (optimize.brentq(f, lo, hi, xtol=1e-10),)


class Archimedean(Family):
    """Families defined by a generator; see :mod:`._generators`."""

    def __init__(self, name, param_names, domain, fit_bounds):
        self.name = name
        self.param_names = param_names
        self.domain = domain
        self.fit_bounds = fit_bounds

    def gen(self, params):
        return generator(self.name, *params)

    @staticmethod
    def _c_from(g, phi_u, phi_v, u, v):
        c = g.psi(phi_u + phi_v)
        # exact C lies within the Frechet bounds; clip rounding excursions
        return np.clip(c, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))

    def cdf(self, params, u, v):
        g = self.gen(params)
        return self._c_from(g, g.phi(u), g.phi(v), u, v)

    def logpdf(self, params, u, v):
        g = self.gen(params)
        phi_u, lu = g.first(u)
        phi_v, lv = g.first(v)
        lc, l2c = g.second(self._c_from(g, phi_u, phi_v, u, v))
        return l2c + lu + lv - 3.0 * lc

    def h(self, params, u, v):
        g = self.gen(params)
        phi_v, lv = g.first(v)
        c = self._c_from(g, g.phi(u), phi_v, u, v)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(lv - g.log_mdphi(c))
        return np.clip(np.where(c > 0, out, 0.0), 0.0, 1.0)

    def tau(self, params):
        return tau_archimedean(self.gen(params))

    def tau_start(self, tau):
        return _grid_start(self, tau)


class Clayton(Archimedean):
    def __init__(self):
        super().__init__("clayton", ("theta",), ((0.0, math.inf, True, True),), ((1e-4, 50.0),))

    def hinv(self, params, w, v):
        t = params[0]
        # (1 + v^-t (w^{-t/(1+t)} - 1))^{-1/t}
        return np.exp(-np.log1p(np.power(v, -t) * np.expm1(-t / (1.0 + t) * np.log(w))) / t)

    def tau(self, params):
        return params[0] / (params[0] + 2.0)

    def tau_start(self, tau):
        tau = min(max(tau, 1e-4), 0.95)
        return (2.0 * tau / (1.0 - tau),)


class Gumbel(Archimedean):
    def __init__(self):
        super().__init__("gumbel", ("theta",), ((1.0, math.inf, False, True),), ((1.0, 50.0),))

    def tau(self, params):
        return 1.0 - 1.0 / params[0]

    def tau_start(self, tau):
        tau = min(max(tau, 1e-4), 0.95)
        return (1.0 / (1.0 - tau),)


class Joe(Archimedean):
    def __init__(self):
        super().__init__("joe", ("theta",), ((1.0, math.inf, False, True),), ((1.0, 50.0),))

    def tau_start(self, tau):
        tau = min(max(tau, 1e-4), 0.9)
        f = lambda t: joe_tau_closed(t) - tau  # noqa: E731
        if f(50.0) < 0:
            return (50.0,)
        return (optimize.brentq(f, 1.0 + 1e-9, 50.0, xtol=1e-10),)


class BB1(Archimedean):
    def __init__(self):
        super().__init__("bb1", ("theta", "delta"),
                         ((0.0, math.inf, True, True), (1.0, math.inf, False, True)),
                         ((1e-4, 30.0), (1.0, 30.0)))

    def tau(self, params):
        t, d = params
        return 1.0 - 2.0 / (d * (t + 2.0))


def joe_tau_closed(theta):
    """Closed-form Joe tau, ``1 + 2 (psi(2) - psi(2/theta + 1)) / (2 - theta)``."""
    if abs(theta - 2.0) < 1e-8:
        theta = 2.0 + 1e-8  # removable singularity
    return float(1.0 + 2.0 / (2.0 - theta) * (digamma(2.0) - digamma(2.0 / theta + 1.0)))


def _grid_start(fam, tau):
    """Pick the grid point whose tau is closest to the target."""
    lo_t, hi_t = fam.fit_bounds[0]
    if fam.n_params == 1:
        cands = [(x,) for x in np.linspace(lo_t + 1e-3, min(hi_t, 20.0), 60)]
    else:
        lo_d, hi_d = fam.fit_bounds[1]
        ts = np.linspace(max(lo_t, 1e-3) + 1e-3, min(hi_t, 8.0), 12)
        ds = np.linspace(lo_d + 1e-3, min(hi_d, 8.0), 12) if hi_d > 1.0 else np.linspace(0.05, 0.999, 12)
        cands = [(float(a), float(b)) for a in ts for b in ds]
    taus = np.array([fam.tau(c) for c in cands])
    return cands[int(np.argmin(np.abs(taus - tau)))]


def tau_numeric(fam, params, n=64, panels=4):
    """``1 - 4 * int int dC/du dC/dv du dv`` by composite Gauss-Legendre quadrature.

    The unit square is split into ``panels x panels`` cells, each with an
    ``n``-point rule per axis.
    """
    nodes, weights = gauss_legendre(n, 0.0, 1.0 / panels)
    x = np.concatenate([nodes + k / panels for k in range(panels)])
    w = np.tile(weights, panels)
    u, v = np.meshgrid(x, x, indexing="ij")
    du = fam.h(params, v, u)  # dC/du(u, v)
    dv = fam.h(params, u, v)  # dC/dv(u, v)
    return float(1.0 - 4.0 * (w @ (du * dv) @ w))


def _graded_rule(n=32, depth=14):
    # panels halving toward both ends, where phi / phi' varies fastest
    k = np.arange(1, depth + 1)
    br = np.unique(np.concatenate([[0.0, 0.5, 1.0], 0.5 * 2.0 ** -k, 1.0 - 0.5 * 2.0 ** -k]))
    x0, w0 = np.polynomial.legendre.leggauss(n)
    a, b = br[:-1, None], br[1:, None]
    return (a + 0.5 * (b - a) * (x0 + 1.0)).ravel(), (0.5 * (b - a) * w0).ravel()


_GRADED = _graded_rule()


def tau_archimedean(gen):
    """``1 + 4 * int_0^1 phi(t) / phi'(t) dt`` on a graded composite Gauss-Legendre rule."""
    x, w = _GRADED
    return float(1.0 - 4.0 * (w @ gen.phi_over_mdphi(x)))


def _arch(name, param_names, domain, fit_bounds):
    return Archimedean(name, param_names, domain, fit_bounds)


FAMILIES = {
    f.name: f
    for f in (
        Independence(),
        Gaussian(),
        Frank(),
        Clayton(),
        Gumbel(),
        Joe(),
        BB1(),
        _arch("bb6", ("theta", "delta"),
              ((1.0, math.inf, False, True), (1.0, math.inf, False, True)), ((1.0, 30.0), (1.0, 30.0))),
        _arch("bb7", ("theta", "delta"),
              ((1.0, math.inf, False, True), (0.0, math.inf, True, True)), ((1.0, 30.0), (1e-4, 30.0))),
        _arch("bb8", ("theta", "delta"),
              ((1.0, math.inf, False, True), (0.0, 1.0, True, False)), ((1.0, 30.0), (1e-4, 1.0))),
    )
}
