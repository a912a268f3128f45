"""Special functions shared by the marginal, copula and preprocessing modules.

Elementary special functions (log-gamma, digamma, trigamma, regularized
incomplete gamma, the normal CDF and its inverse) come from
:mod:`scipy.special`. The bivariate normal CDF and the chi-square quantile
are implemented here.
"""

from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import DomainError

gammaln = special.gammaln
digamma = special.digamma
gammainc = special.gammainc
gammaincinv = special.gammaincinv


def trigamma(x):
    return special.polygamma(1, x)


def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(p):
    return special.ndtri(p)


@lru_cache(maxsize=8)
def gauss_legendre(n, a=0.0, b=1.0):
    """Gauss-Legendre nodes and weights mapped to ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


# Gauss-Legendre half-rules used by Genz's BVNU (6, 12 and 20 points).
_GL_W = (
    np.array([0.1713244923791705, 0.3607615730481384, 0.4679139345726904]),
    np.array([0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
              0.2031674267230659, 0.2334925365383547, 0.2491470458134029]),
    np.array([0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
              0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
              0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
              0.1527533871307259]),
)
_GL_X = (
    np.array([0.9324695142031522, 0.6612093864662647, 0.2386191860831970]),
    np.array([0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
              0.5873179542866171, 0.3678314989981802, 0.1252334085114692]),
    np.array([0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
              0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
              0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
              0.07652652113349733]),
)


def _bvnu(h, k, r):
    """Upper bivariate normal probability P(X > h, Y > k) for correlation ``r``.

    Vectorized port of A. Genz's BVNU (Drezner-Wesolowsky with a separate
    high-correlation expansion); absolute accuracy about 1e-15. ``h`` and
    ``k`` are finite arrays of equal shape, ``r`` a scalar in (-1, 1).
    """
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    if r == 0.0:
        return norm_cdf(-h) * norm_cdf(-k)
    ar = abs(r)
    idx = 0 if ar < 0.3 else (1 if ar < 0.75 else 2)
    w = np.concatenate([_GL_W[idx], _GL_W[idx]])
    x = np.concatenate([1.0 - _GL_X[idx], 1.0 + _GL_X[idx]])
    tp = 2.0 * np.pi
    hk = h * k
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = 0.5 * np.arcsin(r)
        sn = np.sin(asr * x)
        terms = np.exp((hk[..., None] * sn - hs[..., None]) / (1.0 - sn * sn))
        bvn = terms @ w
        return bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k)

    if r < 0:
        k = -k
        hk = -hk
    a_s = 1.0 - r * r
    a = np.sqrt(a_s)
    bs = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 80.0
    asr = -0.5 * (bs / a_s + hk)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        bvn = np.where(
            asr > -100.0,
            a * np.exp(asr) * (1.0 - c * (bs - a_s) * (1.0 - d * bs) / 3.0 + c * d * a_s * a_s),
            0.0,
        )
        b = np.sqrt(bs)
        sp = np.sqrt(tp) * norm_cdf(-b / a)
        bvn = np.where(
            hk > -100.0,
            bvn - np.exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0),
            bvn,
        )
        half_a = 0.5 * a
        xs = (half_a * x) ** 2
        asr2 = -0.5 * (bs[..., None] / xs + hk[..., None])
        spx = 1.0 + c[..., None] * xs * (1.0 + 5.0 * d[..., None] * xs)
        rs = np.sqrt(1.0 - xs)
        ep = np.exp(-(hk[..., None] / 2.0) * xs / (1.0 + rs) ** 2) / rs
        terms = np.where(asr2 > -100.0, np.exp(asr2) * (spx - ep), 0.0)
        bvn = (half_a * (terms @ w) - bvn) / tp
    if r > 0:
        bvn = bvn + norm_cdf(-np.maximum(h, k))
    else:
        lo = np.where(h < 0, norm_cdf(k) - norm_cdf(h), norm_cdf(-h) - norm_cdf(-k))
        bvn = np.where(h >= k, -bvn, lo - bvn)
    return np.clip(bvn, 0.0, 1.0)


def bvn_cdf(x, y, rho):
    """Standard bivariate normal CDF P(X <= x, Y <= y) with correlation ``rho``.

    Infinite arguments are handled exactly. Absolute accuracy is better than
    1e-12 for ``|rho| < 1``.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho}")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    out = np.empty(x.shape, dtype=float)
    fx = np.isfinite(x)
    fy = np.isfinite(y)
    both = fx & fy
    if both.any():
        out[both] = _bvnu(-x[both], -y[both], float(rho))
    # x = +inf -> Phi(y); x = -inf -> 0 (same for y)
    only_y = ~fx & fy
    out[only_y] = np.where(x[only_y] > 0, norm_cdf(y[only_y]), 0.0)
    only_x = fx & ~fy
    out[only_x] = np.where(y[only_x] > 0, norm_cdf(x[only_x]), 0.0)
    neither = ~fx & ~fy
    out[neither] = np.where((x[neither] > 0) & (y[neither] > 0), 1.0, 0.0)
    return out if out.ndim else float(out)


def chi2_cdf(x, df):
    x = np.asarray(x, dtype=float)
    return gammainc(0.5 * df, 0.5 * np.maximum(x, 0.0))


def chi2_ppf(p, df, tol=1e-10):
    """Chi-square quantile by bisection on the regularized lower incomplete gamma.

    Iterates until the bracket is narrower than ``tol`` (absolute, or relative
    for quantiles above 1).
    """
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise DomainError("probabilities must lie strictly inside (0, 1)")
    if df <= 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    lo = np.zeros_like(p)
    hi = np.full_like(p, max(1.0, 2.0 * df))
    # grow the upper bracket until it covers every p
    while True:
        short = chi2_cdf(hi, df) < p
        if not short.any():
            break
        hi = np.where(short, hi * 2.0, hi)
    while True:
        mid = 0.5 * (lo + hi)
        below = chi2_cdf(mid, df) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= tol * np.maximum(1.0, hi)):
            break
    out = 0.5 * (lo + hi)
    return out if out.ndim else float(out)


def debye1(x):
    """First-order Debye function D1(x) = (1/x) * int_0^x t / (e^t - 1) dt."""
    if x == 0.0:
        return 1.0
    if abs(x) < 1e-6:
        return 1.0 - x / 4.0 + x * x / 36.0
    val, _ = integrate.quad(
        lambda t: t / np.expm1(t) if t != 0.0 else 1.0, 0.0, x, epsabs=1e-14, epsrel=1e-13, limit=200
    )
    return val / x
