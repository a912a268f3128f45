"""Archimedean generators built as compositions ``phi(t) = p(q(t))``.

Every Archimedean family used here factors into an inner transform ``q`` of
the unit interval and an outer transform ``p`` of the half line:

=========  ==========================  =======================
family     q(t)                        p(s)
=========  ==========================  =======================
clayton    t^-theta - 1                s
gumbel     -ln t                       s^theta
joe        -ln(1 - (1-t)^theta)        s
bb1        t^-theta - 1                s^delta
bb6        -ln(1 - (1-t)^theta)        s^delta
bb7        1 - (1-t)^theta             s^-delta - 1
bb8        1 - (1-delta t)^theta       -ln(s / eta)
=========  ==========================  =======================

with ``eta = 1 - (1 - delta)^theta``. Each piece's ``eval`` returns the
value and the log-magnitudes of the first two derivatives, sharing the
transcendental calls. The copula density

    c(u, v) = phi''(C) |phi'(u)| |phi'(v)| / |phi'(C)|^3

is then evaluated in log space. In every combination above ``p'' q'^2`` and
``p' q''`` are non-negative, so ``phi''`` is a sum of two non-negative terms.
"""

import math

import numpy as np

_NEG_INF = -math.inf


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


class ClaytonInner:
    def __init__(self, theta):
        self.t = theta
        self.c1 = math.log(theta)
        self.c2 = self.c1 + math.log1p(theta)

    def eval(self, t, second=False):
        lt = _log(t)
        q = np.expm1(-self.t * lt)
        ldq = self.c1 - (self.t + 1.0) * lt
        return q, ldq, (self.c2 - (self.t + 2.0) * lt) if second else None

    def inv(self, r):
        return np.exp(-np.log1p(r) / self.t)


class LogInner:
    def eval(self, t, second=False):
        lt = _log(t)
        return -lt, -lt, (-2.0 * lt) if second else None

    def inv(self, r):
        return np.exp(-r)


class JoeInner:
    def __init__(self, theta):
        self.t = theta
        self.c1 = math.log(theta)

    def eval(self, t, second=False):
        with np.errstate(divide="ignore", invalid="ignore"):
            l1 = np.log1p(-t)
            la = self.t * l1
            a = np.exp(la)
            # ln(1 - a) accurate for a near 0 and near 1
            log_1ma = np.log1p(-a)
            big = a >= 0.5
            if np.any(big):
                log_1ma = np.where(big, _log(-np.expm1(la)), log_1ma)
            q = -log_1ma
            ldq = self.c1 + (self.t - 1.0) * l1 - log_1ma
            ld2q = None
            if second:
                ld2q = self.c1 + (self.t - 2.0) * l1 + _log(self.t - 1.0 + a) - 2.0 * log_1ma
        return q, ldq, ld2q

    def inv(self, r):
        with np.errstate(divide="ignore", over="ignore"):
            big = r > math.log(2.0)
            log_1me = np.where(big, np.log1p(-np.exp(-np.where(big, r, 1.0))), _log(-np.expm1(-r)))
            return -np.expm1(log_1me / self.t)


class PowerInner:
    """``q(t) = 1 - (1 - d t)^theta``; ``d = 1`` for BB7, ``d = delta`` for BB8."""

    def __init__(self, theta, d=1.0):
        self.t = theta
        self.d = d
        self.c1 = math.log(theta * d)
        self.c2 = math.log(theta * (theta - 1.0)) + 2.0 * math.log(d) if theta > 1.0 else _NEG_INF

    def eval(self, t, second=False):
        with np.errstate(divide="ignore"):
            l1 = np.log1p(-self.d * t)
        q = -np.expm1(self.t * l1)
        ldq = self.c1 + (self.t - 1.0) * l1
        ld2q = None
        if second:
            ld2q = self.c2 + (self.t - 2.0) * l1 if self.t > 1.0 else np.full(np.shape(t), _NEG_INF)
        return q, ldq, ld2q

    def inv(self, r):
        with np.errstate(divide="ignore"):
            return -np.expm1(np.log1p(-r) / self.t) / self.d


class IdentityOuter:
    def eval(self, s, second=False):
        zero = np.zeros(np.shape(s))
        return s, zero, (zero + _NEG_INF) if second else None

    def inv(self, s):
        return s

    def ratio(self, s):
        return s


class PowerOuter:
    def __init__(self, delta):
        self.d = delta
        self.c1 = math.log(delta)
        self.c2 = self.c1 + math.log(delta - 1.0) if delta > 1.0 else _NEG_INF

    def eval(self, s, second=False):
        ls = _log(s)
        p = np.exp(self.d * ls)
        ldp = self.c1 + (self.d - 1.0) * ls
        ld2p = None
        if second:
            ld2p = self.c2 + (self.d - 2.0) * ls if self.d > 1.0 else np.full(np.shape(s), _NEG_INF)
        return p, ldp, ld2p

    def inv(self, s):
        return np.power(s, 1.0 / self.d)

    def ratio(self, s):
        return s / self.d


class ClaytonOuter:
    def __init__(self, delta):
        self.d = delta
        self.c1 = math.log(delta)
        self.c2 = self.c1 + math.log1p(delta)

    def eval(self, s, second=False):
        ls = _log(s)
        p = np.expm1(-self.d * ls)
        ldp = self.c1 - (self.d + 1.0) * ls
        return p, ldp, (self.c2 - (self.d + 2.0) * ls) if second else None

    def inv(self, s):
        return np.exp(-np.log1p(s) / self.d)

    def ratio(self, s):
        return -s * np.expm1(self.d * _log(s)) / self.d


class NegLogOuter:
    def __init__(self, eta):
        self.log_eta = math.log(eta)
        self.eta = eta

    def eval(self, s, second=False):
        ls = _log(s)
        return self.log_eta - ls, -ls, (-2.0 * ls) if second else None

    def inv(self, s):
        return self.eta * np.exp(-s)

    def ratio(self, s):
        return s * (self.log_eta - _log(s))


class Generator:
    """Archimedean generator ``phi = p o q`` with its inverse and derivatives."""

    def __init__(self, inner, outer):
        self.inner = inner
        self.outer = outer

    def first(self, t):
        """``(phi(t), ln |phi'(t)|)``."""
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            q, ldq, _ = self.inner.eval(t)
            p, ldp, _ = self.outer.eval(q)
            return p, ldp + ldq

    def second(self, t):
        """``(ln |phi'(t)|, ln phi''(t))``."""
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            q, ldq, ld2q = self.inner.eval(t, True)
            _, ldp, ld2p = self.outer.eval(q, True)
            return ldp + ldq, np.logaddexp(ld2p + 2.0 * ldq, ldp + ld2q)

    def phi(self, t):
        return self.first(t)[0]

    def psi(self, s):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.inner.inv(self.outer.inv(s))

    def log_mdphi(self, t):
        return self.first(t)[1]

    def phi_over_mdphi(self, t):
        """``phi(t) / |phi'(t)|``, finite even where both factors under- or overflow."""
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            q, ldq, _ = self.inner.eval(t)
            out = self.outer.ratio(q) * np.exp(-ldq)
        return np.where(np.isnan(out), 0.0, out)


def generator(family, theta, delta=None):
    if family == "clayton":
        return Generator(ClaytonInner(theta), IdentityOuter())
    if family == "gumbel":
        return Generator(LogInner(), PowerOuter(theta))
    if family == "joe":
        return Generator(JoeInner(theta), IdentityOuter())
    if family == "bb1":
        return Generator(ClaytonInner(theta), PowerOuter(delta))
    if family == "bb6":
        return Generator(JoeInner(theta), PowerOuter(delta))
    if family == "bb7":
        return Generator(PowerInner(theta), ClaytonOuter(delta))
    if family == "bb8":
        # same operations as PowerInner at t = 1 so that phi(1) == 0 exactly
        eta = float(-np.expm1(theta * np.log1p(-delta))) if delta < 1.0 else 1.0
        return Generator(PowerInner(theta, delta), NegLogOuter(eta))
    raise KeyError(family)
