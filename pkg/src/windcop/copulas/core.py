"""Copula specifications and their evaluation: CDF, density, conditional CDF, tau, sampling."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, NumericalError
from ..rng import make_rng
from .families import FAMILIES

EPS = 1e-10
ROTATIONS = ("none", "survival_180")
# numeric family codes; 10 + code marks the 180 degree rotation
CODES = {0: "independence", 1: "gaussian", 3: "clayton", 4: "gumbel", 5: "frank", 6: "joe",
         7: "bb1", 8: "bb6", 9: "bb7", 10: "bb8"}
_SURVIVAL_CODES = {13: "clayton", 14: "gumbel", 16: "joe", 17: "bb1", 18: "bb6", 19: "bb7", 20: "bb8"}
ASYMMETRIC = ("clayton", "gumbel", "joe", "bb1", "bb6", "bb7", "bb8")


def parse_family(name):
    """Resolve a family name, survival alias or numeric code to ``(family, rotation)``.

    Accepted forms: ``"clayton"``, ``"survival_clayton"``, ``"clayton180"``,
    ``"13"`` or ``13``.
    """
    key = str(name).strip().lower()
    if key.lstrip("-").isdigit():
        code = int(key)
        if code in CODES:
            return CODES[code], "none"
        if code in _SURVIVAL_CODES:
            return _SURVIVAL_CODES[code], "survival_180"
        if code == 2:
            raise DomainError("the t copula (code 2) is not supported")
        raise DomainError(f"unknown copula code {code}")
    for prefix in ("survival_", "s"):
        if key.startswith(prefix) and key[len(prefix):] in FAMILIES and key[len(prefix):] != "independence":
            return key[len(prefix):], "survival_180"
    if key.endswith("180") and key[:-3].rstrip("_") in FAMILIES:
        return key[:-3].rstrip("_"), "survival_180"
    if key in FAMILIES:
        return key, "none"
    raise DomainError(f"unknown copula family {name!r}; choose from {sorted(FAMILIES)}")


@dataclass(frozen=True)
class CopulaSpec:
    """A copula family with parameters; ``theta`` is rho for the Gaussian family."""

    family: str
    theta: float | None = None
    delta: float | None = None
    rotation: str = "none"

    def __post_init__(self):
        fam, rot = parse_family(self.family)
        if rot == "survival_180":
            if self.rotation not in ("none", "survival_180"):
                raise DomainError(f"unknown rotation {self.rotation!r}")
            object.__setattr__(self, "rotation", rot)
        elif self.rotation not in ROTATIONS:
            raise DomainError(f"rotation must be one of {ROTATIONS}, got {self.rotation!r}")
        if fam == "independence" and self.rotation != "none":
            raise DomainError("independence has no rotated form")
        object.__setattr__(self, "family", fam)
        f = FAMILIES[fam]
        if f.n_params == 0:
            object.__setattr__(self, "theta", None)
            object.__setattr__(self, "delta", None)
        elif f.n_params == 1:
            if self.delta is not None:
                raise DomainError(f"{fam} takes one parameter; delta given")
            if self.theta is None:
                raise DomainError(f"{fam} needs a parameter")
            object.__setattr__(self, "theta", float(self.theta))
        else:
            if self.theta is None or self.delta is None:
                raise DomainError(f"{fam} needs two parameters (theta, delta)")
            object.__setattr__(self, "theta", float(self.theta))
            object.__setattr__(self, "delta", float(self.delta))
        f.validate(self.params)

    @property
    def impl(self):
        return FAMILIES[self.family]

    @property
    def params(self):
        return tuple(p for p in (self.theta, self.delta) if p is not None)

    @property
    def k(self):
        return len(self.params)

    @property
    def survival(self):
        return self.rotation == "survival_180"

    @property
    def label(self):
        return f"survival_{self.family}" if self.survival else self.family

    def to_dict(self):
        return {"family": self.family, "rotation": self.rotation, "theta": self.theta, "delta": self.delta}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d.get("theta"), d.get("delta"), d.get("rotation", "none"))

    def __str__(self):
        args = ", ".join(f"{n}={p:g}" for n, p in zip(self.impl.param_names, self.params))
        return f"{self.label}({args})"


def _unit(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any((x < 0) | (x > 1)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def copula_cdf(spec, u, v):
    """``C(u, v)``, with exact values on the boundary of the unit square."""
    u, v = np.broadcast_arrays(_unit("u", u), _unit("v", v))
    out = np.empty(u.shape)
    inner = (u > 0) & (u < 1) & (v > 0) & (v < 1)
    out[~inner] = np.where((u[~inner] == 0) | (v[~inner] == 0), 0.0,
                           np.where(u[~inner] == 1, v[~inner], u[~inner]))
    if inner.any():
        a, b = u[inner], v[inner]
        if spec.survival:
            out[inner] = a + b - 1.0 + spec.impl.cdf(spec.params, 1.0 - a, 1.0 - b)
        else:
            out[inner] = spec.impl.cdf(spec.params, a, b)
    out = np.clip(out, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))
    return _out(out)


def _clamp(u, v):
    u, v = np.broadcast_arrays(_unit("u", u), _unit("v", v))
    uc = np.clip(u, EPS, 1.0 - EPS)
    vc = np.clip(v, EPS, 1.0 - EPS)
    return uc, vc, bool(np.any(uc != u) or np.any(vc != v))


def _logpdf(spec, u, v):
    if spec.survival:
        u, v = 1.0 - u, 1.0 - v
    return spec.impl.logpdf(spec.params, u, v)


def copula_logpdf(spec, u, v, return_flag=False):
    """Log density; arguments on the boundary are clamped to ``[EPS, 1 - EPS]``.

    With ``return_flag=True`` also returns whether any clamping happened.
    """
    u, v, clamped = _clamp(u, v)
    out = _out(_logpdf(spec, u, v))
    return (out, clamped) if return_flag else out


def copula_pdf(spec, u, v, return_flag=False):
    """Density ``c(u, v) = d2C / du dv``; see :func:`copula_logpdf` for clamping."""
    lp, clamped = copula_logpdf(spec, u, v, return_flag=True)
    out = _out(np.exp(lp))
    return (out, clamped) if return_flag else out


def copula_h(spec, u, v):
    """Conditional distribution ``P(U <= u | V = v) = dC/dv``."""
    u, v = np.broadcast_arrays(_unit("u", u), _unit("v", v))
    vc = np.clip(v, EPS, 1.0 - EPS)
    inner = (u > 0) & (u < 1)
    out = np.where(u >= 1, 1.0, 0.0)
    if inner.any():
        a, b = u[inner], vc[inner]
        if spec.survival:
            out[inner] = 1.0 - spec.impl.h(spec.params, 1.0 - a, 1.0 - b)
        else:
            out[inner] = spec.impl.h(spec.params, a, b)
    return _out(np.clip(out, 0.0, 1.0))


def copula_tau(spec):
    """Kendall's tau; the survival rotation leaves it unchanged."""
    tau = float(spec.impl.tau(spec.params))
    if not abs(tau) <= 1.0 + 1e-12:
        raise NumericalError(f"tau evaluation failed for {spec}: {tau}")
    return max(-1.0, min(1.0, tau))


def _bisect_h(fam, params, w, v, iters=60):
    lo = np.zeros_like(w)
    hi = np.ones_like(w)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = fam.h(params, mid, v) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def copula_hinv(spec, w, v):
    """Inverse of :func:`copula_h` in its first argument."""
    w, v = np.broadcast_arrays(_unit("w", w), _unit("v", v))
    w = np.clip(w, EPS, 1.0 - EPS)
    v = np.clip(v, EPS, 1.0 - EPS)
    fam = spec.impl
    if spec.survival:
        w, v = 1.0 - w, 1.0 - v
    u = fam.hinv(spec.params, w, v)
    if u is None:
        u = _bisect_h(fam, spec.params, w, v)
    if not np.all(np.isfinite(u)):
        raise NumericalError(f"conditional inversion failed for {spec}")
    if spec.survival:
        u = 1.0 - u
    return _out(np.clip(u, EPS, 1.0 - EPS))


def copula_sample(spec, n, seed):
    """``n`` pairs by conditional inversion: ``v ~ U(0,1)``, ``u = h^-1(w | v)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    rng = make_rng(seed)
    draws = rng.random((int(n), 2))
    v = np.clip(draws[:, 0], EPS, 1.0 - EPS)
    u = copula_hinv(spec, draws[:, 1], v)
    return np.column_stack([np.atleast_1d(u), v])


def family_specs(families=None):
    """The ``(family, rotation)`` pairs fitted by default during selection."""
    if families is not None:
        return [parse_family(f) for f in families]
    out = [("independence", "none"), ("gaussian", "none"), ("frank", "none")]
    for f in ASYMMETRIC:
        out += [(f, "none"), (f, "survival_180")]
    return out
