"""Maximum-likelihood copula fitting and information-criterion family selection."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize

from .. import numdiff
from ..errors import DataError, DomainError, InsufficientDataError, NumericalError, WindcopError
from ..stats_core import information_criteria, kendall_tau
from .core import CopulaSpec, copula_tau, family_specs, parse_family
from .families import FAMILIES

MIN_N = 30
CRITERIA = ("aic", "bic")
_OFFSETS = {
    1: [(0.0,), (0.5,), (-0.5,), (1.0,), (-1.0,)],
    2: [(0.0, 0.0), (0.5, 0.5), (-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5)],
}


@dataclass
class CopulaFit:
    spec: CopulaSpec
    loglik: float
    aic: float
    bic: float
    tau: float
    n: int
    se: tuple = ()
    boundary: bool = False
    converged: bool = True
    n_evals: int = 0
    trace: list = field(default_factory=list, repr=False)

    @property
    def k(self):
        return self.spec.k

    def criterion(self, name):
        if name not in CRITERIA:
            raise DomainError(f"criterion must be one of {CRITERIA}, got {name!r}")
        return self.aic if name == "aic" else self.bic

    def to_dict(self):
        return {"spec": self.spec.to_dict(), "label": self.spec.label, "loglik": self.loglik,
                "aic": self.aic, "bic": self.bic, "tau": self.tau, "n": self.n, "k": self.k,
                "se": list(self.se), "boundary": self.boundary, "converged": self.converged}

    @classmethod
    def from_dict(cls, d):
        return cls(CopulaSpec.from_dict(d["spec"]), d["loglik"], d["aic"], d["bic"], d["tau"], d["n"],
                   tuple(d.get("se", ())), d.get("boundary", False), d.get("converged", True))


def check_pobs(U):
    """Validate pseudo-observations: an (n, 2) array strictly inside the unit square."""
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[1] != 2:
        raise DataError(f"pseudo-observations must have shape (n, 2), got {U.shape}")
    if U.shape[0] < MIN_N:
        raise InsufficientDataError(f"copula fitting needs at least {MIN_N} pairs, got {U.shape[0]}")
    if not np.all(np.isfinite(U)) or np.any((U <= 0) | (U >= 1)):
        raise DataError("pseudo-observations must lie strictly inside (0, 1)")
    return U


class _Transform:
    """Maps an unconstrained vector onto the family's search box.

    Lower-bounded parameters use ``lo + exp(z)`` (values above the box cap are
    rejected by the objective); intervals use a scaled logistic; Frank's
    parameter is used as is.
    """

    def __init__(self, fam):
        self.kinds = []
        self.bounds = fam.fit_bounds
        for name, (lo, hi) in zip(fam.param_names, fam.fit_bounds):
            self.kinds.append("logit" if math.isfinite(hi) else "log")

    def to_params(self, z):
        out = []
        for zi, kind, (lo, hi) in zip(z, self.kinds, self.bounds):
            if kind == "identity":
                out.append(float(zi))
            elif kind == "log":
                out.append(lo + math.exp(min(zi, 700.0)))
            else:
                out.append(lo + (hi - lo) / (1.0 + math.exp(-max(min(zi, 700.0), -700.0))))
        return tuple(out)

    def to_z(self, params):
        out = []
        for p, kind, (lo, hi) in zip(params, self.kinds, self.bounds):
            span = hi - lo
            p = min(max(p, lo + 1e-4 * span), hi - 1e-4 * span)
            if kind == "identity":
                out.append(p)
            elif kind == "log":
                out.append(math.log(p - lo))
            else:
                f = (p - lo) / span
                out.append(math.log(f / (1.0 - f)))
        return np.array(out)

    def in_box(self, params):
        return all(lo <= p <= hi for p, (lo, hi) in zip(params, self.bounds))


def _loglik(fam, params, u, v):
    with np.errstate(all="ignore"):
        ll = float(np.sum(fam.logpdf(params, u, v)))
    return ll if math.isfinite(ll) else -math.inf


def copula_loglik(spec, U):
    """Log-likelihood of ``spec`` at pseudo-observations ``U``."""
    U = check_pobs(U)
    u, v = (1.0 - U[:, 0], 1.0 - U[:, 1]) if spec.survival else (U[:, 0], U[:, 1])
    return _loglik(spec.impl, spec.params, u, v)


def copula_fit(family, U, rotation=None, n_starts=5, fatol=1e-9, screen_tol=1e-2, max_iter=2000):
    """Maximum-likelihood fit of one family to pseudo-observations ``U``.

    Nelder-Mead runs on transformed parameters from ``n_starts`` deterministic
    perturbations of a tau-inversion start, each stopped once the simplex
    log-likelihood spread is below ``screen_tol``; the best is then restarted
    and run until the spread is below ``fatol``.
    Solutions within 1e-3 (relative to the box width) of a search-box edge
    are flagged with ``boundary=True``.
    """
    fam_name, rot = parse_family(family)
    if rotation is not None:
        rot = rotation
    U = check_pobs(U)
    n = U.shape[0]
    fam = FAMILIES[fam_name]
    if fam.n_params == 0:
        spec = CopulaSpec(fam_name)
        aic, bic = information_criteria(0.0, 0, n)
        return CopulaFit(spec, 0.0, aic, bic, 0.0, n)
    survival = rot == "survival_180"
    u, v = (1.0 - U[:, 0], 1.0 - U[:, 1]) if survival else (U[:, 0], U[:, 1])
    tr = _Transform(fam)

    def objective(z):
        params = tr.to_params(z)
        if not tr.in_box(params):
            return math.inf
        try:
            fam.validate(params)
        except DomainError:
            return math.inf
        return -_loglik(fam, params, u, v)

    def run(start, tol):
        simplex = np.vstack([start] + [start + 0.4 * e for e in np.eye(fam.n_params)])
        return optimize.minimize(objective, start, method="Nelder-Mead",
                                 options={"initial_simplex": simplex, "fatol": tol, "xatol": math.inf,
                                          "maxiter": max_iter})

    # screen every start at a coarse tolerance, then polish the best one
    tau_emp = kendall_tau(U[:, 0], U[:, 1])
    z0 = tr.to_z(fam.tau_start(tau_emp))
    best = None
    trace = []
    n_evals = 0
    for off in _OFFSETS[fam.n_params][:max(1, n_starts)]:
        res = run(z0 + np.array(off), screen_tol)
        n_evals += res.nfev
        trace.append((tr.to_params(res.x), float(-res.fun), bool(res.success)))
        if math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is not None:
        res = run(best.x, fatol)
        n_evals += res.nfev
        trace.append((tr.to_params(res.x), float(-res.fun), bool(res.success)))
        if res.fun <= best.fun:
            best = res
    if best is None:
        raise NumericalError(f"{fam_name} fit failed from every start; trace {trace}")
    params = tr.to_params(best.x)
    ll = float(-best.fun)
    boundary = any(min(p - lo, hi - p) <= 1e-3 * (hi - lo) for p, (lo, hi) in zip(params, fam.fit_bounds))
    spec = CopulaSpec(fam_name, *params, rotation=rot)
    se = () if boundary else numdiff.std_errors(lambda p: _loglik_checked(fam, p, u, v), np.array(params))
    aic, bic = information_criteria(ll, fam.n_params, n)
    return CopulaFit(spec, ll, aic, bic, copula_tau(spec), n, tuple(se), boundary, bool(best.success),
                     n_evals, trace)


def _loglik_checked(fam, params, u, v):
    try:
        fam.validate(tuple(params))
    except DomainError:
        return -math.inf
    return _loglik(fam, tuple(params), u, v)


@dataclass
class Selection:
    best: CopulaFit
    ranked: list
    criterion: str
    failures: dict

    def table(self):
        return [dict(rank=i + 1, **f.to_dict()) for i, f in enumerate(self.ranked)]


def copula_select(U, families=None, criterion="bic", workers=1, n_starts=5):
    """Fit each family and rank by ``criterion`` ascending, ties by label.

    ``families`` defaults to independence, Gaussian, Frank and the seven
    asymmetric families in both orientations. Fits that fail are recorded in
    ``failures`` instead of aborting the selection.
    """
    if criterion not in CRITERIA:
        raise DomainError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    U = check_pobs(U)
    specs = family_specs(families)

    def one(fr):
        fam, rot = fr
        label = f"survival_{fam}" if rot == "survival_180" else fam
        try:
            return label, copula_fit(fam, U, rot, n_starts=n_starts), None
        except WindcopError as exc:
            return label, None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, specs))
    else:
        results = [one(s) for s in specs]
    fits = [f for _, f, _ in results if f is not None]
    failures = {label: msg for label, _, msg in results if msg is not None}
    if not fits:
        raise NumericalError(f"every copula fit failed: {failures}")
    ranked = sorted(fits, key=lambda f: (f.criterion(criterion), f.spec.label))
    return Selection(ranked[0], ranked, criterion, failures)
