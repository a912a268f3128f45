"""Feature screening and conditioning for the regression pipeline.

Correlation matrices, high-correlation pruning, VIF-based collinearity
elimination, min-max scaling, seeded train/test splitting and the data for a
multivariate-normality chi-square Q-Q plot.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DataError, DegenerateError, DomainError, InsufficientDataError
from .rng import make_rng
from .special import chi2_ppf
from .stats_core import kendall_tau, ranks


@dataclass(frozen=True)
class Dataset:
    """Named numeric columns with an optional designated response column."""

    columns: tuple
    values: np.ndarray = field(repr=False)
    response: str | None = None

    def __post_init__(self):
        cols = tuple(str(c) for c in self.columns)
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1) if len(cols) == 1 else vals.reshape(1, -1)
        if vals.ndim != 2:
            raise DataError(f"dataset values must be 2-D, got shape {vals.shape}")
        if len(set(cols)) != len(cols):
            raise DataError("column names must be unique")
        if vals.shape[1] != len(cols):
            raise DataError(f"{len(cols)} column names for {vals.shape[1]} columns")
        if vals.shape[0] < 1 or vals.shape[1] < 1:
            raise InsufficientDataError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(vals)):
            r, c = np.argwhere(~np.isfinite(vals))[0]
            raise DataError(f"non-finite value in column {cols[c]!r}, row {r}")
        if self.response is not None and self.response not in cols:
            raise DataError(f"response column {self.response!r} not in dataset")
        vals.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "values", vals)

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def predictors(self):
        return tuple(c for c in self.columns if c != self.response)

    def index(self, name):
        try:
            return self.columns.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    def column(self, name):
        return self.values[:, self.index(name)]

    def X(self):
        return self.select(self.predictors).values

    def y(self):
        if self.response is None:
            raise DataError("dataset has no response column")
        return self.column(self.response)

    def select(self, names):
        names = tuple(names)
        idx = [self.index(n) for n in names]
        resp = self.response if self.response in names else None
        return Dataset(names, self.values[:, idx], resp)

    def drop(self, names):
        names = set(names)
        return self.select([c for c in self.columns if c not in names])

    def take(self, rows):
        return Dataset(self.columns, self.values[np.asarray(rows)], self.response)

    def with_response(self, name):
        return Dataset(self.columns, self.values, name)


@dataclass(frozen=True)
class ScalerParams:
    columns: tuple
    mins: tuple
    maxs: tuple
    degenerate: tuple = ()

    def to_dict(self):
        return {"columns": list(self.columns), "mins": list(self.mins), "maxs": list(self.maxs),
                "degenerate": list(self.degenerate)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["columns"]), tuple(d["mins"]), tuple(d["maxs"]), tuple(d.get("degenerate", ())))


@dataclass(frozen=True)
class VifReport:
    values: tuple  # ((column, vif), ...)
    removal_log: tuple = ()  # ((column, vif that triggered removal), ...)
    stopped_early: bool = False

    def as_dict(self):
        return dict(self.values)

    def max(self):
        return max((v for _, v in self.values), default=math.nan)


@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    test: np.ndarray
    seed: int
    test_fraction: float


@dataclass(frozen=True)
class QQData:
    theoretical: np.ndarray
    observed: np.ndarray
    df: int = field(default=1)

    def slope(self):
        """Least-squares slope through the origin of observed on theoretical."""
        t = self.theoretical
        return float(t @ self.observed / (t @ t))


_METHODS = ("spearman", "pearson", "kendall")


def _check_nonconstant(ds):
    spread = np.ptp(ds.values, axis=0)
    for name, s in zip(ds.columns, spread):
        if s == 0.0:
            raise DegenerateError(f"column {name!r} is constant")


def correlation_matrix(ds, method="spearman"):
    """Symmetric p x p correlation matrix with an exact unit diagonal."""
    if method not in _METHODS:
        raise DomainError(f"method must be one of {_METHODS}, got {method!r}")
    if ds.n_rows < 3:
        raise InsufficientDataError(f"correlation needs at least 3 rows, got {ds.n_rows}")
    _check_nonconstant(ds)
    v = ds.values
    p = v.shape[1]
    if method == "kendall":
        out = np.eye(p)
        for i in range(p):
            for j in range(i + 1, p):
                out[i, j] = out[j, i] = kendall_tau(v[:, i], v[:, j])
        return out
    if method == "spearman":
        v = np.column_stack([ranks(v[:, j]) for j in range(p)])
    d = v - v.mean(axis=0)
    d = d / np.sqrt(np.einsum("ij,ij->j", d, d))
    out = d.T @ d
    out = np.clip(0.5 * (out + out.T), -1.0, 1.0)
    np.fill_diagonal(out, 1.0)
    return out


def prune_high_correlation(ds, threshold=0.9, method="spearman"):
    """Drop predictors until no pair has ``|corr| > threshold``.

    For each violating pair (strongest first) the predictor more correlated
    with the response is kept; without a response, or on equal response
    correlation, the earlier column survives. The response is never removed.

    Returns ``(dataset, removal_log)`` where the log holds
    ``(removed, kept, |corr|)`` tuples.
    """
    if not 0.0 < threshold <= 1.0:
        raise DomainError(f"threshold must lie in (0, 1], got {threshold}")
    corr = correlation_matrix(ds, method)
    preds = [ds.index(c) for c in ds.predictors]
    resp = ds.index(ds.response) if ds.response is not None else None
    alive = list(preds)
    log = []
    while True:
        worst = None
        for a_pos, i in enumerate(alive):
            for j in alive[a_pos + 1:]:
                c = abs(corr[i, j])
                if c > threshold and (worst is None or c > worst[0]):
                    worst = (c, i, j)
        if worst is None:
            break
        c, i, j = worst
        if resp is not None and abs(corr[j, resp]) > abs(corr[i, resp]):
            keep, drop = j, i
        else:
            keep, drop = i, j
        alive.remove(drop)
        log.append((ds.columns[drop], ds.columns[keep], float(c)))
    removed = {entry[0] for entry in log}
    return ds.drop(removed), tuple(log)


def _predictor_values(ds):
    names = ds.predictors
    return names, ds.select(names).values


def vif(ds):
    """Variance inflation factors of the predictors.

    Computed as the diagonal of the inverse predictor correlation matrix.
    When that matrix is numerically singular, each column's VIF falls back to
    ``1 / (1 - R^2)`` from a least-squares fit on the others, so perfectly
    collinear columns get ``inf``.
    """
    names, X = _predictor_values(ds)
    if len(names) < 2:
        raise InsufficientDataError("VIF needs at least two predictors")
    if X.shape[0] < 3:
        raise InsufficientDataError("VIF needs at least three rows")
    _check_nonconstant(ds.select(names))
    d = X - X.mean(axis=0)
    d = d / np.sqrt(np.einsum("ij,ij->j", d, d))
    R = d.T @ d
    np.fill_diagonal(R, 1.0)
    if np.linalg.cond(R) < 1e12:
        vals = np.diag(np.linalg.inv(R))
    else:
        vals = np.empty(len(names))
        for j in range(len(names)):
            others = np.delete(d, j, axis=1)
            coef, *_ = np.linalg.lstsq(others, d[:, j], rcond=None)
            resid = d[:, j] - others @ coef
            one_minus_r2 = float(resid @ resid)  # columns have unit norm
            vals[j] = math.inf if one_minus_r2 < 1e-12 else 1.0 / one_minus_r2
    return VifReport(tuple((n, float(v)) for n, v in zip(names, vals)))


def eliminate_collinear(ds, vif_threshold=5.0):
    """Repeatedly drop the highest-VIF predictor until every VIF is at most the threshold.

    VIFs are recomputed after each removal. Stops (with ``stopped_early``) if
    fewer than two predictors would remain.
    """
    if vif_threshold < 1.0:
        raise DomainError(f"VIF threshold must be >= 1, got {vif_threshold}")
    log = []
    current = ds
    while True:
        report = vif(current)
        worst_name, worst = max(report.values, key=lambda nv: nv[1])  # first on ties
        if worst <= vif_threshold:
            return current, VifReport(report.values, tuple(log))
        if len(current.predictors) <= 2:
            return current, VifReport(report.values, tuple(log), stopped_early=True)
        log.append((worst_name, worst))
        current = current.drop([worst_name])


def minmax_scale(ds, columns=None):
    """Scale columns to [0, 1]; the response column is left untouched by default.

    Constant columns map to 0 and are listed in ``ScalerParams.degenerate``.
    """
    if columns is None:
        columns = ds.predictors
    columns = tuple(columns)
    idx = [ds.index(c) for c in columns]
    vals = np.array(ds.values)
    mins = vals[:, idx].min(axis=0)
    maxs = vals[:, idx].max(axis=0)
    span = maxs - mins
    degenerate = tuple(c for c, s in zip(columns, span) if s == 0.0)
    safe = np.where(span == 0.0, 1.0, span)
    vals[:, idx] = (vals[:, idx] - mins) / safe
    params = ScalerParams(columns, tuple(map(float, mins)), tuple(map(float, maxs)), degenerate)
    return Dataset(ds.columns, vals, ds.response), params


def apply_scale(ds, params):
    """Apply previously fitted scaling (values may fall outside [0, 1])."""
    idx = [ds.index(c) for c in params.columns]
    vals = np.array(ds.values)
    mins = np.asarray(params.mins)
    span = np.asarray(params.maxs) - mins
    vals[:, idx] = (vals[:, idx] - mins) / np.where(span == 0.0, 1.0, span)
    return Dataset(ds.columns, vals, ds.response)


def inverse_scale(ds, params):
    missing = [c for c in params.columns if c not in ds.columns]
    if missing or len(params.mins) != len(params.columns):
        raise DataError(f"scaler columns do not match dataset (missing {missing})")
    idx = [ds.index(c) for c in params.columns]
    vals = np.array(ds.values)
    mins = np.asarray(params.mins)
    span = np.asarray(params.maxs) - mins
    vals[:, idx] = vals[:, idx] * span + mins
    return Dataset(ds.columns, vals, ds.response)


def train_test_split(n, test_fraction=0.2, seed=0):
    """Shuffle ``range(n)`` with the seeded generator and cut off the test part.

    The test set has ``round(test_fraction * n)`` elements (half rounds up).
    """
    if not 0.0 < test_fraction < 1.0:
        raise DomainError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if n < 2:
        raise InsufficientDataError(f"cannot split {n} rows")
    n_test = int(math.floor(test_fraction * n + 0.5))
    if n_test == 0 or n_test == n:
        raise InsufficientDataError(f"split of {n} rows at {test_fraction} leaves an empty part")
    perm = make_rng(seed).permutation(n)
    return SplitIndices(np.sort(perm[n_test:]), np.sort(perm[:n_test]), seed, test_fraction)


def chisq_qq(ds, columns=None):
    """Chi-square Q-Q data for assessing multivariate normality.

    Observed values are the sorted squared Mahalanobis distances under the
    sample mean and covariance; theoretical values are chi-square quantiles
    with ``p`` degrees of freedom at ``(i - 0.5) / n``.
    """
    X = ds.values if columns is None else ds.select(columns).values
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError(f"need more rows than columns ({n} <= {p})")
    d = X - X.mean(axis=0)
    S = np.atleast_2d(np.cov(X, rowvar=False))
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        rank = np.linalg.matrix_rank(S)
        raise DegenerateError(f"sample covariance is singular (rank {rank} < {p})") from None
    if np.linalg.cond(S) > 1e14:
        raise DegenerateError("sample covariance is numerically singular")
    z = np.linalg.solve(L, d.T)
    d2 = np.sort(np.einsum("ij,ij->j", z, z))
    probs = (np.arange(1, n + 1) - 0.5) / n
    return QQData(chi2_ppf(probs, p), d2, p)
