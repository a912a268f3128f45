"""Descriptive statistics, ranks, correlation coefficients and the bootstrap."""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import DataError, DegenerateError, DomainError, InsufficientDataError
from .rng import make_rng


def as_series(values, name="series", min_len=1):
    """Validate ``values`` as a 1-D sequence of finite reals and return a float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise InsufficientDataError(f"{name} needs at least {min_len} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DataError(f"{name} contains a non-finite value at index {bad}")
    return arr


def _paired(x, y, min_len):
    x = as_series(x, "x", min_len)
    y = as_series(y, "y", min_len)
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} vs {y.size}")
    return x, y


@dataclass(frozen=True)
class Descriptive:
    n: int
    mean: float
    std_dev: float
    median: float
    min: float
    max: float
    skewness: float
    excess_kurtosis: float
    std_error_mean: float
    degenerate: bool = False

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def moments(x):
    """Sample skewness and excess kurtosis from standardized central moments.

    Uses the biased (``1/n``) moments so that ``kurtosis >= skewness**2 + 1``
    holds for every sample. Returns ``(nan, nan)`` for zero variance.
    """
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    m2 = np.mean(d * d)
    if m2 <= 0.0 or m2 < 1e-300:
        return math.nan, math.nan
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    return float(m3 / m2 ** 1.5), float(m4 / (m2 * m2) - 3.0)


def describe(values):
    """Summary statistics of a series (the layout of a data-description table).

    A constant series is reported with ``std_dev == 0``, NaN shape statistics
    and ``degenerate=True``.
    """
    x = as_series(values, min_len=2)
    n = x.size
    sd = float(np.std(x, ddof=1))
    skew, kurt = moments(x)
    return Descriptive(
        n=n,
        mean=float(np.mean(x)),
        std_dev=sd,
        median=float(np.median(x)),
        min=float(np.min(x)),
        max=float(np.max(x)),
        skewness=skew,
        excess_kurtosis=kurt,
        std_error_mean=sd / math.sqrt(n),
        degenerate=bool(sd == 0.0),
    )


def ranks(values):
    """Ranks starting at 1, ties resolved by averaging."""
    x = as_series(values)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    # boundaries of runs of equal values in sorted order
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], x.size]
    avg = 0.5 * (starts + ends - 1) + 1.0
    run_rank = np.repeat(avg, ends - starts)
    out = np.empty(x.size, dtype=float)
    out[order] = run_rank
    return out


def pearson(x, y):
    x, y = _paired(x, y, 3)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("correlation undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(x, y):
    """Spearman rank correlation: Pearson correlation of the average ranks."""
    x, y = _paired(x, y, 3)
    try:
        return pearson(ranks(x), ranks(y))
    except DegenerateError:
        raise DegenerateError("Spearman correlation undefined: all values tied") from None


def _tie_pairs(sorted_values):
    starts = np.flatnonzero(np.r_[True, sorted_values[1:] != sorted_values[:-1]])
    sizes = np.diff(np.r_[starts, sorted_values.size]).astype(np.int64)
    return int(np.sum(sizes * (sizes - 1) // 2))


def kendall_tau(x, y):
    """Kendall tau-b with tie correction, O(n log n) via inversion counting."""
    x, y = _paired(x, y, 2)
    n = x.size
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(xs)
    # joint ties: equal x and equal y; consecutive after lexsort
    same = np.r_[True, (xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1])]
    starts = np.flatnonzero(same)
    sizes = np.diff(np.r_[starts, n]).astype(np.int64)
    n3 = int(np.sum(sizes * (sizes - 1) // 2))
    n2 = _tie_pairs(np.sort(y))
    swaps = kernels.count_inversions(ys)
    denom = (n0 - n1) * (n0 - n2)
    if denom == 0:
        raise DegenerateError("Kendall tau undefined: all values tied")
    s = n0 - n1 - n2 + n3 - 2 * swaps
    return max(-1.0, min(1.0, s / math.sqrt(denom)))


def kendall_tau_bruteforce(x, y):
    """O(n^2) tau-b by explicit pair enumeration; reference for tests."""
    x, y = _paired(x, y, 2)
    dx = np.sign(x[:, None] - x[None, :])
    dy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(x.size, 1)
    prod = (dx * dy)[iu]
    s = float(np.sum(prod))
    tx = float(np.count_nonzero(dx[iu]))
    ty = float(np.count_nonzero(dy[iu]))
    if tx == 0 or ty == 0:
        raise DegenerateError("Kendall tau undefined: all values tied")
    return s / math.sqrt(tx * ty)


def pobs(pairs):
    """Pseudo-observations: column-wise average ranks divided by ``n + 1``."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2:
        raise DataError(f"pobs expects an (n, d) array, got shape {arr.shape}")
    n = arr.shape[0]
    if n < 2:
        raise InsufficientDataError(f"pobs needs at least 2 rows, got {n}")
    out = np.empty_like(arr)
    for j in range(arr.shape[1]):
        out[:, j] = ranks(arr[:, j]) / (n + 1.0)
    return out


def corr_std_error(r, n):
    """Standard error of a correlation estimate, ``sqrt((1 - r^2) / (n - 2))``."""
    if not abs(r) <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {r}")
    if n < 3:
        raise InsufficientDataError(f"standard error needs n >= 3, got {n}")
    return math.sqrt((1.0 - r * r) / (n - 2))


def bootstrap(values, statistic, n_boot, seed):
    """Evaluate ``statistic`` on ``n_boot`` with-replacement resamples."""
    x = as_series(values)
    if n_boot < 1:
        raise DomainError(f"n_boot must be >= 1, got {n_boot}")
    rng = make_rng(seed)
    idx = rng.integers(0, x.size, size=(n_boot, x.size))
    return np.array([statistic(x[row]) for row in idx], dtype=float)


def information_criteria(loglik, k, n):
    """``(aic, bic)`` with ``aic = -2 ll + 2k`` and ``bic = -2 ll + k ln n``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return -2.0 * loglik + 2.0 * k, -2.0 * loglik + k * math.log(n)
