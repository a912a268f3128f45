"""Finite-difference Hessians and the standard errors derived from them."""

import math

import numpy as np

from .errors import NumericalError


def hessian(f, x, rel_step=1e-4):
    """Central-difference Hessian of scalar ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    k = x.size
    h = rel_step * np.maximum(np.abs(x), 1e-2)
    H = np.empty((k, k))
    f0 = f(x)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (h[i] * h[i])
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H


def std_errors(loglik, x, rel_step=1e-4):
    """Square roots of the diagonal of the inverse observed information.

    Returns NaN entries when the information matrix is not positive
    definite (for example at a boundary optimum).
    """
    info = -hessian(loglik, x, rel_step)
    if not np.all(np.isfinite(info)):
        return tuple(math.nan for _ in range(len(x)))
    try:
        np.linalg.cholesky(info)
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        return tuple(math.nan for _ in range(len(x)))
    return tuple(float(math.sqrt(v)) for v in np.diag(cov))


def check_finite(value, what):
    if not math.isfinite(value):
        raise NumericalError(f"{what} is not finite ({value})")
    return value
