"""Linear-family regressors and prediction metrics.

All fitters take a predictor matrix ``X`` (n, p) and response ``y`` (n,)
and return a :class:`RegressionModel`. The intercept is never penalized.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import kernels
from .errors import DataError, DegenerateError, DomainError, NumericalError, SingularDesignError
from .rng import spawn

KINDS = ("ols", "ridge", "lasso", "bayes_ridge", "huber", "bagging")
COND_WARN = 1e10


@dataclass
class RegressionModel:
    kind: str
    intercept: float
    coefficients: np.ndarray
    hyperparams: dict = field(default_factory=dict)
    column_names: tuple = ()
    iterations: int = 0
    converged: bool = True
    members: list = field(default_factory=list)
    scaler: object = None

    @property
    def n_features(self):
        return len(self.coefficients)


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    mse: float
    med_ae: float
    r2: float
    n: int

    def to_dict(self):
        return {"mae": self.mae, "mse": self.mse, "med_ae": self.med_ae, "r2": self.r2, "n": self.n}


def _xy(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DataError(f"X has shape {X.shape} but y has {y.size} rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in regression inputs")
    return X, y


def _design(X, fit_intercept):
    return np.column_stack([np.ones(X.shape[0]), X]) if fit_intercept else X


def _split_beta(beta, fit_intercept):
    if fit_intercept:
        return float(beta[0]), np.array(beta[1:])
    return 0.0, np.array(beta)


def _lstsq(A, b):
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or np.linalg.matrix_rank(A) < A.shape[1]:
        raise SingularDesignError("design matrix is rank deficient")
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned design (condition number {cond:.3g})", RuntimeWarning, stacklevel=3)
    beta, *_ = np.linalg.lstsq(A, b, rcond=None)
    return beta


def fit_ols(X, y, fit_intercept=True):
    """Ordinary least squares, ``beta = (A'A)^-1 A'y`` on the augmented design."""
    X, y = _xy(X, y)
    A = _design(X, fit_intercept)
    if A.shape[0] < A.shape[1]:
        raise SingularDesignError(f"need at least as many rows as coefficients ({A.shape[0]} < {A.shape[1]})")
    b0, coef = _split_beta(_lstsq(A, y), fit_intercept)
    return RegressionModel("ols", b0, coef, {"fit_intercept": fit_intercept})


def _ridge_beta(X, y, lam, fit_intercept):
    A = _design(X, fit_intercept)
    pen = np.full(A.shape[1], math.sqrt(lam))
    if fit_intercept:
        pen[0] = 0.0
    A_aug = np.vstack([A, np.diag(pen)])
    y_aug = np.concatenate([y, np.zeros(A.shape[1])])
    return _lstsq(A_aug, y_aug)


def fit_ridge(X, y, lam=0.01, fit_intercept=True):
    """Ridge regression minimizing ``||y - A b||^2 + lam * ||slopes||^2``.

    Solved as least squares on the design augmented with ``sqrt(lam) * I``
    rows, which reduces exactly to OLS at ``lam = 0``.
    """
    if lam < 0:
        raise DomainError(f"ridge penalty must be >= 0, got {lam}")
    X, y = _xy(X, y)
    b0, coef = _split_beta(_ridge_beta(X, y, lam, fit_intercept), fit_intercept)
    return RegressionModel("ridge", b0, coef, {"lambda": lam, "fit_intercept": fit_intercept})


def fit_lasso(X, y, lam=0.01, tol=1e-7, max_iter=100_000):
    """Lasso by cyclic coordinate descent with soft-thresholding.

    Predictors are standardized (population standard deviation) and ``y``
    centred; the objective on that scale is
    ``(1/2n)||y - Xb||^2 + lam * ||b||_1``. Coefficients are mapped back to
    the original scale. Non-convergence is reported via ``converged=False``.
    """
    if lam < 0:
        raise DomainError(f"lasso penalty must be >= 0, got {lam}")
    X, y = _xy(X, y)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Xs = (X - mu) / np.where(sd == 0.0, 1.0, sd)
    Xs[:, sd == 0.0] = 0.0
    yc = y - y.mean()
    if lam >= np.max(np.abs(Xs.T @ yc)) / X.shape[0]:
        # every soft-threshold is zero; skip descent so slopes are exactly 0
        return RegressionModel("lasso", float(y.mean()), np.zeros(X.shape[1]),
                               {"lambda": lam, "tol": tol, "max_iter": max_iter})
    beta, n_iter, ok = kernels.lasso_cd(Xs, yc, float(lam), float(tol), int(max_iter), np.zeros(X.shape[1]))
    coef = np.where(sd == 0.0, 0.0, beta / np.where(sd == 0.0, 1.0, sd))
    b0 = float(y.mean() - mu @ coef)
    return RegressionModel("lasso", b0, coef, {"lambda": lam, "tol": tol, "max_iter": max_iter},
                           iterations=n_iter, converged=ok)


def lasso_lambda_max(X, y):
    """Smallest penalty at which every standardized lasso slope is zero."""
    X, y = _xy(X, y)
    sd = X.std(axis=0)
    Xs = (X - X.mean(axis=0)) / np.where(sd == 0.0, 1.0, sd)
    return float(np.max(np.abs(Xs.T @ (y - y.mean()))) / X.shape[0])


def fit_bayes_ridge(X, y, prior_precision=1.0, noise_variance=1.0, evidence=False,
                    tol=1e-6, max_iter=300):
    """Bayesian ridge regression (posterior mean under a Gaussian prior).

    With slopes ``~ N(0, noise_variance / prior_precision)`` the posterior mean
    equals the ridge solution with penalty ``prior_precision``. With
    ``evidence=True`` both hyperparameters are re-estimated by MacKay's
    fixed-point updates until their relative change drops below ``tol``.
    """
    if prior_precision <= 0 or noise_variance <= 0:
        raise DomainError("prior_precision and noise_variance must be positive")
    X, y = _xy(X, y)
    if not evidence:
        b0, coef = _split_beta(_ridge_beta(X, y, prior_precision, True), True)
        return RegressionModel("bayes_ridge", b0, coef,
                               {"prior_precision": prior_precision, "noise_variance": noise_variance,
                                "evidence": False})

    n, p = X.shape
    mu_x = X.mean(axis=0)
    Xc = X - mu_x
    yc = y - y.mean()
    eig, V = np.linalg.eigh(Xc.T @ Xc)
    eig = np.clip(eig, 0.0, None)
    Vty = V.T @ (Xc.T @ yc)
    lam = prior_precision
    sigma2 = noise_variance
    tiny = np.finfo(float).tiny
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        m = V @ (Vty / (eig + lam))
        resid = yc - Xc @ m
        rss = float(resid @ resid)
        gamma = float(np.sum(eig / (eig + lam)))
        alpha = gamma / max(float(m @ m), tiny)  # prior precision of slopes
        sigma2_new = max(rss, tiny) / max(n - gamma, 1e-12)
        lam_new = alpha * sigma2_new
        change = max(abs(lam_new - lam) / lam, abs(sigma2_new - sigma2) / sigma2)
        lam, sigma2 = lam_new, sigma2_new
        if change < tol or sigma2 < 1e-300:
            converged = True
            break
    m = V @ (Vty / (eig + lam))
    b0 = float(y.mean() - mu_x @ m)
    return RegressionModel("bayes_ridge", b0, m,
                           {"prior_precision": lam, "noise_variance": sigma2, "evidence": True},
                           iterations=it, converged=converged)


def huber_loss(residual, delta):
    """Huber loss: quadratic inside ``|r| <= delta``, linear outside."""
    r = np.abs(np.asarray(residual, dtype=float))
    return np.where(r <= delta, 0.5 * r * r, delta * r - 0.5 * delta * delta)


def _robust_scale(r):
    mad = float(np.median(np.abs(r - np.median(r)))) / 0.6744897501960817
    if mad > 0:
        return mad
    mean_abs = float(np.mean(np.abs(r)))
    return mean_abs if mean_abs > 0 else 1.0


def fit_huber(X, y, delta=1.35, scale="mad", tol=1e-8, max_iter=1000):
    """Huber regression by iteratively reweighted least squares.

    The loss is applied to ``r / s``. With ``scale="mad"`` the scale ``s`` is
    the normalized MAD of the OLS residuals, held fixed during the iterations
    so the objective is monotone; pass a number to fix ``s`` (``1.0`` gives
    the raw loss). Weights are 1 for ``|r/s| <= delta`` and
    ``delta / |r/s|`` otherwise.
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    X, y = _xy(X, y)
    A = _design(X, True)
    beta = _lstsq(A, y)
    s = _robust_scale(y - A @ beta) if scale == "mad" else float(scale)
    if s <= 0:
        raise DomainError(f"scale must be positive, got {s}")
    history = [float(np.sum(huber_loss((y - A @ beta) / s, delta)))]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        r = np.abs(y - A @ beta) / s
        w = np.where(r <= delta, 1.0, delta / np.maximum(r, 1e-300))
        sw = np.sqrt(w)
        new, *_ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)
        change = float(np.max(np.abs(new - beta)))
        beta = new
        history.append(float(np.sum(huber_loss((y - A @ beta) / s, delta))))
        if change < tol:
            converged = True
            break
    b0, coef = _split_beta(beta, True)
    model = RegressionModel("huber", b0, coef, {"delta": delta, "scale": s},
                            iterations=it, converged=converged)
    model.objective_history = history
    return model


_BASE_FITTERS = {
    "ols": lambda X, y, hp: fit_ols(X, y),
    "ridge": lambda X, y, hp: fit_ridge(X, y, hp.get("lambda", 0.01)),
    "lasso": lambda X, y, hp: fit_lasso(X, y, hp.get("lambda", 0.01)),
    "bayes_ridge": lambda X, y, hp: fit_bayes_ridge(X, y, hp.get("prior_precision", 1.0),
                                                    hp.get("noise_variance", 1.0),
                                                    hp.get("evidence", False)),
    "huber": lambda X, y, hp: fit_huber(X, y, hp.get("delta", 1.35)),
}


def fit_base(kind, X, y, hyperparams=None):
    if kind not in _BASE_FITTERS:
        raise DomainError(f"unknown regressor kind {kind!r}; choose from {sorted(_BASE_FITTERS)}")
    return _BASE_FITTERS[kind](X, y, dict(hyperparams or {}))


def bagging(X, y, base="ols", base_params=None, b=10, seed=0):
    """Bootstrap aggregating: fit ``base`` on ``b`` resamples and average predictions.

    Member ``i`` draws its resample from the ``i``-th generator spawned from
    ``seed``. Because every member is linear, the averaged intercept and
    coefficients reproduce the averaged prediction exactly.
    """
    if b < 1:
        raise DomainError(f"number of bootstrap members must be >= 1, got {b}")
    X, y = _xy(X, y)
    n = X.shape[0]
    members = []
    for i, rng in enumerate(spawn(seed, b)):
        idx = rng.integers(0, n, size=n)
        try:
            members.append(fit_base(base, X[idx], y[idx], base_params))
        except (NumericalError, DataError) as exc:
            raise NumericalError(f"bagging member {i} failed: {exc}") from exc
    intercept = float(np.mean([m.intercept for m in members]))
    coef = np.mean([m.coefficients for m in members], axis=0)
    return RegressionModel("bagging", intercept, coef,
                           {"base": base, "base_params": dict(base_params or {}), "b": b, "seed": seed},
                           converged=all(m.converged for m in members), members=members)


def predict(model, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if model.n_features == 1 else X.reshape(1, -1)
    if X.shape[1] != model.n_features:
        raise DataError(f"model expects {model.n_features} predictors, got {X.shape[1]}")
    if model.kind == "bagging" and model.members:
        return np.mean([predict(m, X) for m in model.members], axis=0)
    return model.intercept + X @ model.coefficients


def residuals(model, X, y):
    """Residuals ``y - y_hat`` and the fitted values, for residual plots."""
    y = np.asarray(y, dtype=float).ravel()
    fitted = predict(model, X)
    if fitted.size != y.size:
        raise DataError(f"{fitted.size} predictions for {y.size} responses")
    return y - fitted, fitted


def metrics(y_true, y_pred, r2_denominator="true-mean"):
    """MAE, MSE, median absolute error and R2.

    ``r2_denominator="pred-mean"`` centres the R2 denominator on the mean of
    the predictions instead of the mean of the true values.
    """
    y = np.asarray(y_true, dtype=float).ravel()
    yh = np.asarray(y_pred, dtype=float).ravel()
    if y.size != yh.size:
        raise DataError(f"length mismatch: {y.size} vs {yh.size}")
    if y.size < 2:
        raise DataError("metrics need at least two observations")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(yh))):
        raise DataError("non-finite values in metrics inputs")
    err = y - yh
    abs_err = np.abs(err)
    if r2_denominator == "true-mean":
        centre = y.mean()
    elif r2_denominator == "pred-mean":
        centre = yh.mean()
    else:
        raise DomainError(f"r2_denominator must be 'true-mean' or 'pred-mean', got {r2_denominator!r}")
    ss_tot = float(np.sum((y - centre) ** 2))
    if ss_tot == 0.0:
        raise DegenerateError("R2 undefined for a constant response")
    return RegressionMetrics(
        mae=float(np.mean(abs_err)),
        mse=float(np.mean(err * err)),
        med_ae=float(np.median(abs_err)),
        r2=1.0 - float(np.sum(err * err)) / ss_tot,
        n=int(y.size),
    )


def fit(kind, X, y, hyperparams=None, seed=None):
    """Dispatch on ``kind``; bagging needs ``seed`` and takes ``base``/``b`` hyperparameters."""
    hp = dict(hyperparams or {})
    if kind == "bagging":
        if seed is None:
            raise DomainError("bagging requires a seed")
        return bagging(X, y, hp.pop("base", "ols"), hp.pop("base_params", None), hp.pop("b", 10), seed)
    return fit_base(kind, X, y, hp)
