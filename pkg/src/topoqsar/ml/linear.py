"""Least squares, ridge and lasso regression.

Penalised fits standardise features internally (population std) and never
penalise the intercept. Coefficients are always reported on the raw
feature scale so that prediction is simply ``intercept + X @ coef``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from topoqsar.eval import kfold_split
from topoqsar.ml import _kernels
from topoqsar.ml.features import as_array, standardization_stats

__all__ = [
    "LinearModel",
    "polynomial_basis",
    "POLY_NAMES",
    "fit_ols",
    "fit_ridge",
    "fit_ridge_cv",
    "fit_lasso",
    "fit_lasso_cv",
    "lasso_path",
    "lambda_max",
    "lasso_grid",
    "soft_threshold",
    "RIDGE_GRID",
]

POLY_NAMES = ("D", "zeta", "D^2", "D*zeta", "zeta^2", "D^2*zeta", "D*zeta^2", "zeta^3")
RIDGE_GRID = tuple(10.0**k for k in range(-3, 4))


@dataclass(frozen=True)
class LinearModel:
    intercept: float
    coefficients: np.ndarray
    regularization: str = "none"
    lam: float = 0.0
    feature_names: tuple[str, ...] | None = None
    converged: bool = True
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.regularization not in ("none", "ridge", "lasso"):
            raise ValueError(f"unknown regularization {self.regularization!r}")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        coef = np.asarray(self.coefficients, dtype=np.float64)
        object.__setattr__(self, "coefficients", coef)
        if self.feature_names is not None and len(self.feature_names) != len(coef):
            raise ValueError("coefficient count does not match feature count")

    def predict(self, X) -> np.ndarray:
        X, _ = as_array(X)
        return self.intercept + X @ self.coefficients


def polynomial_basis(D, zeta) -> np.ndarray:
    """Cubic expansion [D, z, D^2, Dz, z^2, D^2 z, D z^2, z^3].

    Scalars give a length-8 vector; arrays give one row per element.
    """
    D = np.asarray(D, dtype=np.float64)
    z = np.asarray(zeta, dtype=np.float64)
    out = np.stack([D, z, D * D, D * z, z * z, D * D * z, D * z * z, z**3], axis=-1)
    return out


def _center(X, y):
    x_mean = X.mean(axis=0)
    y_mean = float(np.mean(y))
    return X - x_mean, y - y_mean, x_mean, y_mean


def fit_ols(X, y, feature_names=None) -> LinearModel:
    """Ordinary least squares with an unpenalised intercept.

    Rank-deficient designs get the minimum-norm coefficient vector.
    """
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n <= p:
        raise ValueError(
            f"OLS needs more rows than columns ({n} rows, {p} columns); use fit_ridge instead"
        )
    Xc, yc, x_mean, y_mean = _center(X, y)
    coef, *_ = np.linalg.lstsq(Xc, yc, rcond=None)
    return LinearModel(y_mean - float(x_mean @ coef), coef, "none", 0.0,
                       names or _names(feature_names))


def _names(feature_names):
    return tuple(feature_names) if feature_names is not None else None


def fit_ridge(X, y, lam: float, feature_names=None) -> LinearModel:
    """Minimise sum (y - Xb)^2 + lam * |b|^2 on standardised features."""
    if lam < 0:
        raise ValueError("ridge penalty must be non-negative")
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    mean, std = standardization_stats(X)
    Z = (X - mean) / std
    y_mean = float(y.mean())
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    cutoff = np.finfo(float).eps * max(Z.shape) * (s[0] if s.size else 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(s > cutoff, s / (s * s + lam), 0.0)
    beta_z = Vt.T @ (shrink * (U.T @ (y - y_mean)))
    coef = beta_z / std
    return LinearModel(y_mean - float(mean @ coef), coef, "ridge", float(lam),
                       names or _names(feature_names))


def _fold_ids(n: int, k: int, seed: int) -> np.ndarray:
    return kfold_split(n, k, seed).assignment


def fit_ridge_cv(X, y, lambdas=RIDGE_GRID, folds: int = 5, seed: int = 0,
                 feature_names=None) -> LinearModel:
    """Ridge with the penalty chosen by inner k-fold CV (lowest mean MSE)."""
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    assign = _fold_ids(len(y), folds, seed)
    errors = np.zeros((folds, len(lambdas)))
    for f in range(folds):
        tr, va = assign != f, assign == f
        for j, lam in enumerate(lambdas):
            model = fit_ridge(X[tr], y[tr], lam)
            errors[f, j] = np.mean((model.predict(X[va]) - y[va]) ** 2)
    mean_err = errors.mean(axis=0)
    best = int(np.argmin(mean_err))
    model = fit_ridge(X, y, lambdas[best], feature_names=names or _names(feature_names))
    model.info.update(cv_lambdas=list(map(float, lambdas)), cv_mse=mean_err.tolist())
    return model


def soft_threshold(rho, lam):
    return np.sign(rho) * np.maximum(np.abs(rho) - lam, 0.0)


def lambda_max(X, y) -> float:
    """Smallest penalty at which every lasso coefficient is zero."""
    X, _ = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    mean, std = standardization_stats(X)
    Z = (X - mean) / std
    return float(np.max(np.abs(Z.T @ (y - y.mean()))) / len(y))


def lasso_grid(X, y, n_lambdas: int = 100, ratio: float = 1e-4) -> np.ndarray:
    lmax = lambda_max(X, y)
    if lmax == 0:
        lmax = 1.0
    return np.geomspace(lmax, lmax * ratio, n_lambdas)


def _coordinate_descent(G, c, lambdas, tol, max_sweeps):
    """Lasso path on a standardised problem given Gram ``G = Z'Z/n`` and
    ``c = Z'y/n``. Returns (betas, converged flags, sweeps used)."""
    return _kernels.lasso_path(np.ascontiguousarray(G, dtype=np.float64),
                               np.ascontiguousarray(c, dtype=np.float64),
                               np.ascontiguousarray(lambdas, dtype=np.float64),
                               float(tol), int(max_sweeps))


def lasso_path(X, y, lambdas, tol: float = 1e-6, max_sweeps: int = 10_000):
    """Coefficient path with warm starts.

    Returns ``(intercepts, coefs, converged)`` with coefficients on the raw
    feature scale, one row per penalty. The objective is
    ``(1/2n) |y - Xb|^2 + lam |b|_1`` on standardised features.
    """
    X, _ = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if (lambdas < 0).any():
        raise ValueError("lasso penalties must be non-negative")
    n = len(y)
    mean, std = standardization_stats(X)
    Z = (X - mean) / std
    y_mean = float(y.mean())
    G = Z.T @ Z / n
    c = Z.T @ (y - y_mean) / n
    betas_z, converged, _ = _coordinate_descent(G, c, lambdas, tol, max_sweeps)
    coefs = betas_z / std
    intercepts = y_mean - coefs @ mean
    return intercepts, coefs, converged


def fit_lasso(X, y, lam: float, n_warm: int = 20, tol: float = 1e-6,
              max_sweeps: int = 10_000, feature_names=None) -> LinearModel:
    """Lasso at a single penalty, approached through a short warm-start path."""
    X, names = as_array(X)
    lmax = lambda_max(X, y)
    if lam > 0 and lmax > lam:
        grid = np.append(np.geomspace(lmax, lam, n_warm)[:-1], lam)
    else:
        grid = np.array([lam])
    b0, coefs, conv = lasso_path(X, y, grid, tol, max_sweeps)
    if not conv[-1]:
        warnings.warn(f"lasso did not converge at lambda={lam:g}", RuntimeWarning, stacklevel=2)
    return LinearModel(float(b0[-1]), coefs[-1], "lasso", float(lam),
                       names or _names(feature_names), bool(conv[-1]))


def fit_lasso_cv(X, y, lambdas=None, folds: int = 5, seed: int = 0, tol: float = 1e-6,
                 max_sweeps: int = 10_000, feature_names=None) -> LinearModel:
    """Lasso with the penalty picked by k-fold CV over a descending grid.

    With ``lambdas=None`` the grid is 100 log-spaced values from
    ``lambda_max`` down to ``1e-4 * lambda_max`` computed on ``X, y``.
    """
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    if lambdas is None:
        lambdas = lasso_grid(X, y)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if (lambdas <= 0).any() or (np.diff(lambdas) > 0).any():
        raise ValueError("lambda grid must be positive and descending")
    assign = _fold_ids(len(y), folds, seed)
    errors = np.zeros((folds, len(lambdas)))
    for f in range(folds):
        tr, va = assign != f, assign == f
        b0, coefs, _ = lasso_path(X[tr], y[tr], lambdas, tol, max_sweeps)
        pred = b0[:, None] + coefs @ X[va].T
        errors[f] = np.mean((pred - y[va]) ** 2, axis=1)
    mean_err = errors.mean(axis=0)
    best = int(np.argmin(mean_err))
    b0, coefs, conv = lasso_path(X, y, lambdas[: best + 1], tol, max_sweeps)
    if not conv[-1]:
        warnings.warn(f"lasso did not converge at lambda={lambdas[best]:g}; "
                      "returning the last iterate", RuntimeWarning, stacklevel=2)
    model = LinearModel(float(b0[-1]), coefs[-1], "lasso", float(lambdas[best]),
                        names or _names(feature_names), bool(conv[-1]))
    model.info.update(cv_lambdas=lambdas.tolist(), cv_mse=mean_err.tolist())
    return model
