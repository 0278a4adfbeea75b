"""Cross-validation, regression metrics and paired significance tests."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "FoldAssignment",
    "MetricSet",
    "SignificanceResult",
    "kfold_split",
    "compute_metrics",
    "mean_metrics",
    "paired_t_test",
    "betainc",
    "student_t_sf",
    "student_t_ppf",
    "cross_validate",
    "y_randomization",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 42


@dataclass(frozen=True)
class FoldAssignment:
    n: int
    k: int
    assignment: np.ndarray
    seed: int

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """(train indices, test indices) for ``fold``."""
        test = self.assignment == fold
        return np.flatnonzero(~test), np.flatnonzero(test)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)


def kfold_split(n: int, k: int, seed: int = DEFAULT_SEED) -> FoldAssignment:
    """Shuffle ``range(n)`` with a seeded generator and deal it into ``k``
    contiguous chunks whose sizes differ by at most one."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > n:
        raise ValueError(f"cannot split {n} samples into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    for fold, chunk in enumerate(np.array_split(perm, k)):
        assignment[chunk] = fold
    return FoldAssignment(n, k, assignment, seed)


@dataclass(frozen=True)
class MetricSet:
    r2: float
    rmse: float
    mae: float
    mse: float

    def as_dict(self) -> dict:
        return {"r2": self.r2, "rmse": self.rmse, "mae": self.mae, "mse": self.mse}


def compute_metrics(y_true, y_pred) -> MetricSet:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D arrays of equal length")
    if len(y_true) < 2:
        raise ValueError("need at least two samples")
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0:
        raise ValueError("R^2 is undefined for a constant y_true")
    resid = y_true - y_pred
    mse = float(np.mean(resid**2))
    return MetricSet(
        r2=1.0 - float(np.sum(resid**2)) / ss_tot,
        rmse=math.sqrt(mse),
        mae=float(np.mean(np.abs(resid))),
        mse=mse,
    )


def mean_metrics(folds: Sequence[MetricSet]) -> MetricSet:
    """Average each metric over folds (R^2 is the mean of per-fold R^2)."""
    if not folds:
        raise ValueError("no folds to average")
    return MetricSet(*(float(np.mean([getattr(m, f) for m in folds]))
                       for f in ("r2", "rmse", "mae", "mse")))


# Student t distribution via the regularized incomplete beta function.

_CF_EPS = 1e-15
_CF_TINY = 1e-300


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _CF_TINY else _CF_TINY)
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _CF_TINY else _CF_TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _CF_TINY else _CF_TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _CF_TINY else _CF_TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _CF_TINY else _CF_TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper tail P(T > t)."""
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))
    return tail if t >= 0 else 1.0 - tail


def student_t_ppf(q: float, df: float) -> float:
    """Quantile of the t distribution, found by bisection on the CDF."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -student_t_ppf(1.0 - q, df)
    target = 1.0 - q
    lo, hi = 0.0, 1.0
    while student_t_sf(hi, df) > target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_sf(mid, df) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SignificanceResult:
    t_stat: float
    p_value: float
    mean_diff: float
    ci95: tuple[float, float]
    degenerate: bool = False
    df: int = 0


def paired_t_test(a, b) -> SignificanceResult:
    """Two-sided paired t-test on ``d = b - a``.

    When every difference is identical the variance is zero and
    ``degenerate`` is set: the statistic is +/-inf with p = 0, or 0 with
    p = 1 when the samples are equal.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-D and of equal length")
    k = len(a)
    if k < 2:
        raise ValueError("need at least two pairs")
    d = b - a
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = k - 1
    # spread below rounding noise of the differences counts as zero
    if sd <= 1e-12 * max(1.0, float(np.max(np.abs(d)))):
        if mean == 0:
            return SignificanceResult(0.0, 1.0, 0.0, (0.0, 0.0), True, df)
        return SignificanceResult(math.copysign(math.inf, mean), 0.0, mean, (mean, mean),
                                  True, df)
    se = sd / math.sqrt(k)
    t = mean / se
    p = min(1.0, 2.0 * student_t_sf(abs(t), df))
    half = student_t_ppf(0.975, df) * se
    return SignificanceResult(t, p, mean, (mean - half, mean + half), False, df)


# Cross-validation drivers.

FitPredict = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def cross_validate(fit_predict: FitPredict, X, y, k: int = 5, seed: int = DEFAULT_SEED,
                   n_jobs: int = 1) -> list[MetricSet]:
    """Per-fold metrics for ``fit_predict(X_train, y_train, X_test)``.

    ``X`` may be an array or anything supporting ``take(rows)`` (such as a
    FeatureMatrix); only the training rows of each fold reach the fit, so any
    scaling done inside ``fit_predict`` is fitted on the training split.
    """
    y = np.asarray(y, dtype=np.float64)
    folds = kfold_split(len(y), k, seed)
    take = X.take if hasattr(X, "take") and not isinstance(X, np.ndarray) else X.__getitem__

    def one(fold):
        tr, te = folds.split(fold)
        pred = fit_predict(take(tr), y[tr], take(te))
        return compute_metrics(y[te], pred)

    if n_jobs == 1:
        return [one(f) for f in range(k)]
    with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
        return list(pool.map(one, range(k)))


def y_randomization(fit_predict: FitPredict, X, y, n_shuffles: int = 10, seed: int = 0,
                    k: int = 5, cv_seed: int = DEFAULT_SEED) -> list[MetricSet]:
    """Fold-averaged CV metrics after each of ``n_shuffles`` target permutations."""
    if n_shuffles < 1:
        raise ValueError("n_shuffles must be at least 1")
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_shuffles):
        shuffled = rng.permutation(y)
        out.append(mean_metrics(cross_validate(fit_predict, X, shuffled, k, cv_seed)))
    return out
