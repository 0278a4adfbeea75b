from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

__all__ = ["FeatureMatrix", "standardization_stats", "as_array"]


def standardization_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and population std; zero-variance columns get scale 1."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    names: tuple[str, ...]
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("feature matrix must be two-dimensional")
        names = tuple(self.names)
        if len(names) != values.shape[1]:
            raise ValueError(f"{len(names)} names for {values.shape[1]} columns")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate column names: {dupes}")
        if not np.isfinite(values).all():
            raise ValueError("feature matrix contains non-finite values")
        if (self.mean is None) != (self.std is None):
            raise ValueError("standardization needs both mean and std")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def standardized(self) -> bool:
        return self.mean is not None

    def standardize(self) -> "FeatureMatrix":
        """Fit standardization on these rows and apply it."""
        mean, std = standardization_stats(self.values)
        return FeatureMatrix((self.values - mean) / std, self.names, mean, std)

    def standardize_like(self, fitted: "FeatureMatrix") -> "FeatureMatrix":
        """Apply another matrix's fitted statistics (e.g. train -> test)."""
        if not fitted.standardized:
            raise ValueError("reference matrix carries no standardization metadata")
        if fitted.names != self.names:
            raise ValueError("column names differ from the reference matrix")
        return FeatureMatrix((self.values - fitted.mean) / fitted.std, self.names,
                             fitted.mean, fitted.std)

    def take(self, rows) -> "FeatureMatrix":
        return replace(self, values=self.values[rows])

    def select(self, names: Sequence[str]) -> "FeatureMatrix":
        idx = [self.names.index(n) for n in names]
        mean = None if self.mean is None else self.mean[idx]
        std = None if self.std is None else self.std[idx]
        return FeatureMatrix(self.values[:, idx], tuple(names), mean, std)

    def drop(self, names: Sequence[str]) -> "FeatureMatrix":
        return self.select([n for n in self.names if n not in set(names)])


def as_array(X) -> tuple[np.ndarray, tuple[str, ...] | None]:
    if isinstance(X, FeatureMatrix):
        return X.values, X.names
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X, None
