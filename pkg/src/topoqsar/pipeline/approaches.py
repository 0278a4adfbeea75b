"""The seven benchmark approaches: feature blocks plus a model recipe."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from topoqsar.ml import (
    GB_DEFAULTS,
    POLY_NAMES,
    RF_DEFAULTS,
    FeatureMatrix,
    feature_importances,
    fit_gradient_boosting,
    fit_lasso_cv,
    fit_ols,
    fit_random_forest,
    fit_ridge_cv,
    polynomial_basis,
)
from topoqsar.ml.linear import RIDGE_GRID, lasso_grid
from topoqsar.pipeline.features import BLOCK_ORDER, block_names

__all__ = ["ApproachSpec", "APPROACHES", "ModelParams", "FittedApproach", "fit_approach",
           "approach_columns", "get_approach"]

MODEL_KINDS = ("ols_poly", "ridge", "gradient_boosting", "lasso_cv", "random_forest")


@dataclass(frozen=True)
class ApproachSpec:
    id: int
    name: str
    feature_blocks: tuple[str, ...]
    model_kind: str
    polynomial: bool = False

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if not self.feature_blocks or any(b not in BLOCK_ORDER for b in self.feature_blocks):
            raise ValueError(f"invalid feature blocks {self.feature_blocks!r}")
        if self.polynomial and tuple(self.feature_blocks) != ("activity",):
            raise ValueError("the polynomial expansion applies to the activity block only")

    @property
    def is_ensemble(self) -> bool:
        return self.model_kind in ("gradient_boosting", "random_forest")


_FULL = ("activity", "graph", "physchem")
APPROACHES = {
    1: ApproachSpec(1, "Baseline (D/zeta polynomial)", ("activity",), "ols_poly", True),
    2: ApproachSpec(2, "+ Ridge", ("activity",), "ridge", True),
    3: ApproachSpec(3, "+ Graph descriptors", ("activity", "graph"), "ridge"),
    4: ApproachSpec(4, "+ Physicochemical", _FULL, "ridge"),
    5: ApproachSpec(5, "Ensemble (GB)", _FULL, "gradient_boosting"),
    6: ApproachSpec(6, "Lasso selection", _FULL, "lasso_cv"),
    7: ApproachSpec(7, "Hybrid (D/zeta + Morgan)", ("activity", "fingerprint"), "random_forest"),
}


def get_approach(approach) -> ApproachSpec:
    if isinstance(approach, ApproachSpec):
        return approach
    try:
        return APPROACHES[int(approach)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown approach {approach!r}; choose 1-7") from None


@dataclass
class ModelParams:
    """Hyperparameters shared by every approach (all overridable by config)."""

    ridge_lambdas: tuple[float, ...] = RIDGE_GRID
    inner_folds: int = 5
    inner_seed: int = 0
    lasso_n_lambdas: int = 100
    lasso_ratio: float = 1e-4
    gradient_boosting: dict = field(default_factory=lambda: dict(GB_DEFAULTS))
    random_forest: dict = field(default_factory=lambda: dict(RF_DEFAULTS))
    fp_width: int = 1024
    fp_radius: int = 2
    irregularity: str = "degree_mismatch"


def approach_columns(spec: ApproachSpec, fp_width: int = 1024) -> tuple[str, ...]:
    """Input columns an approach reads, in block order."""
    return tuple(n for b in BLOCK_ORDER if b in spec.feature_blocks
                 for n in block_names(b, fp_width))


@dataclass(frozen=True)
class FittedApproach:
    spec: ApproachSpec
    model: object
    columns: tuple[str, ...]

    def design(self, X: FeatureMatrix) -> FeatureMatrix:
        X = X.select(self.columns)
        if self.spec.polynomial:
            D, z = X.values[:, 0], X.values[:, 1]
            return FeatureMatrix(polynomial_basis(D, z), POLY_NAMES)
        return X

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        return self.model.predict(self.design(X))

    def importances(self) -> list[tuple[str, float]]:
        """(feature, importance) sorted by decreasing importance; ties by name order."""
        if self.spec.is_ensemble:
            imp = feature_importances(self.model)
        else:
            coef = np.abs(self.model.coefficients)
            imp = coef / coef.sum() if coef.sum() > 0 else np.full(len(coef), 1 / len(coef))
        names = self.model.feature_names
        order = sorted(range(len(imp)), key=lambda i: (-imp[i], i))
        return [(names[i], float(imp[i])) for i in order]


def fit_approach(spec, X: FeatureMatrix, y, params: ModelParams | None = None) -> FittedApproach:
    """Fit an approach on the training rows ``X, y``.

    ``X`` may carry extra columns; only the approach's own columns are used.
    """
    spec = get_approach(spec)
    params = params or ModelParams()
    y = np.asarray(y, dtype=np.float64)
    fitted = FittedApproach(spec, None, approach_columns(spec, params.fp_width))
    Z = fitted.design(X)
    kind = spec.model_kind
    if kind == "ols_poly":
        model = fit_ols(Z, y)
    elif kind == "ridge":
        model = fit_ridge_cv(Z, y, params.ridge_lambdas, params.inner_folds, params.inner_seed)
    elif kind == "lasso_cv":
        grid = lasso_grid(Z.values, y, params.lasso_n_lambdas, params.lasso_ratio)
        model = fit_lasso_cv(Z, y, grid, params.inner_folds, params.inner_seed)
    elif kind == "gradient_boosting":
        model = fit_gradient_boosting(Z, y, **params.gradient_boosting)
    else:
        model = fit_random_forest(Z, y, **params.random_forest)
    return FittedApproach(spec, model, fitted.columns)
