"""Regression models used by the benchmark approaches."""

from __future__ import annotations

import numpy as np

from topoqsar.ml.ensemble import (
    GB_DEFAULTS,
    RF_DEFAULTS,
    TreeEnsemble,
    feature_importances,
    fit_gradient_boosting,
    fit_random_forest,
    oob_predictions,
)
from topoqsar.ml.features import FeatureMatrix
from topoqsar.ml.linear import (
    POLY_NAMES,
    LinearModel,
    fit_lasso,
    fit_lasso_cv,
    fit_ols,
    fit_ridge,
    fit_ridge_cv,
    lasso_path,
    polynomial_basis,
)
from topoqsar.ml.serialize import load_model, model_from_dict, model_to_dict, save_model
from topoqsar.ml.tree import RegressionTree, build_tree


class FeatureMismatchError(ValueError):
    pass


def predict(model, X) -> np.ndarray:
    """Predict with a fitted linear model or tree ensemble.

    When ``X`` is a :class:`FeatureMatrix` its column names must equal the
    training names, in order.
    """
    expected = model.feature_names
    if isinstance(X, FeatureMatrix):
        if expected is not None and tuple(X.names) != tuple(expected):
            missing = [n for n in expected if n not in X.names]
            extra = [n for n in X.names if n not in expected]
            detail = f"missing {missing}, extra {extra}" if missing or extra else "order differs"
            raise FeatureMismatchError(f"feature mismatch: {detail}")
        values = X.values
    else:
        values = np.asarray(X, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
    n_expected = (len(model.coefficients) if isinstance(model, LinearModel)
                  else model.n_features)
    if values.shape[1] != n_expected:
        raise FeatureMismatchError(
            f"model expects {n_expected} features, got {values.shape[1]}")
    return model.predict(values)


__all__ = [
    "FeatureMatrix",
    "FeatureMismatchError",
    "GB_DEFAULTS",
    "LinearModel",
    "POLY_NAMES",
    "RF_DEFAULTS",
    "RegressionTree",
    "TreeEnsemble",
    "build_tree",
    "feature_importances",
    "fit_gradient_boosting",
    "fit_lasso",
    "fit_lasso_cv",
    "fit_ols",
    "fit_random_forest",
    "fit_ridge",
    "fit_ridge_cv",
    "lasso_path",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "oob_predictions",
    "polynomial_basis",
    "predict",
    "save_model",
]
