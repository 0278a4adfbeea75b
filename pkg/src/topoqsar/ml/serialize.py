"""JSON model format.

Every document carries ``format`` ("topoqsar-model"), ``version`` and
``kind`` (``linear`` | ``gradient_boosting`` | ``random_forest``). Linear
models store ``intercept``, ``coefficients``, ``regularization`` and
``lambda``; ensembles store ``base_prediction``, ``learning_rate``,
``params`` and ``trees`` as parallel node arrays (see
:meth:`RegressionTree.to_dict`).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from topoqsar.ml.ensemble import TreeEnsemble
from topoqsar.ml.linear import LinearModel
from topoqsar.ml.tree import RegressionTree

FORMAT = "topoqsar-model"
VERSION = 1


def model_to_dict(model) -> dict:
    doc = {"format": FORMAT, "version": VERSION}
    names = list(model.feature_names) if model.feature_names is not None else None
    if isinstance(model, LinearModel):
        doc.update(kind="linear", intercept=model.intercept,
                   coefficients=model.coefficients.tolist(),
                   regularization=model.regularization, **{"lambda": model.lam},
                   converged=model.converged, feature_names=names)
    elif isinstance(model, TreeEnsemble):
        doc.update(kind=model.kind, base_prediction=model.base_prediction,
                   learning_rate=model.learning_rate, n_features=model.n_features,
                   feature_names=names, params=model.params,
                   trees=[t.to_dict() for t in model.trees])
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ValueError("not a topoqsar model document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model format version {doc.get('version')}")
    names = tuple(doc["feature_names"]) if doc.get("feature_names") is not None else None
    if doc["kind"] == "linear":
        return LinearModel(doc["intercept"], np.asarray(doc["coefficients"]),
                           doc["regularization"], doc["lambda"], names, doc["converged"])
    return TreeEnsemble(doc["kind"], [RegressionTree.from_dict(t) for t in doc["trees"]],
                        doc["base_prediction"], doc["learning_rate"], doc["n_features"],
                        names, doc["params"])


def save_model(model, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(model_to_dict(model)))
    return path


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))
