"""Cross-validated benchmark over datasets x approaches."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from topoqsar.eval import (
    DEFAULT_SEED,
    MetricSet,
    SignificanceResult,
    kfold_split,
    compute_metrics,
    mean_metrics,
    paired_t_test,
    student_t_ppf,
    y_randomization,
)
from topoqsar.pipeline import published
from topoqsar.pipeline.approaches import ModelParams, fit_approach, get_approach
from topoqsar.pipeline.datasets import Dataset
from topoqsar.pipeline.features import DescriptorTable, featurize

logger = logging.getLogger(__name__)

__all__ = ["CellResult", "EvalReport", "CellError", "run_approach", "run_cell",
           "run_benchmark", "randomization_test", "prepare", "TOP_FEATURES"]

TOP_FEATURES = 15


class CellError(RuntimeError):
    """A model failure annotated with where it happened."""


@dataclass
class CellResult:
    dataset: str
    approach: int
    folds: list[MetricSet] = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None
    importances: list[tuple[str, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def mean(self) -> MetricSet:
        return mean_metrics(self.folds)

    @property
    def r2(self) -> np.ndarray:
        return np.array([m.r2 for m in self.folds])

    def r2_ci(self) -> tuple[float, float]:
        """95% t-interval of the mean fold R^2."""
        r2 = self.r2
        k = len(r2)
        half = student_t_ppf(0.975, k - 1) * r2.std(ddof=1) / math.sqrt(k)
        return float(r2.mean() - half), float(r2.mean() + half)


def prepare(data, params: ModelParams, approaches=range(1, 8)) -> DescriptorTable:
    """Descriptor table covering every block the given approaches need."""
    if isinstance(data, DescriptorTable):
        return data
    blocks = {b for a in approaches for b in get_approach(a).feature_blocks}
    return featurize(data, blocks, params.fp_width, params.fp_radius, params.irregularity)


def run_cell(table: DescriptorTable, approach, k: int = 5, seed: int = DEFAULT_SEED,
             params: ModelParams | None = None) -> CellResult:
    """Cross-validate one approach; fold importances are averaged for ensembles."""
    spec = get_approach(approach)
    params = params or ModelParams()
    folds = kfold_split(len(table), k, seed)
    X, y = table.features, table.targets
    result = CellResult(table.dataset, spec.id)
    totals: dict[str, float] = {}
    start = time.perf_counter()
    for f in range(k):
        tr, te = folds.split(f)
        try:
            fitted = fit_approach(spec, X.take(tr), y[tr], params)
            pred = fitted.predict(X.take(te))
            result.folds.append(compute_metrics(y[te], pred))
        except Exception as exc:
            raise CellError(f"{table.dataset} / approach {spec.id} / fold {f}: {exc}") from exc
        if spec.is_ensemble:
            for name, imp in fitted.importances():
                totals[name] = totals.get(name, 0.0) + imp / k
    result.seconds = time.perf_counter() - start
    if totals:
        pos = {n: i for i, n in enumerate(fitted.columns)}
        result.importances = sorted(totals.items(), key=lambda kv: (-kv[1], pos[kv[0]]))
    return result


def run_approach(data, approach, k: int = 5, seed: int = DEFAULT_SEED,
                 params: ModelParams | None = None) -> list[MetricSet]:
    """Per-fold metrics of one approach on a Dataset or DescriptorTable."""
    params = params or ModelParams()
    table = prepare(data, params, [approach])
    return run_cell(table, approach, k, seed, params).folds


def randomization_test(data, approach, n_shuffles: int = 10, seed: int = 0, k: int = 5,
                       cv_seed: int = DEFAULT_SEED, params: ModelParams | None = None):
    """Fold-averaged metrics after each of ``n_shuffles`` target permutations."""
    params = params or ModelParams()
    spec = get_approach(approach)
    table = prepare(data, params, [spec.id])

    def fit_predict(X_train, y_train, X_test):
        return fit_approach(spec, X_train, y_train, params).predict(X_test)

    return y_randomization(fit_predict, table.features, table.targets, n_shuffles, seed, k,
                           cv_seed)


@dataclass
class EvalReport:
    datasets: list[str]
    approaches: list[int]
    k: int
    seed: int
    cells: dict[tuple[str, int], CellResult]
    significance: dict[str, dict[int, SignificanceResult]] = field(default_factory=dict)
    best: dict[str, int] = field(default_factory=dict)
    improvement: dict[str, float] = field(default_factory=dict)
    published: dict[str, dict[str, float]] = field(default_factory=dict)
    featurize_seconds: dict[str, float] = field(default_factory=dict)

    def cell(self, dataset: str, approach: int) -> CellResult:
        return self.cells[(dataset, approach)]

    @property
    def failures(self) -> list[CellResult]:
        return [c for c in self.cells.values() if not c.ok]

    def mean_r2(self, dataset: str, approach: int) -> float:
        c = self.cells.get((dataset, approach))
        return c.mean.r2 if c is not None and c.ok else math.nan

    def to_dict(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "approaches": list(self.approaches),
            "k": self.k,
            "seed": self.seed,
            "cells": [
                {"dataset": c.dataset, "approach": c.approach, "seconds": c.seconds,
                 "error": c.error, "folds": [m.as_dict() for m in c.folds],
                 "importances": [[n, v] for n, v in c.importances]}
                for _, c in sorted(self.cells.items())
            ],
            "significance": {
                ds: {str(a): {"t_stat": s.t_stat, "p_value": s.p_value,
                              "mean_diff": s.mean_diff, "ci95": list(s.ci95),
                              "degenerate": s.degenerate, "df": s.df}
                     for a, s in sorted(rows.items())}
                for ds, rows in self.significance.items()
            },
            "best": dict(self.best),
            "improvement": dict(self.improvement),
            "published": {"label": published.LABEL, "values": self.published},
            "featurize_seconds": dict(self.featurize_seconds),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        cells = {}
        for c in d["cells"]:
            cell = CellResult(c["dataset"], c["approach"],
                              [MetricSet(**m) for m in c["folds"]], c["seconds"], c["error"],
                              [(n, v) for n, v in c["importances"]])
            cells[(cell.dataset, cell.approach)] = cell
        significance = {
            ds: {int(a): SignificanceResult(s["t_stat"], s["p_value"], s["mean_diff"],
                                            tuple(s["ci95"]), s["degenerate"], s["df"])
                 for a, s in rows.items()}
            for ds, rows in d["significance"].items()
        }
        return cls(list(d["datasets"]), list(d["approaches"]), d["k"], d["seed"], cells,
                   significance, dict(d["best"]), dict(d["improvement"]),
                   d["published"]["values"], dict(d["featurize_seconds"]))


def _summarise(report: EvalReport) -> None:
    for ds in report.datasets:
        ok = [a for a in report.approaches if report.cells[(ds, a)].ok]
        if not ok:
            continue
        best = max(ok, key=lambda a: (report.mean_r2(ds, a), -a))
        report.best[ds] = best
        base = report.cells.get((ds, 1))
        if base is None or not base.ok:
            continue
        base_r2 = base.mean.r2
        if base_r2 != 0:
            report.improvement[ds] = 100.0 * (report.mean_r2(ds, best) - base_r2) / base_r2
        report.significance[ds] = {
            a: paired_t_test(base.r2, report.cells[(ds, a)].r2)
            for a in ok if a != 1
        }


def run_benchmark(datasets: dict, approaches=range(1, 8), k: int = 5, seed: int = DEFAULT_SEED,
                  params: ModelParams | None = None, workers: int = 1) -> EvalReport:
    """Run every (dataset, approach) cell.

    ``datasets`` maps names to a Dataset or DescriptorTable. A failing cell
    is recorded with its error and the rest of the run continues.
    """
    params = params or ModelParams()
    approaches = sorted({get_approach(a).id for a in approaches})
    if not datasets or not approaches:
        raise ValueError("need at least one dataset and one approach")
    tables, feat_time = {}, {}
    for name, data in datasets.items():
        t0 = time.perf_counter()
        if isinstance(data, Dataset) or not isinstance(data, DescriptorTable):
            data = prepare(data, params, approaches)
        tables[name] = DescriptorTable(data.features, data.targets, data.smiles,
                                       data.record_index, name)
        feat_time[name] = time.perf_counter() - t0

    def work(item):
        name, a = item
        try:
            return run_cell(tables[name], a, k, seed, params)
        except Exception as exc:  # recorded per cell; the run continues
            logger.error("%s", exc)
            return CellResult(name, a, error=str(exc))

    items = [(name, a) for name in tables for a in approaches]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, items))
    else:
        results = [work(i) for i in items]
    cells = {(c.dataset, c.approach): c for c in sorted(results, key=lambda c: (c.dataset,
                                                                                c.approach))}
    report = EvalReport(list(tables), approaches, k, seed, cells,
                        published={ds: published.comparison_columns(ds) for ds in tables},
                        featurize_seconds=feat_time)
    _summarise(report)
    return report
