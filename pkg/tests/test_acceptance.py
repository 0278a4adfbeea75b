"""Acceptance criteria 1-12, one PASS/FAIL line each.

Criteria 6-12 need the benchmark CSVs. They are looked up in the
download cache (``TOPOQSAR_CACHE`` or ~/.cache/topoqsar, filled by
``topoqsar fetch all``) and in the ``[paths]`` section of the config file
named by ``TOPOQSAR_CONFIG``. A missing dataset fails its criteria with a
"dataset unavailable" reason. Set ``TOPOQSAR_ACCEPT_LARGE=1`` to include
logp_synthetic.

Run alone with ``python tests/test_acceptance.py`` or ``pytest
tests/test_acceptance.py``; the summary lines are also repeated at the end
of any pytest run that includes this file.
"""

import csv
import math
import os
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import CRITERIA, DATA
from topoqsar.eval import (
    compute_metrics,
    cross_validate,
    paired_t_test,
    student_t_ppf,
    student_t_sf,
)
from topoqsar.fingerprint import morgan_fingerprint
from topoqsar.graph import molecule_from_edges
from topoqsar.indices import activity_indices, classical_indices
from topoqsar.ml import (
    FeatureMatrix,
    fit_gradient_boosting,
    fit_ols,
    fit_random_forest,
    fit_ridge,
)
from topoqsar.ml.linear import lambda_max, lasso_path
from topoqsar.pipeline import (
    LARGE_DATASETS,
    DatasetError,
    featurize,
    load_config,
    load_dataset,
    locate_dataset,
    randomization_test,
    run_benchmark,
    run_cell,
    write_report,
)
from topoqsar.pipeline.features import DescriptorTable, describe
from topoqsar.smiles import parse_smiles

PRIMARY = ("esol", "sampl", "bace", "logp_experimental")


@pytest.fixture
def verdict(capsys):
    def record(n, ok, detail):
        CRITERIA[n] = (bool(ok), detail)
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return record


# property-based criteria


def test_criterion_01_index_oracles(verdict):
    rng = random.Random(20240601)
    start = time.perf_counter()
    bad = []
    for _ in range(200):
        n, edges = oracles.random_connected_graph(rng, max_n=12)
        mol = molecule_from_edges(n, edges)
        a, g = activity_indices(mol), classical_indices(mol)
        D, zeta = oracles.activity(n, edges)
        m1, m2 = oracles.zagreb(n, edges)
        exact = [("wiener", g.wiener, oracles.wiener(n, edges)), ("M1", g.zagreb_m1, m1),
                 ("M2", g.zagreb_m2, m2)]
        real = [("D", a.D, D), ("zeta", a.zeta, zeta),
                ("randic", g.randic, oracles.randic(n, edges)),
                ("balaban", g.balaban_j, oracles.balaban(n, edges))]
        bad += [(name, got, want) for name, got, want in exact if got != want]
        bad += [(name, got, want) for name, got, want in real if abs(got - want) > 1e-10]
    seconds = time.perf_counter() - start
    verdict(1, not bad and seconds < 10,
            f"200 random graphs, {len(bad)} mismatches, {seconds:.2f}s (limit 10s)")


def _spelling_pairs():
    with open(DATA / "respellings.csv") as fh:
        pairs = [(r["smiles"], r["respelled"]) for r in csv.DictReader(fh)]
    # ring-closure renumbering and reuse written by hand
    pairs += [("C1CCCCC1", "C2CCCCC2"), ("c1ccc2ccccc2c1", "c1ccc3ccccc3c1"),
              ("C1CC1C1CC1", "C1CC1C2CC2"), ("C%10CCCCC%10", "C1CCCCC1"),
              ("CCO", "OCC")]
    return pairs


def test_criterion_02_spelling_invariance(verdict):
    pairs = _spelling_pairs()
    bad = []
    for a, b in pairs:
        ma, mb = parse_smiles(a), parse_smiles(b)
        same = describe(ma, fp_width=1024) == describe(mb, fp_width=1024)
        same &= all(morgan_fingerprint(ma, r, 2048) == morgan_fingerprint(mb, r, 2048)
                    for r in (1, 2, 3))
        if not same:
            bad.append((a, b))
    verdict(2, len(pairs) >= 50 and not bad,
            f"{len(pairs)} equivalent spelling pairs, {len(bad)} with any difference")


def test_criterion_03_regression_stack(verdict):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(100, 6)) * rng.uniform(0.5, 4, 6)
    y = X @ rng.normal(size=6) + rng.normal(size=100)
    ridge, ols = fit_ridge(X, y, 0.0), fit_ols(X, y)
    ridge_gap = float(np.abs(ridge.coefficients - ols.coefficients).max())
    lmax = lambda_max(X, y)
    _, coefs, _ = lasso_path(X, y, [lmax, 1.5 * lmax, 10 * lmax])
    killed = bool((coefs == 0).all())
    gb = fit_gradient_boosting(X, y, n_trees=100)
    monotone = all(b <= a for a, b in zip(gb.train_loss, gb.train_loss[1:]))
    a = fit_random_forest(X, y, n_trees=30, seed=11).predict(X)
    b = fit_random_forest(X, y, n_trees=30, seed=11).predict(X)
    same = np.array_equal(a, b)
    ok = ridge_gap <= 1e-8 and killed and monotone and same
    verdict(3, ok, f"ridge(0)-OLS max gap {ridge_gap:.1e}; lasso zeros at lambda_max: "
                   f"{killed}; GB loss non-increasing: {monotone}; RF repeatable: {same}")


def test_criterion_04_statistics(verdict):
    q = student_t_ppf(0.975, 4)
    p_at_table = 2 * student_t_sf(2.776, 4)
    # a paired test whose statistic is the table value has p = 0.05
    d = np.array([-1.0, 0.0, 1.0, 2.0, 3.0])
    shift = 2.776 * d.std(ddof=1) / math.sqrt(5) - d.mean()
    res = paired_t_test(np.zeros(5), d + shift)
    rng = np.random.default_rng(4)
    worst = 0.0
    ordered = True
    for _ in range(1000):
        n = int(rng.integers(2, 50))
        m = compute_metrics(rng.normal(size=n), rng.normal(size=n) * 3)
        worst = max(worst, abs(m.rmse**2 - m.mse))
        ordered &= m.mae <= m.rmse
    ok = (abs(q - 2.776) <= 1e-3 and abs(p_at_table - 0.05) <= 1e-3
          and abs(res.p_value - 0.05) <= 1e-3 and worst <= 1e-12 and ordered)
    verdict(4, ok, f"t(0.975, 4) = {q:.4f}; p at t=2.776 is {res.p_value:.5f}; "
                   f"max |rmse^2 - mse| {worst:.1e}, mae <= rmse on all 1000: {ordered}")


def test_criterion_05_leakage_sentinel(verdict, weight_dataset):
    table = featurize(weight_dataset)
    y = np.random.default_rng(5).normal(size=len(table))
    fm = table.features
    leaky = DescriptorTable(FeatureMatrix(np.column_stack([fm.values, y]),
                                          (*fm.names, "target_copy")),
                            y, table.smiles, table.record_index, "sentinel")

    def deliberate(Xtr, ytr, Xte):
        cols = ["target_copy"]
        return fit_ridge(Xtr.select(cols), ytr, 0.0).predict(Xte.select(cols))

    harness = min(m.r2 for m in cross_validate(deliberate, leaky.features, y))
    standard = max(m.r2 for a in range(1, 8) for m in run_cell(leaky, a).folds)
    verdict(5, harness > 0.999 and standard <= 0.999,
            f"deliberate-leak harness min fold R^2 {harness:.6f}; standard path "
            f"(approaches 1-7) max fold R^2 {standard:.3f}")


# quantitative criteria on the benchmark datasets


def _wanted():
    names = list(PRIMARY)
    if os.environ.get("TOPOQSAR_ACCEPT_LARGE") == "1":
        names += sorted(LARGE_DATASETS)
    return names


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    cfg = load_config(os.environ.get("TOPOQSAR_CONFIG"))
    datasets, missing = {}, {}
    for name in _wanted():
        path = locate_dataset(name, cfg.paths)
        if not path.is_file():
            missing[name] = f"dataset unavailable: no file at {path}"
            continue
        try:
            smiles_col, target_col = cfg.schema(name)
            datasets[name] = load_dataset(path, smiles_col, target_col, name=name)
        except DatasetError as exc:
            missing[name] = f"dataset unavailable: {exc}"
    report = None
    if datasets:
        report = run_benchmark(datasets, range(1, 8), cfg.folds, cfg.seed, cfg.params,
                               cfg.workers)
        out = tmp_path_factory.mktemp("acceptance")
        write_report(report, out)
        print(f"\nacceptance benchmark reports in {out}")
    return report, datasets, missing, cfg


def _need(bench, names):
    """Reason string when any of ``names`` was not benchmarked, else None."""
    report, _, missing, _ = bench
    gone = [f"{n} ({missing.get(n, 'not run')})" for n in names
            if report is None or n not in report.datasets]
    return "; ".join(gone) or None


def _r2(bench, ds, a):
    return bench[0].mean_r2(ds, a)


def test_criterion_06_baseline_range(verdict, bench):
    reason = _need(bench, PRIMARY)
    if reason:
        verdict(6, False, reason)
    r2 = {ds: _r2(bench, ds, 1) for ds in PRIMARY}
    run = [ds for ds in bench[0].datasets]
    avg = float(np.mean([_r2(bench, ds, 1) for ds in run]))
    ok = all(0.10 <= v <= 0.45 for v in r2.values()) and avg <= 0.45
    detail = ", ".join(f"{ds} {v:.3f}" for ds, v in r2.items())
    verdict(6, ok, f"baseline R^2 {detail} (need [0.10, 0.45]); "
                   f"average over {len(run)} datasets {avg:.3f} (need <= 0.45)")


def test_criterion_07_gradient_boosting(verdict, bench):
    reason = _need(bench, ["esol", "sampl"])
    if reason:
        verdict(7, False, reason)
    checks = [("esol", 0.80), ("sampl", 0.82)]
    if "logp_synthetic" in bench[0].datasets:
        checks.append(("logp_synthetic", 0.85))
    got = {ds: _r2(bench, ds, 5) for ds, _ in checks}
    ok = all(got[ds] >= floor for ds, floor in checks)
    detail = ", ".join(f"{ds} {got[ds]:.3f} (need >= {floor})" for ds, floor in checks)
    if "logp_synthetic" not in got:
        detail += "; logp_synthetic skipped as large"
    verdict(7, ok, f"approach 5 R^2 {detail}")


def test_criterion_08_hybrid_bace(verdict, bench):
    reason = _need(bench, ["bace"])
    if reason:
        verdict(8, False, reason)
    v = _r2(bench, "bace", 7)
    verdict(8, v >= 0.60, f"approach 7 on bace R^2 {v:.3f} (need >= 0.60)")


def test_criterion_09_lasso_logp(verdict, bench):
    reason = _need(bench, ["logp_experimental"])
    if reason:
        verdict(9, False, reason)
    v = _r2(bench, "logp_experimental", 6)
    verdict(9, v >= 0.40, f"approach 6 on logp_experimental R^2 {v:.3f} (need >= 0.40)")


def test_criterion_10_significance(verdict, bench):
    reason = _need(bench, ["esol", "sampl", "bace"])
    if reason:
        verdict(10, False, reason)
    report = bench[0]
    best_p = {}
    for ds in ("esol", "sampl", "bace"):
        best = report.best[ds]
        best_p[ds] = 1.0 if best == 1 else report.significance[ds][best].p_value
    ridge_p = {ds: report.significance[ds][2].p_value for ds in report.datasets}
    significant = [ds for ds, p in ridge_p.items() if p <= 0.05]
    # at least 4 of 5 datasets without a significant ridge gain means at most one with
    ok = all(p < 0.01 for p in best_p.values()) and len(significant) <= 1
    detail = ", ".join(f"{ds} best={report.best[ds]} p={p:.2g}" for ds, p in best_p.items())
    verdict(10, ok, f"best vs baseline {detail} (need < 0.01); approach 2 vs 1 p <= 0.05 "
                    f"on {significant or 'none'} of {len(ridge_p)} datasets (at most 1 allowed)")


def test_criterion_11_y_randomization(verdict, bench):
    reason = _need(bench, ["esol"])
    if reason:
        verdict(11, False, reason)
    report, datasets, _, cfg = bench
    best = report.best["esol"]
    shuffled = randomization_test(datasets["esol"], best, n_shuffles=10, seed=0, k=cfg.folds,
                                  cv_seed=cfg.seed, params=cfg.params)
    mean = float(np.mean([m.r2 for m in shuffled]))
    verdict(11, mean <= 0.05,
            f"approach {best} on esol, 10 shuffles: mean R^2 {mean:.3f} (need <= 0.05)")


def test_criterion_12_importance_of_external_activity(verdict, bench):
    reason = _need(bench, ["bace"])
    if reason:
        verdict(12, False, reason)
    ranked = [name for name, _ in bench[0].cell("bace", 7).importances]
    rank = ranked.index("D") + 1
    verdict(12, rank <= 15, f'"D" ranks {rank} of {len(ranked)} in the bace hybrid model '
                            f"(need top 15); top 5: {ranked[:5]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
