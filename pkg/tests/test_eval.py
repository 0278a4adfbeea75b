import math

import numpy as np
import pytest
from scipy import special, stats

from topoqsar.eval import (
    betainc,
    compute_metrics,
    cross_validate,
    kfold_split,
    mean_metrics,
    paired_t_test,
    student_t_ppf,
    student_t_sf,
    y_randomization,
)
from topoqsar.ml import FeatureMatrix, fit_ridge
from topoqsar.pipeline import featurize, run_cell


def test_fold_sizes():
    assert kfold_split(10, 5).sizes.tolist() == [2] * 5
    assert sorted(kfold_split(11, 5).sizes.tolist()) == [2, 2, 2, 2, 3]


def test_folds_are_seeded_and_cover_every_sample():
    a, b = kfold_split(57, 5, seed=42), kfold_split(57, 5, seed=42)
    assert np.array_equal(a.assignment, b.assignment)
    assert not np.array_equal(a.assignment, kfold_split(57, 5, seed=1).assignment)
    tests = np.concatenate([a.split(f)[1] for f in range(5)])
    assert sorted(tests.tolist()) == list(range(57))
    for f in range(5):
        tr, te = a.split(f)
        assert not set(tr) & set(te) and len(tr) + len(te) == 57


@pytest.mark.parametrize("n, k", [(3, 4), (10, 1)])
def test_bad_fold_counts(n, k):
    with pytest.raises(ValueError):
        kfold_split(n, k)


def test_metric_examples():
    m = compute_metrics([0, 1, 2], [0, 1, 4])
    assert m.mse == pytest.approx(4 / 3) and m.mae == pytest.approx(2 / 3)
    assert m.r2 == pytest.approx(-1.0)
    perfect = compute_metrics([1, 2, 5], [1, 2, 5])
    assert (perfect.r2, perfect.rmse, perfect.mae, perfect.mse) == (1, 0, 0, 0)
    assert compute_metrics([1, 2, 6], [3, 3, 3]).r2 == pytest.approx(0, abs=1e-15)


def test_constant_truth_is_an_error():
    with pytest.raises(ValueError, match="constant"):
        compute_metrics([2, 2, 2], [1, 2, 3])


def test_metric_identities_on_random_vectors():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        t, p = rng.normal(size=n) * 10, rng.normal(size=n) * 10
        m = compute_metrics(t, p)
        assert m.rmse**2 == pytest.approx(m.mse, rel=1e-12, abs=1e-12)
        assert m.mae <= m.rmse + 1e-12 and m.r2 <= 1


def test_mean_metrics_averages_fold_r2():
    folds = [compute_metrics([0, 1, 2], [0, 1, 4]), compute_metrics([0, 1, 2], [0, 1, 2])]
    assert mean_metrics(folds).r2 == pytest.approx(0.0)


def test_t_quantile_matches_the_table():
    assert student_t_ppf(0.975, 4) == pytest.approx(2.776, abs=1e-3)
    assert student_t_ppf(0.975, 4) == pytest.approx(stats.t.ppf(0.975, 4), abs=1e-9)
    assert 2 * student_t_sf(2.776445, 4) == pytest.approx(0.05, abs=1e-6)


def test_incomplete_beta_and_tails_match_scipy():
    rng = np.random.default_rng(1)
    for _ in range(300):
        a, b, x = rng.uniform(0.2, 40), rng.uniform(0.2, 40), rng.uniform()
        assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)
    for df in (1, 2, 4, 9, 30, 200):
        for t in (-5.0, -1.3, 0.0, 0.7, 2.5, 12.0):
            assert student_t_sf(t, df) == pytest.approx(stats.t.sf(t, df), abs=1e-10)


def test_paired_t_test_against_scipy():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b = rng.normal(size=5), rng.normal(size=5) + 0.5
        res = paired_t_test(a, b)
        ref = stats.ttest_rel(b, a)
        assert res.t_stat == pytest.approx(ref.statistic, rel=1e-10)
        assert res.p_value == pytest.approx(ref.pvalue, abs=1e-9)
        lo, hi = res.ci95
        assert lo <= res.mean_diff <= hi


def test_paired_t_test_examples():
    a = [0.1, 0.2, 0.3, 0.2, 0.2]
    same = paired_t_test(a, a)
    assert same.mean_diff == 0 and same.p_value == 1
    shifted = paired_t_test(a, [0.6, 0.7, 0.8, 0.7, 0.7])
    assert shifted.degenerate and shifted.mean_diff == pytest.approx(0.5)
    assert shifted.t_stat == math.inf and shifted.p_value == 0
    assert paired_t_test([0] * 5, [1] * 5).degenerate
    perturbed = paired_t_test(a, [0.6, 0.71, 0.79, 0.7, 0.7])
    assert not perturbed.degenerate
    assert math.isfinite(perturbed.t_stat) and perturbed.t_stat > 10
    assert perturbed.p_value < 0.001


def test_paired_t_test_is_antisymmetric():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=5), rng.normal(size=5)
    assert paired_t_test(a, b).t_stat == -paired_t_test(b, a).t_stat


def _mean_predictor(X_train, y_train, X_test):
    return np.full(len(X_test), np.mean(y_train))


def test_mean_predictor_never_beats_zero_after_shuffling():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(60, 3))
    y = X[:, 0] + rng.normal(size=60)
    for m in y_randomization(_mean_predictor, X, y, n_shuffles=10):
        assert m.r2 <= 0


def test_randomization_is_seeded():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(50, 4))
    y = X @ [1.0, 2.0, 0.0, 0.5] + rng.normal(size=50)

    def ridge(Xtr, ytr, Xte):
        return fit_ridge(Xtr, ytr, 1.0).predict(Xte)

    a = y_randomization(ridge, X, y, n_shuffles=4, seed=9)
    assert a == y_randomization(ridge, X, y, n_shuffles=4, seed=9)
    assert a != y_randomization(ridge, X, y, n_shuffles=4, seed=10)
    with pytest.raises(ValueError):
        y_randomization(ridge, X, y, n_shuffles=0)


def test_cross_validate_threads_do_not_change_results():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(40, 3))
    y = X.sum(axis=1) + rng.normal(size=40)

    def ridge(Xtr, ytr, Xte):
        return fit_ridge(Xtr, ytr, 0.1).predict(Xte)

    assert cross_validate(ridge, X, y) == cross_validate(ridge, X, y, n_jobs=3)


# leakage sentinel: a copy of the target sits in the feature table

def _with_leak(table):
    fm = table.features
    values = np.column_stack([fm.values, table.targets])
    from topoqsar.pipeline.features import DescriptorTable

    return DescriptorTable(FeatureMatrix(values, (*fm.names, "target_copy")), table.targets,
                           table.smiles, table.record_index, table.dataset)


def test_target_copy_only_helps_when_deliberately_used(weight_dataset):
    table = _with_leak(featurize(weight_dataset, ["activity", "graph", "physchem"]))

    # deliberate leak: a harness that feeds the copied column to the model
    def leaky(Xtr, ytr, Xte):
        return fit_ridge(Xtr.select(["target_copy"]), ytr, 0.0).predict(
            Xte.select(["target_copy"]))

    leaked = cross_validate(leaky, table.features, table.targets)
    assert all(m.r2 > 0.999 for m in leaked)

    # standard path: approaches read only their declared columns
    for approach in (1, 3):
        cell = run_cell(table, approach)
        assert all(m.r2 <= 0.999 for m in cell.folds)


def test_fits_never_see_test_rows():
    # any scaling happens inside the fit, so disjoint rows mean train-only statistics
    X = np.arange(20.0)[:, None]
    y = 2 * X[:, 0] + 1
    overlaps = []

    def spy(Xtr, ytr, Xte):
        overlaps.append(set(Xte[:, 0]) & set(Xtr[:, 0]))
        return fit_ridge(Xtr, ytr, 0.0).predict(Xte)

    folds = cross_validate(spy, X, y, k=4)
    assert overlaps == [set()] * 4
    assert all(m.r2 == pytest.approx(1.0) for m in folds)
