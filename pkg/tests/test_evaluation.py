import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import nearest_label
from sympol.evaluation import (
    CvReport,
    Evaluator,
    FoldResult,
    MethodConfig,
    cross_validate,
    default_grid,
    grid_search,
    holdout_evaluate,
    make_folds,
    nn_classify,
    nn_predict,
    rotations,
)
from sympol.pipeline import sympol_transform
from sympol.synthetic import generate_bag_of_patterns
from sympol.timeseries import DatasetError, SeriesDataset


@pytest.fixture(scope="module")
def small():
    return generate_bag_of_patterns(classes=2, patterns_per_class=2, pattern_len=40,
                                    N=300, M=20, noise=0.1, seed=3)


def test_method_config_validation():
    MethodConfig("sympol", n=100, alpha=4, degree=3)
    MethodConfig("enn")
    with pytest.raises(ValueError):
        MethodConfig("sympol", n=100, alpha=4)
    with pytest.raises(ValueError):
        MethodConfig("enn", n=100)
    with pytest.raises(ValueError):
        MethodConfig("bsax", n=100, alpha=5, degree=2)
    with pytest.raises(ValueError):
        MethodConfig("sympol", n=3, alpha=4, degree=3)
    with pytest.raises(ValueError):
        MethodConfig("knn")
    assert MethodConfig("bsax", n=100, alpha=4, word_len=3).window == 102


def test_default_grids():
    sym = default_grid("sympol")
    assert len(sym) == 4 * 3 * 8
    assert sym[0] == MethodConfig("sympol", n=100, alpha=4, degree=1)
    assert sym[-1] == MethodConfig("sympol", n=400, alpha=8, degree=8)
    assert sym == sorted(sym, key=MethodConfig.sort_key)
    bsax = default_grid("bsax")
    assert len(bsax) == 4 * 3 * 8
    assert {c.word_len for c in bsax} == set(range(2, 10))
    assert default_grid("dtwnn") == [MethodConfig("dtwnn")]


def test_nn_examples():
    rows = [[0.0, 0.0], [5.0, 5.0], [1.0, 0.0]]
    assert nn_classify(rows, [7, 8, 9], [5.0, 5.0]) == 8
    assert nn_classify([[3.0]], [4], [-100.0]) == 4
    with pytest.raises(ValueError):
        nn_classify(np.empty((0, 2)), [], [1.0, 2.0])


def test_nn_hand_set():
    # distances from (0.4, 0): 0.4, ~7.04, 0.6 -> first row wins
    rows = [[0.0, 0.0], [5.0, 5.0], [1.0, 0.0]]
    assert nn_classify(rows, [0, 1, 2], [0.4, 0.0]) == 0
    assert nn_classify(rows, [0, 1, 2], [0.6, 0.0]) == 2


def test_nn_ties_go_to_lowest_index():
    assert nn_classify([[1.0], [-1.0]], [5, 6], [0.0]) == 5
    assert nn_predict(np.array([[2.0, 1.0, 1.0]]), [0, 1, 2]).tolist() == [1]


@settings(max_examples=40)
@given(st.integers(0, 2**31), st.integers(1, 8), st.integers(1, 6))
def test_nn_matches_oracle(seed, m, dim):
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 5, size=(m, dim)).astype(float)
    labels = rng.integers(0, 3, size=m).tolist()
    q = rng.integers(0, 5, size=dim).astype(float)
    assert nn_classify(rows, labels, q) == nearest_label(rows.tolist(), labels, q.tolist())


def test_folds_balanced_binary():
    folds = make_folds([0, 1] * 5, k=5, seed=1)
    labels = np.array([0, 1] * 5)
    assert [len(f) for f in folds] == [2] * 5
    assert all(sorted(labels[f].tolist()) == [0, 1] for f in folds)


def test_folds_deterministic():
    labels = np.random.default_rng(0).integers(0, 3, size=37)
    a = make_folds(labels, 5, seed=9)
    b = make_folds(labels, 5, seed=9)
    assert all((x == y).all() for x, y in zip(a, b))


@settings(max_examples=60)
@given(st.lists(st.integers(0, 3), min_size=5, max_size=80), st.integers(2, 5), st.integers(0, 99))
def test_folds_partition_and_stratify(labels, k, seed):
    labels = np.array(labels)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        folds = make_folds(labels, k, seed)
    flat = np.concatenate(folds)
    assert sorted(flat.tolist()) == list(range(labels.size))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    for lab in np.unique(labels):
        per = [int((labels[f] == lab).sum()) for f in folds]
        assert max(per) - min(per) <= 1


def test_small_class_warns():
    with pytest.warns(UserWarning, match="degenerate"):
        make_folds([0] * 10 + [1] * 2, 5, 0)


def test_rotations_test_sets_partition():
    folds = make_folds(np.arange(23) % 2, 5, 0)
    rots = rotations(folds)
    tests = np.concatenate([t for _, _, t in rots])
    assert sorted(tests.tolist()) == list(range(23))
    for train, val, test in rots:
        assert len(set(train) | set(val) | set(test)) == 23
        assert not set(train) & set(val) and not set(train) & set(test) and not set(val) & set(test)
    assert {tuple(v) for _, v, _ in rots} == {tuple(f) for f in folds}


def test_single_point_grid(small):
    grid = [MethodConfig("sympol", n=40, alpha=4, degree=3)]
    assert grid_search(small, np.arange(10), np.arange(10, 20), grid) == grid[0]


def test_infeasible_grid_point_skipped(small):
    grid = [MethodConfig("sympol", n=40, alpha=4, degree=3), MethodConfig("sympol", n=400, alpha=4, degree=3)]
    train, val, _ = rotations(make_folds(small.labels, 5, 0))[0]
    with pytest.warns(UserWarning, match="skipping"):
        best, table = Evaluator(small).search(grid, train, val)
    assert best == grid[0]
    assert len(table) == 1


def test_zero_validation_error_selected():
    # one noiseless pattern per class: several configs reach zero validation mistakes
    ds = generate_bag_of_patterns(classes=2, patterns_per_class=1, pattern_len=50,
                                  N=400, M=20, noise=0.0, seed=5)
    grid = [MethodConfig("sympol", n=100, alpha=a, degree=d) for a in (4, 6) for d in (1, 3)]
    train, val, _ = rotations(make_folds(ds.labels, 5, 0))[0]
    best, table = Evaluator(ds).search(grid, train, val)
    scores = dict(table)
    assert scores[best][0] == 0
    assert best == min((c for c in grid if scores[c][0] == 0), key=MethodConfig.sort_key)


def _independent_validation_errors(ds, grid, train, val, mode):
    errors = []
    for cfg in grid:
        fit = None if mode == "transductive" else train
        H = sympol_transform(ds, cfg.n, cfg.alpha, cfg.degree, fit_rows=fit).counts
        wrong = sum(
            nn_classify(H[train], ds.labels[train], H[q]) != ds.labels[q] for q in val
        )
        errors.append(wrong)
    return errors


@pytest.mark.parametrize("mode", ["transductive", "inductive"])
def test_grid_search_matches_exhaustive_loop(small, mode):
    grid = [MethodConfig("sympol", n=n, alpha=a, degree=d)
            for n in (30, 60) for a in (4, 6) for d in (1, 2, 4)]
    train, val, _ = rotations(make_folds(small.labels, 5, 2))[1]
    errors = _independent_validation_errors(small, grid, train, val, mode)
    expected = min(zip(errors, grid), key=lambda e: (e[0], e[1].sort_key()))[1]
    assert grid_search(small, train, val, grid, mode=mode) == expected


def test_histogram_column_permutation_invariance(small):
    H = sympol_transform(small, 40, 6, 4).counts.astype(float)
    perm = np.random.default_rng(0).permutation(H.shape[1])
    train, queries = np.arange(0, 20, 2), np.arange(1, 20, 2)
    for q in queries:
        assert nn_classify(H[train], small.labels[train], H[q]) == nn_classify(
            H[train][:, perm], small.labels[train], H[q][perm])


def test_monotone_distance_transform_invariance():
    d = np.random.default_rng(0).random((6, 9))
    labels = np.arange(9) % 3
    base = nn_predict(d, labels)
    for f in (np.sqrt, np.exp, lambda x: 3 * x + 1, lambda x: x**3):
        np.testing.assert_array_equal(nn_predict(f(d), labels), base)


def test_separable_dataset_zero_error():
    ds = generate_bag_of_patterns(classes=2, patterns_per_class=1, pattern_len=50,
                                  N=400, M=20, noise=0.0, seed=5)
    grid = [MethodConfig("sympol", n=100, alpha=4, degree=3)]
    assert cross_validate(ds, "sympol", grid, seed=1).error_mean == 0.0


@pytest.mark.parametrize("method, grid", [
    ("sympol", [MethodConfig("sympol", n=40, alpha=4, degree=2), MethodConfig("sympol", n=60, alpha=6, degree=3)]),
    ("bsax", [MethodConfig("bsax", n=40, alpha=4, word_len=4), MethodConfig("bsax", n=60, alpha=6, word_len=3)]),
    ("enn", None),
    ("dtwnn", None),
])
@pytest.mark.parametrize("mode", ["transductive", "inductive"])
def test_cross_validate_report(small, method, grid, mode):
    r = cross_validate(small, method, grid, seed=4, mode=mode)
    assert len(r.folds) == 5
    assert sum(f.n_test for f in r.folds) == small.M
    assert all(0.0 <= f.test_error <= 1.0 for f in r.folds)
    assert r.error_std >= 0
    d = json.loads(r.to_json())
    assert d["mode"] == mode and d["method"] == method
    assert "seconds" not in d["folds"][0]
    assert "seconds" in json.loads(r.to_json(timings=True))["folds"][0]
    again = cross_validate(small, method, grid, seed=4, mode=mode, jobs=3)
    assert again.to_json() == r.to_json()


def test_numerosity_and_series_normalization_options(small):
    grid = [MethodConfig("bsax", n=40, alpha=4, word_len=4)]
    r = cross_validate(small, "bsax", grid, seed=0, numerosity_reduction=True)
    assert r.options["numerosity_reduction"] is True
    ev = Evaluator(small, numerosity_reduction=True)
    assert (ev.histogram(grid[0]).counts.sum(axis=1) < small.N - 40).all()
    r = cross_validate(small, "enn", seed=0, znormalize_series=True)
    assert r.options["znormalize_series"] is True


def test_population_std_of_fold_errors():
    # one mistake in two of five 50-instance folds: mean 0.0080, population std 0.0098
    r = CvReport("bsax", "transductive", "5-fold", 0, {}, {})
    for i, e in enumerate([0.02, 0.02, 0.0, 0.0, 0.0]):
        r.folds.append(FoldResult(i, 150, 50, 50, {}, 0.0, e))
    assert r.error_mean == pytest.approx(0.008)
    assert round(r.error_std, 4) == 0.0098


def test_classification_needs_two_labels():
    ds = SeriesDataset.from_arrays(np.random.default_rng(0).normal(size=(10, 50)), [0] * 10)
    with pytest.raises(DatasetError):
        cross_validate(ds, "enn")


def test_holdout(small):
    train = small.subset(range(14))
    test = small.subset(range(14, 20))
    grid = [MethodConfig("sympol", n=40, alpha=4, degree=d) for d in (1, 3)]
    r = holdout_evaluate(train, test, "sympol", grid, seed=0)
    assert r.protocol == "holdout" and len(r.folds) == 1
    assert r.folds[0].n_test == 6
    fixed = holdout_evaluate(train, test, "sympol", grid[:1])
    assert fixed.folds[0].validation_error is None
