import itertools

import numpy as np
import pytest

from ventureval import learn
from ventureval.learn import (
    LabeledDataset,
    cart_fit,
    feature_importance,
    fit_baseline,
    forest_fit,
    gini_impurity,
    logistic_nll_grad,
    oob_accuracy,
    predict_proba,
)


def dataset(x, y, kinds=None):
    x = np.asarray(x, dtype=np.float64)
    return LabeledDataset(
        x=x,
        y=np.asarray(y, dtype=np.int8),
        feature_names=[f"f{i}" for i in range(x.shape[1])],
        feature_kinds=kinds or ["categorical"] * x.shape[1],
    )


def test_gini_cases():
    assert gini_impurity([1, 1, 1, 1]) == 0.0
    assert gini_impurity([1, 1, 0, 0]) == pytest.approx(0.5)
    assert gini_impurity([1, 0, 0, 0]) == pytest.approx(0.375)
    with pytest.raises(learn.LearnError):
        gini_impurity([])


# -- exhaustive split-search oracle ------------------------------------------


def oracle_best_partition_predictions(ds, max_depth):
    """Brute-force CART twin for depth <= 2: enumerate every (feature,
    split) at each node and take the minimum weighted impurity, breaking
    ties like the implementation (feature order, value ascending)."""

    def node_predict(rows):
        y = ds.y[rows]
        return float(y.sum() / len(rows))

    def best_split(rows):
        y = ds.y[rows]
        n = len(rows)
        parent = gini_impurity(y)
        best = None
        for f in range(ds.width):
            kind = ds.feature_kinds[f]
            col = ds.x[rows, f]
            if kind == "categorical":
                candidates = [("categorical", v) for v in np.unique(col)]
            else:
                sv = np.unique(col)
                candidates = [
                    ("numeric", (a + b) / 2.0) for a, b in zip(sv, sv[1:])
                ]
            for kind_c, v in candidates:
                mask = (col == v) if kind_c == "categorical" else (col <= v)
                if mask.all() or not mask.any():
                    continue
                nl, nr = int(mask.sum()), int((~mask).sum())
                wg = (
                    nl * gini_impurity(y[mask]) + nr * gini_impurity(y[~mask])
                ) / n
                if best is None or wg < best[0]:
                    best = (wg, kind_c, f, v)
        if best is None or parent - best[0] <= 0:
            return None
        return best

    def predict(row, rows, depth):
        if depth >= max_depth or gini_impurity(ds.y[rows]) == 0.0:
            return node_predict(rows)
        got = best_split(rows)
        if got is None:
            return node_predict(rows)
        _, kind, f, v = got
        col = ds.x[rows, f]
        mask = (col == v) if kind == "categorical" else (col <= v)
        left, right = rows[mask], rows[~mask]
        go_left = (row[f] == v) if kind == "categorical" else (row[f] <= v)
        return predict(row, left if go_left else right, depth + 1)

    all_rows = np.arange(ds.n)
    return [predict(ds.x[i], all_rows, 0) for i in range(ds.n)]


def test_cart_separable_depth_one():
    x = [[0, 1], [0, 0], [1, 1], [1, 0]]
    y = [0, 0, 1, 1]
    tree = cart_fit(dataset(x, y))
    assert tree.depth == 1
    assert tree.root.feature == 0
    preds = [predict_proba(tree, row) for row in np.asarray(x, dtype=float)]
    assert preds == [0.0, 0.0, 1.0, 1.0]


def test_cart_pure_labels_single_leaf():
    tree = cart_fit(dataset([[0], [1], [0]], [1, 1, 1]))
    assert tree.root.kind == "leaf"
    assert predict_proba(tree, [0.0]) == 1.0


def test_cart_matches_exhaustive_oracle():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = 8
        x = rng.integers(0, 2, size=(n, 4)).astype(np.float64)
        y = rng.integers(0, 2, size=n).astype(np.int8)
        if len(np.unique(y)) < 2:
            continue
        ds = dataset(x, y)
        tree = cart_fit(ds, max_depth=2)
        got = [predict_proba(tree, row) for row in x]
        want = oracle_best_partition_predictions(ds, max_depth=2)
        assert got == pytest.approx(want)


def test_cart_numeric_matches_oracle():
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        n = 10
        x = rng.normal(size=(n, 3))
        y = (x[:, 0] + 0.3 * rng.normal(size=n) > 0).astype(np.int8)
        if len(np.unique(y)) < 2:
            continue
        ds = dataset(x, y, kinds=["numeric"] * 3)
        tree = cart_fit(ds, max_depth=2)
        got = [predict_proba(tree, row) for row in x]
        want = oracle_best_partition_predictions(ds, max_depth=2)
        assert got == pytest.approx(want)


def test_cart_split_strictly_decreases_impurity():
    rng = np.random.default_rng(3)
    x = rng.integers(0, 3, size=(60, 6)).astype(np.float64)
    y = rng.integers(0, 2, size=60).astype(np.int8)
    tree = cart_fit(dataset(x, y))

    def walk(node):
        if node.kind == "leaf":
            return
        assert node.decrease > 0.0
        walk(node.left)
        walk(node.right)

    walk(tree.root)


def test_width_zero_rejected():
    with pytest.raises(learn.LearnError):
        dataset(np.zeros((4, 0)), [0, 1, 0, 1])


def test_forest_separable_oob():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, size=(60, 10)).astype(np.float64)
    y = x[:, 2].astype(np.int8)  # perfectly separable on f2
    forest = forest_fit(dataset(x, y), n_trees=60, seed=1)
    assert oob_accuracy(forest, dataset(x, y)) >= 0.95


def test_forest_single_tree_is_bagged_cart():
    rng = np.random.default_rng(1)
    x = rng.integers(0, 2, size=(20, 4)).astype(np.float64)
    y = (x[:, 0] == 1).astype(np.int8)
    forest = forest_fit(dataset(x, y), n_trees=1, seed=0)
    assert len(forest.trees) == 1
    p = predict_proba(forest, x[0])
    assert p == predict_proba(forest.trees[0], x[0])


def test_forest_determinism():
    rng = np.random.default_rng(2)
    x = rng.integers(0, 2, size=(30, 6)).astype(np.float64)
    y = rng.integers(0, 2, size=30).astype(np.int8)
    if len(np.unique(y)) < 2:
        y[0] = 1 - y[0]
    a = forest_fit(dataset(x, y), n_trees=25, seed=7)
    b = forest_fit(dataset(x, y), n_trees=25, seed=7)
    pa = [predict_proba(a, row) for row in x]
    pb = [predict_proba(b, row) for row in x]
    assert pa == pb
    assert all(np.array_equal(i, j) for i, j in zip(a.bootstrap_indices, b.bootstrap_indices))


def test_forest_single_class_rejected():
    x = np.zeros((10, 3))
    with pytest.raises(learn.LearnError):
        forest_fit(dataset(x, [1] * 10), n_trees=5)


def test_forest_default_n_trees_is_1000():
    import inspect

    sig = inspect.signature(forest_fit)
    assert sig.parameters["n_trees"].default == 1000


def test_predict_width_mismatch():
    tree = cart_fit(dataset([[0, 1], [1, 0]], [0, 1]))
    with pytest.raises(learn.LearnError):
        predict_proba(tree, [0.0])


def test_predict_leaf_probability():
    # leaf with 3 positives / 1 negative -> 0.75
    node = learn.TreeNode(n_samples=4, counts=(1, 3), impurity=0.375)
    tree = learn.Tree(
        root=node, width=1, feature_kinds=["categorical"], max_depth=None, min_leaf=1
    )
    assert predict_proba(tree, [0.0]) == 0.75


def test_forest_mean_of_trees():
    n1 = learn.TreeNode(n_samples=10, counts=(1, 9), impurity=0.18)
    n2 = learn.TreeNode(n_samples=10, counts=(4, 6), impurity=0.48)
    trees = [
        learn.Tree(root=n, width=2, feature_kinds=["categorical"] * 2, max_depth=None, min_leaf=1)
        for n in (n1, n2)
    ]
    forest = learn.Forest(
        trees=trees,
        n_trees=2,
        seed=0,
        width=2,
        feature_subsample=1,
        bootstrap_indices=[np.array([0]), np.array([0])],
        feature_names=["a", "b"],
    )
    assert predict_proba(forest, [0.0, 0.0]) == pytest.approx(0.75)


def test_importance_constant_feature_zero_and_sums_to_one():
    rng = np.random.default_rng(4)
    x = rng.integers(0, 2, size=(50, 5)).astype(np.float64)
    x[:, 3] = 1.0  # constant
    y = x[:, 1].astype(np.int8)
    forest = forest_fit(dataset(x, y), n_trees=40, seed=2)
    imp = feature_importance(forest)
    assert not imp.degenerate
    assert imp.weights["f3"] == 0.0
    assert sum(imp.weights.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(w >= 0 for w in imp.weights.values())


def test_importance_planted_signal_ranks_first():
    rng = np.random.default_rng(5)
    x = rng.integers(0, 2, size=(80, 8)).astype(np.float64)
    y = x[:, 4].astype(np.int8)
    flip = rng.random(80) < 0.05
    y[flip] = 1 - y[flip]
    forest = forest_fit(dataset(x, y), n_trees=80, seed=3)
    imp = feature_importance(forest)
    assert max(imp.weights, key=imp.weights.get) == "f4"


def test_importance_degenerate_forest_flagged():
    x = np.ones((6, 2))
    y = np.array([0, 1, 0, 1, 0, 1], dtype=np.int8)
    forest = forest_fit(dataset(x, y), n_trees=5, seed=0)
    imp = feature_importance(forest)
    assert imp.degenerate
    assert all(w == 0 for w in imp.weights.values())


def test_logistic_zero_weights_half():
    model = learn.Baseline(kind="logistic", width=3, weights=np.zeros(3), bias=0.0)
    assert predict_proba(model, [1.0, 0.0, 1.0]) == 0.5


def test_logistic_gradient_matches_finite_differences():
    rng = np.random.default_rng(6)
    x = rng.integers(0, 2, size=(30, 5)).astype(np.float64)
    y = rng.integers(0, 2, size=30).astype(np.float64)
    h = 1e-6
    for trial in range(20):
        w = rng.normal(size=5)
        b = float(rng.normal())
        _, gw, gb = logistic_nll_grad(w, b, x, y)
        fd = np.zeros(5)
        for j in range(5):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            fd[j] = (
                logistic_nll_grad(wp, b, x, y)[0]
                - logistic_nll_grad(wm, b, x, y)[0]
            ) / (2 * h)
        fdb = (
            logistic_nll_grad(w, b + h, x, y)[0]
            - logistic_nll_grad(w, b - h, x, y)[0]
        ) / (2 * h)
        rel = np.abs(gw - fd) / np.maximum(np.abs(fd), 1e-8)
        assert rel.max() < 1e-5
        assert abs(gb - fdb) / max(abs(fdb), 1e-8) < 1e-5


def test_logistic_learns_separable():
    rng = np.random.default_rng(7)
    x = rng.integers(0, 2, size=(40, 4)).astype(np.float64)
    y = x[:, 1].astype(np.int8)
    model = fit_baseline("logistic", dataset(x, y))
    preds = [predict_proba(model, row) >= 0.5 for row in x]
    assert np.mean(np.asarray(preds) == (y == 1)) >= 0.95


def test_naive_bayes_likelihood_ordering():
    # f0=1 occurs only with label 1
    x = np.array([[1, 0], [1, 1], [0, 1], [0, 0], [1, 0], [0, 1]], dtype=float)
    y = np.array([1, 1, 0, 0, 1, 0], dtype=np.int8)
    model = fit_baseline("naive_bayes", dataset(x, y))
    p_f1 = predict_proba(model, [1.0, 0.0])
    p_f0 = predict_proba(model, [0.0, 0.0])
    assert p_f1 > p_f0


def test_naive_bayes_rejects_nonbinary():
    x = np.array([[2, 0], [1, 1]], dtype=float)
    with pytest.raises(learn.LearnError):
        fit_baseline("naive_bayes", dataset(x, [0, 1]))


def test_baseline_single_class_rejected():
    x = np.array([[1, 0], [0, 1]], dtype=float)
    with pytest.raises(learn.LearnError):
        fit_baseline("logistic", dataset(x, [1, 1]))


def test_probability_bounds_many_models():
    rng = np.random.default_rng(8)
    x = rng.integers(0, 2, size=(30, 6)).astype(np.float64)
    y = rng.integers(0, 2, size=30).astype(np.int8)
    y[0], y[1] = 0, 1
    ds = dataset(x, y)
    models = [
        cart_fit(ds),
        forest_fit(ds, n_trees=10, seed=0),
        fit_baseline("logistic", ds),
        fit_baseline("naive_bayes", ds),
    ]
    for model in models:
        for row in x:
            assert 0.0 <= predict_proba(model, row) <= 1.0


def test_model_serialization_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    x = rng.integers(0, 2, size=(25, 5)).astype(np.float64)
    y = rng.integers(0, 2, size=25).astype(np.int8)
    y[0], y[1] = 0, 1
    ds = dataset(x, y)
    for model in (
        cart_fit(ds, max_depth=3),
        forest_fit(ds, n_trees=8, seed=4),
        fit_baseline("logistic", ds),
        fit_baseline("naive_bayes", ds),
    ):
        path = tmp_path / "model.json"
        learn.save_model(model, path)
        back = learn.load_model(path)
        for row in x:
            assert predict_proba(back, row) == pytest.approx(
                predict_proba(model, row), abs=1e-12
            )
