"""Machine prediction over design-choice configurations.

CART trees (equality splits for categorical features, threshold splits for
numeric ones), bootstrap random forests with normalized impurity-decrease
feature importances, and two baselines: gradient-descent logistic
regression and Bernoulli naive Bayes with add-one smoothing.

All fits are deterministic per seed; per-tree randomness derives from
``(seed, tree_index)`` so trees could be built in parallel without
changing the result.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import _kernels

MODEL_FORMAT = "ventureval-model"
MODEL_FORMAT_VERSION = 1

FeatureKind = Literal["categorical", "numeric"]


class LearnError(ValueError):
    pass


@dataclass
class LabeledDataset:
    """Feature matrix with binary labels.

    ``feature_kinds`` marks each column categorical (equality splits;
    values must be small non-negative integers) or numeric (threshold
    splits). One-hot bit rows and component-membership rows are both
    categorical; criterion-mean rows are numeric.
    """

    x: np.ndarray  # n x m, float64
    y: np.ndarray  # n, int8 in {0,1}
    feature_names: list[str]
    feature_kinds: list[FeatureKind] = field(default_factory=list)
    ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.int8)
        if self.x.ndim != 2:
            raise LearnError("x must be 2-dimensional")
        n, m = self.x.shape
        if m == 0:
            raise LearnError("dataset has no features")
        if self.y.shape != (n,):
            raise LearnError("y length must match x rows")
        if not np.isin(self.y, (0, 1)).all():
            raise LearnError("labels must be binary")
        if len(self.feature_names) != m:
            raise LearnError("feature_names length must match x columns")
        if not self.feature_kinds:
            self.feature_kinds = ["categorical"] * m
        if len(self.feature_kinds) != m:
            raise LearnError("feature_kinds length must match x columns")
        if not self.ids:
            self.ids = [str(i) for i in range(n)]
        cat = [j for j, k in enumerate(self.feature_kinds) if k == "categorical"]
        if cat:
            sub = self.x[:, cat]
            if (sub < 0).any() or (sub != np.round(sub)).any():
                raise LearnError(
                    "categorical features must be non-negative integers"
                )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def width(self) -> int:
        return self.x.shape[1]

    def subset(self, idx: Sequence[int]) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(
            x=self.x[idx],
            y=self.y[idx],
            feature_names=self.feature_names,
            feature_kinds=self.feature_kinds,
            ids=[self.ids[i] for i in idx],
        )


def gini_impurity(labels: Sequence[int]) -> float:
    """1 - sum of squared class frequencies."""
    arr = np.asarray(labels)
    if arr.size == 0:
        raise LearnError("gini of empty label set is undefined")
    n1 = float((arr == 1).sum())
    n0 = float(arr.size - n1)
    p0 = n0 / arr.size
    p1 = n1 / arr.size
    return 1.0 - p0 * p0 - p1 * p1


@dataclass
class TreeNode:
    n_samples: int
    counts: tuple[int, int]  # (negatives, positives)
    impurity: float
    # internal nodes only:
    feature: int | None = None
    kind: str = "leaf"  # leaf | categorical | numeric
    value: float = 0.0  # matched category or threshold
    decrease: float = 0.0  # weighted impurity decrease at this node
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def proba(self) -> float:
        return self.counts[1] / self.n_samples


@dataclass
class Tree:
    root: TreeNode
    width: int
    feature_kinds: list[FeatureKind]
    max_depth: int | None
    min_leaf: int

    @property
    def depth(self) -> int:
        def d(node):
            if node.kind == "leaf":
                return 0
            return 1 + max(d(node.left), d(node.right))

        return d(self.root)


@dataclass
class Forest:
    trees: list[Tree]
    n_trees: int
    seed: int
    width: int
    feature_subsample: int
    bootstrap_indices: list[np.ndarray]
    feature_names: list[str]


@dataclass
class Baseline:
    kind: str  # logistic | naive_bayes
    width: int
    weights: np.ndarray | None = None  # logistic
    bias: float = 0.0
    log_prior: np.ndarray | None = None  # naive bayes, per class
    log_like1: np.ndarray | None = None  # log P(f=1 | class), per class x feature
    log_like0: np.ndarray | None = None


@dataclass(frozen=True)
class ImportanceVector:
    weights: dict[str, float]
    degenerate: bool  # no split anywhere in the forest


# -- CART ---------------------------------------------------------------------


def _best_numeric_split(x, y, rows, feats):
    """Threshold-split twin of the categorical kernel: midpoints between
    consecutive distinct values, first strict minimum wins."""
    yr = y[rows].astype(np.int64)
    n = rows.shape[0]
    n1 = int(yr.sum())
    n0 = n - n1
    best = None
    for f in feats:
        col = x[rows, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        sy = yr[order]
        cum1 = np.cumsum(sy)
        boundaries = np.nonzero(sv[1:] != sv[:-1])[0]  # split after index b
        if boundaries.size == 0:
            continue
        nl = (boundaries + 1).astype(np.float64)
        l1 = cum1[boundaries].astype(np.float64)
        l0 = nl - l1
        nr_ = n - nl
        r1 = n1 - l1
        r0 = n0 - l0
        pl0 = l0 / nl
        pl1 = l1 / nl
        gl = 1.0 - pl0 * pl0 - pl1 * pl1
        pr0 = r0 / nr_
        pr1 = r1 / nr_
        gr = 1.0 - pr0 * pr0 - pr1 * pr1
        wg = (nl * gl + nr_ * gr) / n
        i = int(np.argmin(wg))
        if best is None or wg[i] < best[2]:
            thr = (sv[boundaries[i]] + sv[boundaries[i] + 1]) / 2.0
            best = (int(f), float(thr), float(wg[i]), int(nl[i]))
    return best


def _node_impurity(y, rows) -> float:
    n = rows.shape[0]
    n1 = float(y[rows].sum())
    n0 = float(n) - n1
    p0 = n0 / n
    p1 = n1 / n
    return 1.0 - p0 * p0 - p1 * p1


def _grow(
    x: np.ndarray,
    xc: np.ndarray | None,
    y: np.ndarray,
    rows: np.ndarray,
    kinds: list[FeatureKind],
    depth: int,
    max_depth: int | None,
    min_leaf: int,
    n_root: int,
    rng: np.random.Generator | None,
    subsample: int | None,
) -> TreeNode:
    n = rows.shape[0]
    n1 = int(y[rows].sum())
    node = TreeNode(
        n_samples=n, counts=(n - n1, n1), impurity=_node_impurity(y, rows)
    )
    if (
        node.impurity == 0.0
        or n < 2 * min_leaf
        or (max_depth is not None and depth >= max_depth)
    ):
        return node

    m = x.shape[1]
    if rng is not None and subsample is not None and subsample < m:
        feats = np.sort(rng.choice(m, size=subsample, replace=False))
    else:
        feats = np.arange(m)
    cat_feats = np.array(
        [f for f in feats if kinds[f] == "categorical"], dtype=np.int64
    )
    num_feats = np.array(
        [f for f in feats if kinds[f] == "numeric"], dtype=np.int64
    )
    candidates = []
    if cat_feats.size:
        got = _kernels.best_categorical_split(xc, y, rows, cat_feats)
        if got is not None:
            candidates.append(("categorical", got))
    if num_feats.size:
        got = _best_numeric_split(x, y, rows, num_feats)
        if got is not None:
            candidates.append(("numeric", got))
    if not candidates:
        return node
    kind, (f, v, wg, _nl) = min(candidates, key=lambda c: c[1][2])

    decrease = node.impurity - wg
    if decrease <= 0.0:
        return node
    col = x[rows, f]
    mask = (col == v) if kind == "categorical" else (col <= v)
    left_rows = rows[mask]
    right_rows = rows[~mask]
    if left_rows.size < min_leaf or right_rows.size < min_leaf:
        return node
    node.kind = kind
    node.feature = int(f)
    node.value = float(v)
    node.decrease = (n / n_root) * decrease
    node.left = _grow(
        x, xc, y, left_rows, kinds, depth + 1, max_depth, min_leaf, n_root, rng, subsample
    )
    node.right = _grow(
        x, xc, y, right_rows, kinds, depth + 1, max_depth, min_leaf, n_root, rng, subsample
    )
    return node


def _categorical_codes(ds: LabeledDataset) -> np.ndarray:
    """int32 view of the matrix for the equality-split kernel; numeric
    columns are zeroed (never consulted there)."""
    xc = np.zeros(ds.x.shape, dtype=np.int32)
    for j, kind in enumerate(ds.feature_kinds):
        if kind == "categorical":
            xc[:, j] = ds.x[:, j].astype(np.int32)
    return np.ascontiguousarray(xc)


def cart_fit(
    ds: LabeledDataset,
    *,
    max_depth: int | None = None,
    min_leaf: int = 1,
) -> Tree:
    """Greedy best-first CART on the whole feature set."""
    if ds.n < 2:
        raise LearnError("need at least 2 rows")
    if min_leaf < 1:
        raise LearnError("min_leaf must be >= 1")
    xc = _categorical_codes(ds)
    rows = np.arange(ds.n, dtype=np.int64)
    root = _grow(
        ds.x, xc, ds.y, rows, ds.feature_kinds, 0, max_depth, min_leaf, ds.n, None, None
    )
    return Tree(
        root=root,
        width=ds.width,
        feature_kinds=list(ds.feature_kinds),
        max_depth=max_depth,
        min_leaf=min_leaf,
    )


def forest_fit(
    ds: LabeledDataset,
    n_trees: int = 1000,
    *,
    seed: int = 0,
    feature_subsample: int | None = None,
    max_depth: int | None = None,
    min_leaf: int = 1,
) -> Forest:
    """Bootstrap ensemble of CARTs with per-split feature subsampling."""
    if ds.n < 2:
        raise LearnError("need at least 2 rows")
    if len(np.unique(ds.y)) < 2:
        raise LearnError("need both classes to train a forest")
    if n_trees < 1:
        raise LearnError("n_trees must be >= 1")
    if feature_subsample is None:
        feature_subsample = int(math.ceil(math.sqrt(ds.width)))
    xc = _categorical_codes(ds)
    trees = []
    boots = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, ds.n, size=ds.n)
        boots.append(boot)
        rows = np.asarray(boot, dtype=np.int64)
        root = _grow(
            ds.x,
            xc,
            ds.y,
            rows,
            ds.feature_kinds,
            0,
            max_depth,
            min_leaf,
            rows.shape[0],
            rng,
            feature_subsample,
        )
        trees.append(
            Tree(
                root=root,
                width=ds.width,
                feature_kinds=list(ds.feature_kinds),
                max_depth=max_depth,
                min_leaf=min_leaf,
            )
        )
    return Forest(
        trees=trees,
        n_trees=n_trees,
        seed=seed,
        width=ds.width,
        feature_subsample=feature_subsample,
        bootstrap_indices=boots,
        feature_names=list(ds.feature_names),
    )


# -- prediction ---------------------------------------------------------------


def _tree_proba(tree: Tree, row: np.ndarray) -> float:
    node = tree.root
    while node.kind != "leaf":
        v = row[node.feature]
        go_left = (v == node.value) if node.kind == "categorical" else (v <= node.value)
        node = node.left if go_left else node.right
    return node.proba


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def predict_proba(model, row: Sequence[float]) -> float:
    """Probability of the positive class for one feature row."""
    r = np.asarray(row, dtype=np.float64)
    width = model.width
    if r.shape != (width,):
        raise LearnError(f"row width {r.shape} does not match model width {width}")
    if isinstance(model, Tree):
        return _tree_proba(model, r)
    if isinstance(model, Forest):
        return float(np.mean([_tree_proba(t, r) for t in model.trees]))
    if isinstance(model, Baseline):
        if model.kind == "logistic":
            return float(_sigmoid(model.weights @ r + model.bias))
        log_post = model.log_prior + np.where(
            r == 1.0, model.log_like1, model.log_like0
        ).sum(axis=1)
        log_post = log_post - log_post.max()
        post = np.exp(log_post)
        return float(post[1] / post.sum())
    raise LearnError(f"unknown model type {type(model)!r}")


def predict_proba_batch(model, rows: np.ndarray) -> np.ndarray:
    return np.array([predict_proba(model, r) for r in np.asarray(rows, dtype=np.float64)])


def oob_accuracy(forest: Forest, ds: LabeledDataset, threshold: float = 0.5) -> float:
    """Out-of-bag accuracy from the stored bootstrap indices."""
    n = ds.n
    votes = np.zeros(n)
    counts = np.zeros(n)
    for tree, boot in zip(forest.trees, forest.bootstrap_indices):
        oob = np.setdiff1d(np.arange(n), boot, assume_unique=False)
        for i in oob:
            votes[i] += _tree_proba(tree, ds.x[i])
            counts[i] += 1
    seen = counts > 0
    if not seen.any():
        raise LearnError("no out-of-bag rows; use more trees")
    pred = (votes[seen] / counts[seen]) >= threshold
    return float((pred == (ds.y[seen] == 1)).mean())


def feature_importance(forest: Forest) -> ImportanceVector:
    """Per-feature total weighted impurity decrease, averaged over trees
    and normalized to sum 1. All-zero (no split anywhere) is flagged."""
    m = forest.width
    total = np.zeros(m)

    def walk(node):
        if node.kind == "leaf":
            return
        total[node.feature] += node.decrease
        walk(node.left)
        walk(node.right)

    for tree in forest.trees:
        walk(tree.root)
    total /= forest.n_trees
    s = total.sum()
    degenerate = s <= 0.0
    if not degenerate:
        total = total / s
    return ImportanceVector(
        weights={name: float(w) for name, w in zip(forest.feature_names, total)},
        degenerate=degenerate,
    )


# -- baselines ----------------------------------------------------------------


def logistic_nll_grad(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float = 0.0
) -> tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood and its gradient (weights, bias)."""
    z = x @ weights + bias
    p = _sigmoid(z)
    eps = 1e-12
    nll = float(
        -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
        + 0.5 * l2 * float(weights @ weights)
    )
    diff = p - y
    grad_w = x.T @ diff / x.shape[0] + l2 * weights
    grad_b = float(diff.mean())
    return nll, grad_w, grad_b


def fit_baseline(
    kind: str,
    ds: LabeledDataset,
    *,
    lr: float = 0.5,
    iters: int = 800,
    l2: float = 0.0,
) -> Baseline:
    if len(np.unique(ds.y)) < 2:
        raise LearnError("need both classes to train a baseline")
    if kind == "logistic":
        w = np.zeros(ds.width)
        b = 0.0
        yf = ds.y.astype(np.float64)
        for _ in range(iters):
            _, gw, gb = logistic_nll_grad(w, b, ds.x, yf, l2)
            w -= lr * gw
            b -= lr * gb
        return Baseline(kind="logistic", width=ds.width, weights=w, bias=b)
    if kind == "naive_bayes":
        if not np.isin(ds.x, (0.0, 1.0)).all():
            raise LearnError("naive_bayes requires binary features")
        log_prior = np.zeros(2)
        log_like1 = np.zeros((2, ds.width))
        for c in (0, 1):
            rows = ds.x[ds.y == c]
            log_prior[c] = math.log(rows.shape[0] / ds.n)
            like1 = (rows.sum(axis=0) + 1.0) / (rows.shape[0] + 2.0)
            log_like1[c] = np.log(like1)
        log_like0 = np.log1p(-np.exp(log_like1))
        return Baseline(
            kind="naive_bayes",
            width=ds.width,
            log_prior=log_prior,
            log_like1=log_like1,
            log_like0=log_like0,
        )
    raise LearnError(f"unknown baseline kind {kind!r}")


# -- serialization ------------------------------------------------------------


def _node_to_dict(node: TreeNode) -> dict:
    d = {
        "n": node.n_samples,
        "counts": list(node.counts),
        "impurity": node.impurity,
        "kind": node.kind,
    }
    if node.kind != "leaf":
        d.update(
            feature=node.feature,
            value=node.value,
            decrease=node.decrease,
            left=_node_to_dict(node.left),
            right=_node_to_dict(node.right),
        )
    return d


def _node_from_dict(d: dict) -> TreeNode:
    node = TreeNode(
        n_samples=d["n"],
        counts=tuple(d["counts"]),
        impurity=d["impurity"],
        kind=d["kind"],
    )
    if node.kind != "leaf":
        node.feature = d["feature"]
        node.value = d["value"]
        node.decrease = d["decrease"]
        node.left = _node_from_dict(d["left"])
        node.right = _node_from_dict(d["right"])
    return node


def model_to_dict(model) -> dict:
    base = {"format": MODEL_FORMAT, "format_version": MODEL_FORMAT_VERSION}
    if isinstance(model, Tree):
        return {
            **base,
            "kind": "tree",
            "width": model.width,
            "feature_kinds": model.feature_kinds,
            "max_depth": model.max_depth,
            "min_leaf": model.min_leaf,
            "root": _node_to_dict(model.root),
        }
    if isinstance(model, Forest):
        return {
            **base,
            "kind": "forest",
            "width": model.width,
            "n_trees": model.n_trees,
            "seed": model.seed,
            "feature_subsample": model.feature_subsample,
            "feature_names": model.feature_names,
            "feature_kinds": model.trees[0].feature_kinds,
            "trees": [_node_to_dict(t.root) for t in model.trees],
            "bootstrap_indices": [b.tolist() for b in model.bootstrap_indices],
        }
    if isinstance(model, Baseline):
        return {
            **base,
            "kind": f"baseline:{model.kind}",
            "width": model.width,
            "weights": None if model.weights is None else model.weights.tolist(),
            "bias": model.bias,
            "log_prior": None if model.log_prior is None else model.log_prior.tolist(),
            "log_like1": None if model.log_like1 is None else model.log_like1.tolist(),
            "log_like0": None if model.log_like0 is None else model.log_like0.tolist(),
        }
    raise LearnError(f"cannot serialize {type(model)!r}")


def model_from_dict(d: dict):
    if d.get("format") != MODEL_FORMAT:
        raise LearnError("not a model document")
    if d.get("format_version") != MODEL_FORMAT_VERSION:
        raise LearnError(f"unsupported model format version {d.get('format_version')}")
    kind = d["kind"]
    if kind == "tree":
        return Tree(
            root=_node_from_dict(d["root"]),
            width=d["width"],
            feature_kinds=list(d["feature_kinds"]),
            max_depth=d["max_depth"],
            min_leaf=d["min_leaf"],
        )
    if kind == "forest":
        kinds = list(d["feature_kinds"])
        trees = [
            Tree(
                root=_node_from_dict(r),
                width=d["width"],
                feature_kinds=kinds,
                max_depth=None,
                min_leaf=1,
            )
            for r in d["trees"]
        ]
        return Forest(
            trees=trees,
            n_trees=d["n_trees"],
            seed=d["seed"],
            width=d["width"],
            feature_subsample=d["feature_subsample"],
            bootstrap_indices=[np.asarray(b) for b in d["bootstrap_indices"]],
            feature_names=list(d["feature_names"]),
        )
    if kind.startswith("baseline:"):
        return Baseline(
            kind=kind.split(":", 1)[1],
            width=d["width"],
            weights=None if d["weights"] is None else np.asarray(d["weights"]),
            bias=d["bias"],
            log_prior=None if d["log_prior"] is None else np.asarray(d["log_prior"]),
            log_like1=None if d["log_like1"] is None else np.asarray(d["log_like1"]),
            log_like0=None if d["log_like0"] is None else np.asarray(d["log_like0"]),
        )
    raise LearnError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path: str | Path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
