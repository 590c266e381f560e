"""Hybrid prediction core: scoring, weighting, and fusion.

Machine predictors are refit per cross-validation fold; crowd predictors
are fixed per-venture probabilities (human judgments are not retrained)
and are simply scored on each test fold. Per-predictor mean MCC drives
the performance-weighting schemes; fused predictions are weight-averaged
probabilities.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .learn import LabeledDataset, predict_proba

SCHEMES = ("unweighted", "machine_perf", "crowd_perf", "hybrid_perf")


class FuseError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise FuseError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def mcc_with_flag(c: ConfusionMatrix) -> tuple[float, bool]:
    """Matthews correlation; zero-denominator cases are (0.0, True)."""
    denom = (
        (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    )
    if denom == 0:
        return 0.0, True
    num = c.tp * c.tn - c.fp * c.fn
    return num / math.sqrt(denom), False


def mcc(c: ConfusionMatrix) -> float:
    return mcc_with_flag(c)[0]


def confusion_from_predictions(
    y_true: Sequence[int], proba: Sequence[float], threshold: float = 0.5
) -> ConfusionMatrix:
    yt = np.asarray(y_true)
    yp = np.asarray(proba) >= threshold
    return ConfusionMatrix(
        tp=int(((yt == 1) & yp).sum()),
        tn=int(((yt == 0) & ~yp).sum()),
        fp=int(((yt == 0) & yp).sum()),
        fn=int(((yt == 1) & ~yp).sum()),
    )


def kfold_split(labels: Sequence[int], k: int = 10, seed: int = 0) -> list[np.ndarray]:
    """Stratified k folds: disjoint, covering, sizes differing by <= 1.

    Within each class, indices are shuffled (seeded) and dealt round-robin;
    the dealing offset rotates between classes so overall fold sizes stay
    balanced.
    """
    y = np.asarray(labels)
    n = y.shape[0]
    if n < k:
        raise FuseError(f"cannot split {n} rows into {k} folds")
    if k < 2:
        raise FuseError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for cls in np.unique(y):
        idx = np.nonzero(y == cls)[0]
        idx = idx[rng.permutation(idx.shape[0])]
        for i, row in enumerate(idx):
            folds[(offset + i) % k].append(int(row))
        offset = (offset + idx.shape[0]) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


@dataclass(frozen=True)
class PerfEntry:
    name: str
    kind: str  # machine | crowd | scheme
    fold_mcc: tuple[float, ...]
    degenerate_folds: int

    @property
    def mean(self) -> float:
        return float(np.mean(self.fold_mcc))

    @property
    def sd(self) -> float:
        if len(self.fold_mcc) < 2:
            return 0.0
        return float(np.std(self.fold_mcc, ddof=1))


@dataclass(frozen=True)
class PerformanceTable:
    entries: tuple[PerfEntry, ...]
    k: int
    seed: int
    threshold: float

    def entry(self, name: str) -> PerfEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def predictor_entries(self) -> list[PerfEntry]:
        return [e for e in self.entries if e.kind in ("machine", "crowd")]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "kind", "mean_mcc", "sd_mcc", "degenerate_folds", "fold_mcc"])
        for e in self.entries:
            w.writerow(
                [
                    e.name,
                    e.kind,
                    f"{e.mean:.6f}",
                    f"{e.sd:.6f}",
                    e.degenerate_folds,
                    "|".join(f"{v:.6f}" for v in e.fold_mcc),
                ]
            )
        return buf.getvalue()


@dataclass(frozen=True)
class HybridWeights:
    scheme: str
    weights: dict[str, float]


def weights_from_performance(pt: PerformanceTable, scheme: str) -> HybridWeights:
    """Clamp-and-normalize mean MCC into fusion weights.

    ``unweighted`` admits every predictor uniformly; ``machine_perf`` /
    ``crowd_perf`` admit only that kind; ``hybrid_perf`` admits all.
    Negative means clamp to 0; if everything clamps, fall back to uniform.
    """
    if scheme not in SCHEMES:
        raise FuseError(f"unknown scheme {scheme!r}")
    predictors = pt.predictor_entries()
    if scheme == "machine_perf":
        admitted = [e for e in predictors if e.kind == "machine"]
    elif scheme == "crowd_perf":
        admitted = [e for e in predictors if e.kind == "crowd"]
    else:
        admitted = predictors
    if not admitted:
        raise FuseError(f"no predictors admitted under scheme {scheme!r}")
    if scheme == "unweighted":
        w = 1.0 / len(admitted)
        return HybridWeights(scheme=scheme, weights={e.name: w for e in admitted})
    raw = {e.name: max(0.0, e.mean) for e in admitted}
    total = sum(raw.values())
    if total <= 0.0:
        w = 1.0 / len(admitted)
        return HybridWeights(scheme=scheme, weights={e.name: w for e in admitted})
    return HybridWeights(
        scheme=scheme, weights={name: v / total for name, v in raw.items()}
    )


def hybrid_predict(probs: dict[str, float], w: HybridWeights) -> float:
    """Weight-averaged probability over the scheme's predictors."""
    out = 0.0
    for name, weight in w.weights.items():
        if weight == 0.0:
            continue
        if name not in probs:
            raise FuseError(f"missing probability for weighted predictor {name!r}")
        p = probs[name]
        if not 0.0 <= p <= 1.0:
            raise FuseError(f"probability for {name!r} outside [0, 1]")
        out += weight * p
    return out


Fitter = Callable[[LabeledDataset], object]


def evaluate_cv(
    predictors: dict[str, Fitter],
    dataset: LabeledDataset,
    crowd_scores: dict[str, dict[str, float]] | None = None,
    *,
    k: int = 10,
    seed: int = 0,
    threshold: float = 0.5,
    schemes: Sequence[str] = SCHEMES,
) -> PerformanceTable:
    """Stratified k-fold MCC per predictor, plus fused-scheme rows.

    ``predictors`` maps a name to a fit function; each is trained on the
    train split of every fold. ``crowd_scores`` maps a crowd predictor
    name to per-venture probabilities, scored (never retrained) on each
    test fold. Scheme rows fuse the collected out-of-fold probabilities
    under weights derived from the per-predictor means.
    """
    crowd_scores = crowd_scores or {}
    for cname, scores in crowd_scores.items():
        missing = [vid for vid in dataset.ids if vid not in scores]
        if missing:
            raise FuseError(
                f"crowd predictor {cname!r} lacks scores for {missing[:5]}"
            )
    folds = kfold_split(dataset.y, k=k, seed=seed)
    n = dataset.n
    names = list(predictors) + list(crowd_scores)
    oof = {name: np.zeros(n) for name in names}
    fold_mccs: dict[str, list[float]] = {name: [] for name in names}
    fold_degenerate: dict[str, int] = {name: 0 for name in names}

    for test_idx in folds:
        train_idx = np.setdiff1d(np.arange(n), test_idx)
        train = dataset.subset(train_idx)
        y_test = dataset.y[test_idx]
        for name, fit in predictors.items():
            model = fit(train)
            proba = np.array(
                [predict_proba(model, dataset.x[i]) for i in test_idx]
            )
            oof[name][test_idx] = proba
            value, flag = mcc_with_flag(
                confusion_from_predictions(y_test, proba, threshold)
            )
            fold_mccs[name].append(value)
            fold_degenerate[name] += int(flag)
        for cname, scores in crowd_scores.items():
            proba = np.array([scores[dataset.ids[i]] for i in test_idx])
            oof[cname][test_idx] = proba
            value, flag = mcc_with_flag(
                confusion_from_predictions(y_test, proba, threshold)
            )
            fold_mccs[cname].append(value)
            fold_degenerate[cname] += int(flag)

    entries = [
        PerfEntry(
            name=name,
            kind="machine" if name in predictors else "crowd",
            fold_mcc=tuple(fold_mccs[name]),
            degenerate_folds=fold_degenerate[name],
        )
        for name in names
    ]
    base = PerformanceTable(
        entries=tuple(entries), k=k, seed=seed, threshold=threshold
    )

    scheme_entries = []
    for scheme in schemes:
        try:
            weights = weights_from_performance(base, scheme)
        except FuseError:
            continue  # scheme admits no predictors (e.g. no crowd data)
        fused_fold = []
        degenerate = 0
        for test_idx in folds:
            fused = np.zeros(test_idx.shape[0])
            for i, row in enumerate(test_idx):
                fused[i] = hybrid_predict(
                    {name: oof[name][row] for name in names}, weights
                )
            value, flag = mcc_with_flag(
                confusion_from_predictions(dataset.y[test_idx], fused, threshold)
            )
            fused_fold.append(value)
            degenerate += int(flag)
        scheme_entries.append(
            PerfEntry(
                name=scheme,
                kind="scheme",
                fold_mcc=tuple(fused_fold),
                degenerate_folds=degenerate,
            )
        )
    return PerformanceTable(
        entries=tuple(entries) + tuple(scheme_entries),
        k=k,
        seed=seed,
        threshold=threshold,
    )


def compare_report(pt: PerformanceTable) -> str:
    """Mean +/- sd MCC per predictor and per scheme; flags the best scheme."""
    rows = list(pt.entries)
    if len([e for e in rows if e.kind != "scheme"]) < 2 and len(rows) < 2:
        raise FuseError("nothing to compare")
    schemes = [e for e in rows if e.kind == "scheme"]
    best = max(schemes, key=lambda e: e.mean).name if schemes else None
    width = max(len(e.name) for e in rows)
    lines = [f"{'predictor'.ljust(width)}  kind     mean MCC    sd      "]
    for e in rows:
        flag = "  <- best scheme" if best is not None and e.name == best else ""
        lines.append(
            f"{e.name.ljust(width)}  {e.kind.ljust(7)}  "
            f"{e.mean:+.4f}   {e.sd:.4f}{flag}"
        )
    return "\n".join(lines) + "\n"
