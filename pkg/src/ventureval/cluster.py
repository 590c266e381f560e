"""k-modes clustering over categorical rows.

Centers are attribute-wise modes. Two dissimilarity measures are
available for the fit loop:

- ``hamming``: count of mismatching attributes.
- ``frequency``: mismatches cost 1; a match on attribute j against cluster
  l costs ``1 - (count of the mode value in l) / size(l)``, so agreeing
  with a rare mode is penalized more than agreeing with a dominant one.

``silhouette`` and ``select_k`` implement mean-silhouette scoring and the
first-local-maximum rule for choosing k over a scanned range.
``find_archetypes`` runs the two-stage procedure: cluster each taxonomy
component's bit block independently, re-represent every venture by its
component memberships, then cluster the success-labeled subset of those
membership rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from . import _kernels
from .schema import BusinessModel, Taxonomy, encode_dataset


class ClusterError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterSummary:
    """One cluster: its mode row, size, and per-attribute value counts."""

    mode: tuple
    size: int
    freq: tuple[dict, ...]  # per attribute: value -> count


@dataclass(frozen=True)
class Clustering:
    k: int
    assignments: np.ndarray  # int cluster index per row
    summaries: tuple[ClusterSummary, ...]
    cost: float
    iterations: int
    seed: int
    metric: str
    iteration_costs: tuple[float, ...]
    frequency_cost: float  # recomputed with the frequency measure, for reports
    converged: bool


@dataclass(frozen=True)
class KRecord:
    k: int
    silhouette: float
    clustering: Clustering


@dataclass(frozen=True)
class KSelection:
    records: tuple[KRecord, ...]
    chosen_k: int
    k_max_clamped_to: int | None  # set when the requested k_max exceeded distinct rows
    fallback_global_max: bool  # no strict local maximum existed


def hamming(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Number of positions where two equal-length rows differ."""
    if len(a) != len(b):
        raise ClusterError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)


def center_dissimilarity(x: Sequence[Hashable], summary: ClusterSummary) -> float:
    """Frequency-weighted dissimilarity of a row to a cluster summary."""
    if summary.size < 1:
        raise ClusterError("empty cluster has no frequency table")
    if len(x) != len(summary.mode):
        raise ClusterError(
            f"length mismatch: {len(x)} vs {len(summary.mode)}"
        )
    total = 0.0
    for j, (xv, zv) in enumerate(zip(x, summary.mode)):
        if xv == zv:
            total += 1.0 - summary.freq[j].get(zv, 0) / summary.size
        else:
            total += 1.0
    return total


# -- internal code representation --------------------------------------------


def _encode_rows(rows: Sequence[Sequence[Hashable]]) -> tuple[np.ndarray, list[list]]:
    """Map arbitrary categorical rows to int32 codes, per-column.

    Codes follow the sorted order of each column's distinct values, so code
    order equals identifier order (ties in mode updates then resolve to the
    lexicographically smallest identifier).
    """
    if len(rows) == 0:
        raise ClusterError("empty dataset")
    m = len(rows[0])
    if m == 0:
        raise ClusterError("rows have no attributes")
    if any(len(r) != m for r in rows):
        raise ClusterError("rows have unequal lengths")
    decoders: list[list] = []
    cols = []
    for j in range(m):
        distinct = {r[j] for r in rows}
        try:
            values = sorted(distinct)
        except TypeError:  # mixed types in one column
            values = sorted(distinct, key=lambda v: (str(type(v)), str(v)))
        lookup = {v: i for i, v in enumerate(values)}
        decoders.append(values)
        cols.append(np.array([lookup[r[j]] for r in rows], dtype=np.int32))
    codes = np.stack(cols, axis=1)
    return np.ascontiguousarray(codes), decoders


def _decode_mode(mode_codes: np.ndarray, decoders: list[list]) -> tuple:
    return tuple(decoders[j][int(c)] for j, c in enumerate(mode_codes))


def _summaries_from_codes(
    codes: np.ndarray, labels: np.ndarray, k: int, decoders: list[list]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[ClusterSummary]]:
    """Per-cluster modes, counts of each mode value, sizes, and summaries."""
    n, m = codes.shape
    ncodes = int(codes.max()) + 1
    modes = np.zeros((k, m), dtype=np.int32)
    mode_counts = np.zeros((k, m), dtype=np.float64)
    sizes = np.zeros(k, dtype=np.float64)
    summaries = []
    for l in range(k):
        members = codes[labels == l]
        sizes[l] = members.shape[0]
        freq: list[dict] = []
        for j in range(m):
            counts = np.bincount(members[:, j], minlength=ncodes)
            best = int(np.argmax(counts))  # first max = smallest code
            modes[l, j] = best
            mode_counts[l, j] = counts[best]
            freq.append(
                {
                    decoders[j][v]: int(c)
                    for v, c in enumerate(counts)
                    if c > 0
                }
            )
        summaries.append(
            ClusterSummary(
                mode=_decode_mode(modes[l], decoders),
                size=int(sizes[l]),
                freq=tuple(freq),
            )
        )
    return modes, mode_counts, sizes, summaries


def _dissim_matrix(
    codes: np.ndarray,
    modes: np.ndarray,
    mode_counts: np.ndarray,
    sizes: np.ndarray,
    metric: str,
) -> np.ndarray:
    if metric == "hamming":
        return _kernels.hamming_matrix(codes, modes).astype(np.float64)
    match_cost = 1.0 - mode_counts / sizes[:, None]
    return _kernels.frequency_dissim(codes, modes, match_cost)


def kmodes_fit(
    rows: Sequence[Sequence[Hashable]],
    k: int,
    *,
    seed: int = 0,
    max_iter: int = 100,
    restarts: int = 10,
    metric: str = "hamming",
) -> Clustering:
    """Fit k-modes; returns the lowest-cost clustering across restarts.

    Initial modes are k distinct rows sampled uniformly per restart (seeded
    by ``(seed, restart)``). With the hamming measure the reported
    per-iteration cost is non-increasing; with the frequency measure the
    loop stops at the first non-improving iteration and keeps the best
    state seen.
    """
    if metric not in ("hamming", "frequency"):
        raise ClusterError(f"unknown metric {metric!r}")
    if max_iter < 1:
        raise ClusterError("max_iter must be >= 1")
    if restarts < 1:
        raise ClusterError("restarts must be >= 1")
    codes, decoders = _encode_rows(rows)
    n = codes.shape[0]
    distinct = np.unique(codes, axis=0)
    if k < 1:
        raise ClusterError("k must be >= 1")
    if k > distinct.shape[0]:
        raise ClusterError(
            f"k={k} exceeds the number of distinct rows ({distinct.shape[0]})"
        )

    best: Clustering | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        pick = rng.choice(distinct.shape[0], size=k, replace=False)
        modes = np.ascontiguousarray(distinct[np.sort(pick)])
        result = _run_single(codes, decoders, modes, k, max_iter, metric, seed)
        if best is None or result.cost < best.cost:
            best = result
    assert best is not None
    return best


def _run_single(
    codes: np.ndarray,
    decoders: list[list],
    modes: np.ndarray,
    k: int,
    max_iter: int,
    metric: str,
    seed: int,
) -> Clustering:
    n = codes.shape[0]
    mode_counts = np.zeros_like(modes, dtype=np.float64)
    sizes = np.zeros(k, dtype=np.float64)
    prev_labels: np.ndarray | None = None
    labels = np.zeros(n, dtype=np.int64)
    iteration_costs: list[float] = []
    converged = False
    best_state = None  # (cost, labels) guard for the frequency measure

    for it in range(max_iter):
        # First pass has no frequency tables yet, so it assigns by hamming.
        use = "hamming" if (metric == "frequency" and it == 0) else metric
        dist = _dissim_matrix(codes, modes, mode_counts, sizes, use)
        labels = np.argmin(dist, axis=1)
        cost = float(dist[np.arange(n), labels].sum())

        # Reseed empty clusters on the farthest row. Only the empty
        # cluster's mode changes, so no assigned row's cost term moves.
        repaired = False
        present = np.bincount(labels, minlength=k)
        for l in range(k):
            if present[l] == 0:
                far = int(np.argmax(dist[:, l]))
                modes[l] = codes[far]
                repaired = True
        if repaired:
            # Frequency tables for the reseeded mode: treat it as its own
            # provisional singleton so the next pass can attract rows.
            modes_r, counts_r, sizes_r, _ = _summaries_from_codes(
                codes, labels, k, decoders
            )
            keep = present > 0
            counts_r[~keep] = 1.0
            sizes_r[~keep] = 1.0
            modes_r[~keep] = modes[~keep]
            mode_counts, sizes = counts_r, sizes_r
            modes = np.ascontiguousarray(modes_r)
            iteration_costs.append(cost)
            prev_labels = labels
            continue

        if metric == "frequency" and iteration_costs and cost > iteration_costs[-1]:
            # Non-improving step: keep the previous state and stop.
            labels = prev_labels  # type: ignore[assignment]
            converged = True
            break

        iteration_costs.append(cost)
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            converged = True
            break
        prev_labels = labels
        modes, mode_counts, sizes, _ = _summaries_from_codes(
            codes, labels, k, decoders
        )
        modes = np.ascontiguousarray(modes)

    # Guarantee non-empty clusters in the returned state (pathological
    # max_iter exhaustion only).
    present = np.bincount(labels, minlength=k)
    while (present == 0).any():
        l = int(np.argmin(present))
        donors = np.nonzero(present[labels] >= 2)[0]
        dist = _kernels.hamming_matrix(codes, modes).astype(np.float64)
        far = donors[int(np.argmax(dist[donors, l]))]
        labels = labels.copy()
        labels[far] = l
        present = np.bincount(labels, minlength=k)

    modes, mode_counts, sizes, summaries = _summaries_from_codes(
        codes, labels, k, decoders
    )
    final_dist = _dissim_matrix(codes, modes, mode_counts, sizes, metric)
    cost = float(final_dist[np.arange(n), labels].sum())
    freq_dist = _dissim_matrix(codes, modes, mode_counts, sizes, "frequency")
    freq_cost = float(freq_dist[np.arange(n), labels].sum())
    return Clustering(
        k=k,
        assignments=labels,
        summaries=tuple(summaries),
        cost=cost,
        iterations=len(iteration_costs),
        seed=seed,
        metric=metric,
        iteration_costs=tuple(iteration_costs),
        frequency_cost=freq_cost,
        converged=converged,
    )


def silhouette(
    rows: Sequence[Sequence[Hashable]],
    clustering: Clustering,
    metric: Callable[[Sequence, Sequence], float] | None = None,
) -> float:
    """Mean silhouette of a clustering; pairwise distances default to hamming.

    Per row: a = mean distance to own cluster (excluding self), b = min
    over other clusters of the mean distance; score = (b-a)/max(a,b).
    Singleton rows and a = b = 0 contribute 0.
    """
    labels = np.asarray(clustering.assignments)
    k = clustering.k
    if k < 2:
        raise ClusterError("silhouette needs at least 2 clusters")
    n = len(rows)
    if metric is None:
        codes, _ = _encode_rows(rows)
        dist = _kernels.pairwise_hamming(codes).astype(np.float64)
    else:
        dist = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            for j in range(i + 1, n):
                dist[i, j] = dist[j, i] = float(metric(rows[i], rows[j]))
    sizes = np.bincount(labels, minlength=k)
    if (sizes == 0).any():
        raise ClusterError("silhouette needs every cluster non-empty")
    total = 0.0
    for i in range(n):
        own = labels[i]
        if sizes[own] == 1:
            continue  # contributes 0
        a = dist[i, labels == own].sum() / (sizes[own] - 1)
        b = min(
            dist[i, labels == l].sum() / sizes[l] for l in range(k) if l != own
        )
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / n


def select_k(
    rows: Sequence[Sequence[Hashable]],
    k_min: int = 2,
    k_max: int = 30,
    *,
    restarts: int = 10,
    seed: int = 0,
    max_iter: int = 100,
    metric: str = "hamming",
) -> KSelection:
    """Scan k ascending, score each fit by mean silhouette, pick the first
    strict local maximum (global maximum when the curve has none)."""
    if k_min < 2:
        raise ClusterError("k_min must be >= 2")
    if k_max < k_min:
        raise ClusterError("k_max must be >= k_min")
    codes, _ = _encode_rows(rows)
    n_distinct = int(np.unique(codes, axis=0).shape[0])
    if n_distinct < 2:
        raise ClusterError("need at least 2 distinct rows to select k")
    clamped_to = None
    if k_max > n_distinct:
        clamped_to = n_distinct
        k_max = n_distinct
    records = []
    for k in range(k_min, k_max + 1):
        clustering = kmodes_fit(
            rows, k, seed=seed, max_iter=max_iter, restarts=restarts, metric=metric
        )
        records.append(
            KRecord(k=k, silhouette=silhouette(rows, clustering), clustering=clustering)
        )
    scores = [r.silhouette for r in records]
    chosen = None
    for i, s in enumerate(scores):
        left_ok = i == 0 or s > scores[i - 1]
        right_ok = i == len(scores) - 1 or s > scores[i + 1]
        if len(scores) == 1 or (left_ok and right_ok):
            chosen = i
            break
    fallback = chosen is None
    if fallback:
        chosen = int(np.argmax(scores))
    return KSelection(
        records=tuple(records),
        chosen_k=records[chosen].k,
        k_max_clamped_to=clamped_to,
        fallback_global_max=fallback,
    )


@dataclass(frozen=True)
class ArchetypeResult:
    component_selections: dict[str, KSelection]
    membership_rows: np.ndarray  # n x n_components, cluster index per component
    component_names: tuple[str, ...]
    venture_ids: tuple[str, ...]
    success_ids: tuple[str, ...]
    pattern_selection: KSelection


def find_archetypes(
    taxonomy: Taxonomy,
    models: list[BusinessModel],
    *,
    component_k: tuple[int, int] = (2, 30),
    pattern_k: tuple[int, int] = (2, 20),
    restarts: int = 10,
    seed: int = 0,
    metric: str = "hamming",
) -> ArchetypeResult:
    """Two-stage archetype discovery over a labeled venture set.

    Stage 1 clusters every component's one-hot block independently and
    records the silhouette-chosen k. Stage 2 re-represents each venture as
    its component memberships and clusters the success-labeled subset of
    those rows (plain hamming).
    """
    if not models:
        raise ClusterError("no models given")
    bits, ids = encode_dataset(taxonomy, models)
    blocks = taxonomy.component_blocks()
    names = tuple(taxonomy.sublayer_names)
    selections: dict[str, KSelection] = {}
    membership = np.zeros((len(models), len(names)), dtype=np.int64)
    for ci, comp in enumerate(names):
        block_rows = [tuple(int(b) for b in bits[i, blocks[comp]]) for i in range(len(models))]
        sel = select_k(
            block_rows,
            component_k[0],
            component_k[1],
            restarts=restarts,
            seed=seed + ci,
            metric=metric,
        )
        selections[comp] = sel
        chosen = next(r for r in sel.records if r.k == sel.chosen_k)
        membership[:, ci] = chosen.clustering.assignments
    success_idx = [i for i, m in enumerate(models) if m.label == 1]
    if len(success_idx) < 2:
        raise ClusterError("need at least 2 success-labeled models")
    success_rows = [tuple(int(v) for v in membership[i]) for i in success_idx]
    pattern = select_k(
        success_rows,
        pattern_k[0],
        pattern_k[1],
        restarts=restarts,
        seed=seed + len(names),
        metric="hamming",
    )
    return ArchetypeResult(
        component_selections=selections,
        membership_rows=membership,
        component_names=names,
        venture_ids=tuple(ids),
        success_ids=tuple(ids[i] for i in success_idx),
        pattern_selection=pattern,
    )
