"""Pure-NumPy kernel implementations.

These are the fallback twins of the compiled kernels in ``_fast.pyx``.
Both backends must stay bit-for-bit interchangeable: every floating-point
expression mirrors the compiled one operation for operation, and candidate
scans visit features in caller order and values in ascending order so that
first-minimum tie-breaking agrees.
"""

from __future__ import annotations

import numpy as np

# Row-block size for the pairwise distance matrix; bounds the (block, n, m)
# boolean intermediate.
_PAIR_BLOCK = 256


def hamming_matrix(x: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Mismatch counts between every row of `x` and every row of `modes`."""
    return (x[:, None, :] != modes[None, :, :]).sum(axis=2, dtype=np.int64)


def pairwise_hamming(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    out = np.empty((n, n), dtype=np.int64)
    for start in range(0, n, _PAIR_BLOCK):
        stop = min(start + _PAIR_BLOCK, n)
        out[start:stop] = (x[start:stop, None, :] != x[None, :, :]).sum(
            axis=2, dtype=np.int64
        )
    return out


def frequency_dissim(
    x: np.ndarray, modes: np.ndarray, match_cost: np.ndarray
) -> np.ndarray:
    """Frequency-weighted dissimilarity of rows to cluster centers.

    ``match_cost[l, j]`` is the cost charged when row attribute j equals the
    mode value of cluster l; a mismatch costs 1. Accumulation runs over
    attributes in ascending order (same order as the compiled kernel) so the
    float results are identical across backends.
    """
    n, m = x.shape
    k = modes.shape[0]
    out = np.zeros((n, k), dtype=np.float64)
    for j in range(m):
        eq = x[:, j][:, None] == modes[:, j][None, :]
        out += np.where(eq, match_cost[:, j][None, :], 1.0)
    return out


def best_categorical_split(
    xc: np.ndarray, y: np.ndarray, rows: np.ndarray, feats: np.ndarray
) -> tuple[int, int, float, int] | None:
    """Best equality split (value vs rest) by weighted Gini impurity.

    Scans features in the order given and candidate values ascending; keeps
    the first strict minimum. Returns (feature, value, weighted_gini,
    n_left) or None when no candidate separates the rows.
    """
    yr = y[rows].astype(np.int64)
    n = rows.shape[0]
    n1 = int(yr.sum())
    n0 = n - n1
    best = None
    for f in feats:
        col = xc[rows, f]
        ncodes = int(col.max()) + 1
        cnt = np.bincount(col, minlength=ncodes).astype(np.float64)
        cnt1 = np.bincount(col, weights=yr, minlength=ncodes)
        present = cnt > 0
        nl = cnt[present]
        l1 = cnt1[present]
        if nl.shape[0] < 2:
            continue
        values = np.nonzero(present)[0]
        l0 = nl - l1
        nr_ = n - nl
        r1 = n1 - l1
        r0 = n0 - l0
        # Keep this formula in sync with the compiled kernel.
        pl0 = l0 / nl
        pl1 = l1 / nl
        gl = 1.0 - pl0 * pl0 - pl1 * pl1
        pr0 = r0 / nr_
        pr1 = r1 / nr_
        gr = 1.0 - pr0 * pr0 - pr1 * pr1
        wg = (nl * gl + nr_ * gr) / n
        i = int(np.argmin(wg))
        if best is None or wg[i] < best[2]:
            best = (int(f), int(values[i]), float(wg[i]), int(nl[i]))
    return best
