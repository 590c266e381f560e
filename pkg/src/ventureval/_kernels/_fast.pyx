# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops.

Each function has a NumPy twin in ``py.py``; the two must return
bit-identical results (same float expressions, same scan order, same
first-minimum tie-breaking).
"""

import numpy as np

cimport numpy as cnp


def hamming_matrix(cnp.int32_t[:, ::1] x, cnp.int32_t[:, ::1] modes):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1], k = modes.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    cdef Py_ssize_t i, l, j
    cdef cnp.int64_t d
    for i in range(n):
        for l in range(k):
            d = 0
            for j in range(m):
                if x[i, j] != modes[l, j]:
                    d += 1
            o[i, l] = d
    return out


def pairwise_hamming(cnp.int32_t[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    out = np.zeros((n, n), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    cdef Py_ssize_t i, l, j
    cdef cnp.int64_t d
    for i in range(n):
        for l in range(i + 1, n):
            d = 0
            for j in range(m):
                if x[i, j] != x[l, j]:
                    d += 1
            o[i, l] = d
            o[l, i] = d
    return out


def frequency_dissim(cnp.int32_t[:, ::1] x, cnp.int32_t[:, ::1] modes,
                     cnp.float64_t[:, ::1] match_cost):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1], k = modes.shape[0]
    out = np.zeros((n, k), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] o = out
    cdef Py_ssize_t i, l, j
    cdef double acc
    for i in range(n):
        for l in range(k):
            acc = 0.0
            for j in range(m):
                if x[i, j] == modes[l, j]:
                    acc += match_cost[l, j]
                else:
                    acc += 1.0
            o[i, l] = acc
    return out


def best_categorical_split(cnp.int32_t[:, ::1] xc, cnp.int8_t[::1] y,
                           cnp.int64_t[::1] rows, cnp.int64_t[::1] feats):
    """Equality-split search; see the NumPy twin for the contract."""
    cdef Py_ssize_t n = rows.shape[0], nf = feats.shape[0]
    cdef Py_ssize_t fi, ri, v, f
    cdef cnp.int64_t r
    cdef cnp.int32_t code, maxcode

    # Size the per-value counting buffers off the global code range.
    maxcode = 0
    for fi in range(nf):
        f = feats[fi]
        for ri in range(n):
            code = xc[rows[ri], f]
            if code > maxcode:
                maxcode = code
    cnt_arr = np.zeros(maxcode + 1, dtype=np.int64)
    cnt1_arr = np.zeros(maxcode + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] cnt = cnt_arr
    cdef cnp.int64_t[::1] cnt1 = cnt1_arr

    cdef cnp.int64_t n1 = 0, n0
    for ri in range(n):
        n1 += y[rows[ri]]
    n0 = n - n1

    cdef double best_wg = 0.0
    cdef Py_ssize_t best_f = -1, best_v = -1, best_nl = 0
    cdef bint have = 0
    cdef double nl, l1, l0, nr_, r1, r0, pl0, pl1, gl, pr0, pr1, gr, wg
    cdef double dn = <double> n

    for fi in range(nf):
        f = feats[fi]
        for v in range(maxcode + 1):
            cnt[v] = 0
            cnt1[v] = 0
        for ri in range(n):
            r = rows[ri]
            code = xc[r, f]
            cnt[code] += 1
            cnt1[code] += y[r]
        for v in range(maxcode + 1):
            if cnt[v] == 0 or cnt[v] == n:
                continue
            nl = <double> cnt[v]
            l1 = <double> cnt1[v]
            l0 = nl - l1
            nr_ = dn - nl
            r1 = (<double> n1) - l1
            r0 = (<double> n0) - l0
            # Keep this formula in sync with the NumPy twin.
            pl0 = l0 / nl
            pl1 = l1 / nl
            gl = 1.0 - pl0 * pl0 - pl1 * pl1
            pr0 = r0 / nr_
            pr1 = r1 / nr_
            gr = 1.0 - pr0 * pr0 - pr1 * pr1
            wg = (nl * gl + nr_ * gr) / dn
            if (not have) or wg < best_wg:
                have = 1
                best_wg = wg
                best_f = f
                best_v = v
                best_nl = cnt[v]
    if not have:
        return None
    return (int(best_f), int(best_v), float(best_wg), int(best_nl))
