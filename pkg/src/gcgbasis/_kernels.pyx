# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: tuple/class enumeration and B-block assembly.

Mirrors gcgbasis._kernels_py exactly (same outputs, same row order); see that
module for the conventions.  Column lookups use lexicographic binary search
instead of a dict.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def product_tuples_with_sum(values_list, target):
    cdef int n = len(values_list)
    cdef long long tgt = target
    cdef int i, j, depth
    arrays = [np.ascontiguousarray(a, dtype=np.int64) for a in values_list]
    cdef long long[:] suffix_lo = np.zeros(n + 1, dtype=np.int64)
    cdef long long[:] suffix_hi = np.zeros(n + 1, dtype=np.int64)
    cdef const long long[:] vals
    for i in range(n - 1, -1, -1):
        vals = arrays[i]
        suffix_lo[i] = suffix_lo[i + 1] + vals[0]
        suffix_hi[i] = suffix_hi[i + 1] + vals[vals.shape[0] - 1]
    if tgt < suffix_lo[0] or tgt > suffix_hi[0]:
        return np.empty((0, n), dtype=np.int64)

    # counts[i][remaining - suffix_lo[i]] = number of completions of slots i..
    counts = [np.zeros(suffix_hi[i] - suffix_lo[i] + 1, dtype=np.int64)
              for i in range(n + 1)]
    cdef long long[:] cur, nxt
    cdef long long rem, v, total
    counts[n][0] = 1
    for i in range(n - 1, -1, -1):
        cur = counts[i]
        nxt = counts[i + 1]
        vals = arrays[i]
        for j in range(vals.shape[0]):
            v = vals[j]
            for rem in range(suffix_lo[i], suffix_hi[i] + 1):
                if suffix_lo[i + 1] <= rem - v and rem - v <= suffix_hi[i + 1]:
                    cur[rem - suffix_lo[i]] += nxt[rem - v - suffix_lo[i + 1]]
    cur = counts[0]
    total = cur[tgt - suffix_lo[0]]
    out = np.empty((total, n), dtype=np.int64)
    if total == 0 or n == 0:
        return out
    cdef long long[:, :] om = out
    cdef long long row = 0, c
    cdef long long[:] st_rem = np.empty(n + 1, dtype=np.int64)
    cdef long long[:] st_idx = np.zeros(n + 1, dtype=np.int64)
    cdef long long[:] cnt_view
    depth = 0
    st_rem[0] = tgt
    while depth >= 0:
        if depth == n:
            row += 1
            depth -= 1
            continue
        vals = arrays[depth]
        if st_idx[depth] >= vals.shape[0]:
            st_idx[depth] = 0
            depth -= 1
            continue
        v = vals[st_idx[depth]]
        st_idx[depth] += 1
        rem = st_rem[depth] - v
        if rem < suffix_lo[depth + 1] or rem > suffix_hi[depth + 1]:
            continue
        cnt_view = counts[depth + 1]
        c = cnt_view[rem - suffix_lo[depth + 1]]
        if c == 0:
            continue
        for i in range(row, row + c):
            om[i, depth] = v
        st_rem[depth + 1] = rem
        depth += 1
    return out


def ascending_tuples_with_sum(values, n_slots, target):
    vals_arr = np.ascontiguousarray(values, dtype=np.int64)
    cdef const long long[:] vals = vals_arr
    cdef int nv = vals.shape[0]
    cdef int n = n_slots
    cdef long long tgt = target
    cdef int i, j, vi, s, depth
    if n == 0:
        return np.empty((1 if tgt == 0 else 0, 0), dtype=np.int64)
    cdef long long vmax = vals[nv - 1], vmin = vals[0]
    if tgt < vmin * n or tgt > vmax * n:
        return np.empty((0, n), dtype=np.int64)

    # c3[s, vi, remaining - vmin*s]: ascending s-tuples over vals[vi:] summing
    # to `remaining`
    cdef long long width = (vmax - vmin) * n + 1
    cnt = np.zeros((n + 1, nv, width), dtype=np.int64)
    cdef long long[:, :, :] c3 = cnt
    for vi in range(nv):
        c3[0, vi, 0] = 1
    cdef long long rem, rest, v
    for s in range(1, n + 1):
        for vi in range(nv - 1, -1, -1):
            for rem in range(vals[vi] * s, vmax * s + 1):
                for j in range(vi, nv):
                    rest = rem - vals[j]
                    if rest < vals[j] * (s - 1) or rest > vmax * (s - 1):
                        continue
                    c3[s, vi, rem - vmin * s] += c3[s - 1, j, rest - vmin * (s - 1)]
    cdef long long total = c3[n, 0, tgt - vmin * n]
    out = np.empty((total, n), dtype=np.int64)
    if total == 0:
        return out
    cdef long long[:, :] om = out
    cdef long long row = 0, c
    cdef long long[:] st_rem = np.empty(n + 1, dtype=np.int64)
    cdef long long[:] st_vi = np.zeros(n + 1, dtype=np.int64)
    depth = 0
    st_rem[0] = tgt
    st_vi[0] = 0
    while depth >= 0:
        if depth == n:
            row += 1
            depth -= 1
            continue
        if st_vi[depth] >= nv:
            depth -= 1
            continue
        vi = <int> st_vi[depth]
        st_vi[depth] += 1
        v = vals[vi]
        rem = st_rem[depth] - v
        s = n - depth - 1
        if rem < v * s or rem > vmax * s:
            continue
        if s > 0:
            c = c3[s, vi, rem - vmin * s]
        else:
            c = 1 if rem == 0 else 0
        if c == 0:
            continue
        for i in range(row, row + c):
            om[i, depth] = v
        st_rem[depth + 1] = rem
        st_vi[depth + 1] = vi  # ascending: next slot resumes at this value
        depth += 1
    return out


# ---------------------------------------------------------------------------
# block assembly
# ---------------------------------------------------------------------------

cdef inline long long _bsearch(const long long[:, :] cols, long long[:, :] rows, long long i):
    """Index of rows[i] among lex-sorted rows of cols, or -1."""
    cdef long long lo = 0, hi = cols.shape[0] - 1, mid
    cdef int cmp, j
    cdef int n = cols.shape[1]
    while lo <= hi:
        mid = (lo + hi) >> 1
        cmp = 0
        for j in range(n):
            if cols[mid, j] < rows[i, j]:
                cmp = -1
                break
            elif cols[mid, j] > rows[i, j]:
                cmp = 1
                break
        if cmp == 0:
            return mid
        elif cmp < 0:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


def ge_block_coo(rows, cols, twice_ells, lower):
    rows_arr = np.array(rows, dtype=np.int64, copy=True, order="C")
    cols_arr = np.ascontiguousarray(cols, dtype=np.int64)
    tl_arr = np.ascontiguousarray(twice_ells, dtype=np.int64)
    cdef long long[:, :] rm = rows_arr
    cdef const long long[:, :] cm = cols_arr
    cdef const long long[:] tls = tl_arr
    cdef bint low = bool(lower)
    cdef long long nr = rm.shape[0]
    cdef int n = rm.shape[1]
    ri_arr = np.empty(nr * n, dtype=np.int64)
    ci_arr = np.empty(nr * n, dtype=np.int64)
    val_arr = np.empty(nr * n, dtype=np.float64)
    cdef long long[:] ri = ri_arr
    cdef long long[:] ci = ci_arr
    cdef double[:] vv = val_arr
    cdef long long i, k, cnt = 0
    cdef int j
    cdef long long tl, tm, step = -2 if low else 2
    cdef double w
    for i in range(nr):
        for j in range(n):
            tl = tls[j]
            tm = rm[i, j]
            if low:
                if tm == -tl:
                    continue
                w = 0.5 * sqrt(<double> ((tl - tm + 2) * (tl + tm)))
            else:
                if tm == tl:
                    continue
                w = -0.5 * sqrt(<double> ((tl + tm + 2) * (tl - tm)))
            rm[i, j] = tm + step
            k = _bsearch(cm, rm, i)
            rm[i, j] = tm
            if k >= 0:
                ri[cnt] = i
                ci[cnt] = k
                vv[cnt] = w
                cnt += 1
    return ri_arr[:cnt], ci_arr[:cnt], val_arr[:cnt]


def gepi_block_coo(rows, cols, twice_ells, block_ids, lower):
    rows_arr = np.array(rows, dtype=np.int64, copy=True, order="C")
    cols_arr = np.ascontiguousarray(cols, dtype=np.int64)
    tl_arr = np.ascontiguousarray(twice_ells, dtype=np.int64)
    bid_arr = np.ascontiguousarray(block_ids, dtype=np.int64)
    cdef long long[:, :] rm = rows_arr
    cdef const long long[:, :] cm = cols_arr
    cdef const long long[:] tls = tl_arr
    cdef const long long[:] bids = bid_arr
    cdef bint low = bool(lower)
    cdef long long nr = rm.shape[0]
    cdef int n = rm.shape[1]
    ri_arr = np.empty(nr * n, dtype=np.int64)
    ci_arr = np.empty(nr * n, dtype=np.int64)
    val_arr = np.empty(nr * n, dtype=np.float64)
    cdef long long[:] ri = ri_arr
    cdef long long[:] ci = ci_arr
    cdef double[:] vv = val_arr
    cdef long long i, k, cnt = 0, mult
    cdef int j, s
    cdef long long tl, tm, b, step = -2 if low else 2
    cdef double w
    for i in range(nr):
        for j in range(n):
            tl = tls[j]
            tm = rm[i, j]
            b = bids[j]
            if low:
                if tm == -tl:
                    continue
                if j > 0 and bids[j - 1] == b and rm[i, j - 1] == tm:
                    continue
                w = 0.5 * sqrt(<double> ((tl - tm + 2) * (tl + tm)))
            else:
                if tm == tl:
                    continue
                if j + 1 < n and bids[j + 1] == b and rm[i, j + 1] == tm:
                    continue
                w = -0.5 * sqrt(<double> ((tl + tm + 2) * (tl - tm)))
            mult = 1
            for s in range(n):
                if bids[s] == b and s != j and rm[i, s] == tm + step:
                    mult += 1
            rm[i, j] = tm + step
            k = _bsearch(cm, rm, i)
            rm[i, j] = tm
            if k >= 0:
                ri[cnt] = i
                ci[cnt] = k
                vv[cnt] = w * mult
                cnt += 1
    return ri_arr[:cnt], ci_arr[:cnt], val_arr[:cnt]
