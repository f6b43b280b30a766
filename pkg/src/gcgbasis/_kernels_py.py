"""Pure-Python/numpy implementation of the hot kernels.

Reference implementation for the Cython extension ``_kernels.pyx``; both
expose the same four functions with identical outputs (row order included).
All m values are doubled integers (int64); weight formulas therefore read
(l + m + 1)(l - m) = (tl + tm + 2)(tl - tm) / 4 and so on.
"""

from __future__ import annotations

import numpy as np


def product_tuples_with_sum(values_list, target):
    """Rows of the cartesian product of ``values_list`` whose entries sum to
    ``target``; lexicographic row order.  Each values array must be ascending.
    """
    n = len(values_list)
    suffix_lo = [0] * (n + 1)
    suffix_hi = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_lo[i] = suffix_lo[i + 1] + int(values_list[i][0])
        suffix_hi[i] = suffix_hi[i + 1] + int(values_list[i][-1])

    memo: dict[tuple[int, int], np.ndarray] = {}

    def suffixes(i: int, remaining: int) -> np.ndarray:
        if i == n:
            if remaining == 0:
                return np.empty((1, 0), dtype=np.int64)
            return np.empty((0, 0), dtype=np.int64)
        key = (i, remaining)
        out = memo.get(key)
        if out is not None:
            return out
        chunks = []
        for v in values_list[i]:
            v = int(v)
            rest = remaining - v
            if rest < suffix_lo[i + 1] or rest > suffix_hi[i + 1]:
                continue
            tail = suffixes(i + 1, rest)
            if tail.shape[0]:
                chunks.append(
                    np.hstack([np.full((tail.shape[0], 1), v, dtype=np.int64), tail])
                )
        out = (
            np.vstack(chunks)
            if chunks
            else np.empty((0, n - i), dtype=np.int64)
        )
        memo[key] = out
        return out

    return suffixes(0, int(target))


def ascending_tuples_with_sum(values, n_slots, target):
    """Ascending (weakly increasing) n_slots-tuples over ``values`` with the
    given sum; lexicographic row order.  ``values`` must be ascending.
    """
    values = np.asarray(values, dtype=np.int64)
    nv = len(values)
    memo: dict[tuple[int, int, int], np.ndarray] = {}

    def rec(slots_left: int, vmin_idx: int, remaining: int) -> np.ndarray:
        if slots_left == 0:
            if remaining == 0:
                return np.empty((1, 0), dtype=np.int64)
            return np.empty((0, 0), dtype=np.int64)
        key = (slots_left, vmin_idx, remaining)
        out = memo.get(key)
        if out is not None:
            return out
        chunks = []
        for idx in range(vmin_idx, nv):
            v = int(values[idx])
            rest = remaining - v
            # remaining slots must each hold a value in [v, values[-1]]
            if rest < v * (slots_left - 1) or rest > int(values[-1]) * (slots_left - 1):
                continue
            tail = rec(slots_left - 1, idx, rest)
            if tail.shape[0]:
                chunks.append(
                    np.hstack([np.full((tail.shape[0], 1), v, dtype=np.int64), tail])
                )
        out = (
            np.vstack(chunks)
            if chunks
            else np.empty((0, slots_left), dtype=np.int64)
        )
        memo[key] = out
        return out

    return rec(int(n_slots), 0, int(target))


def _index_of(cols: np.ndarray) -> dict[bytes, int]:
    return {row.tobytes(): i for i, row in enumerate(np.ascontiguousarray(cols))}


def ge_block_coo(rows, cols, twice_ells, lower):
    """COO triplets of one raising/lowering block between m-tuple index sets.

    rows: (nr, N) tuples at the row sum; cols: (nc, N) tuples at the column
    sum.  ``lower=False`` emits the raising entries -sqrt((l+m+1)(l-m)) at
    (m, m_j^+); ``lower=True`` the lowering entries +sqrt((l-m+1)(l+m)) at
    (m, m_j^-).
    """
    rows = np.array(rows, dtype=np.int64, copy=True, order="C")
    nr, n = rows.shape
    lookup = _index_of(np.asarray(cols, dtype=np.int64))
    ri, ci, vals = [], [], []
    step = -2 if lower else 2
    for i in range(nr):
        m = rows[i]
        for j in range(n):
            tl, tm = int(twice_ells[j]), int(m[j])
            if lower:
                if tm == -tl:
                    continue
                w = 0.5 * np.sqrt((tl - tm + 2) * (tl + tm))
            else:
                if tm == tl:
                    continue
                w = -0.5 * np.sqrt((tl + tm + 2) * (tl - tm))
            m[j] += step
            k = lookup.get(m.tobytes())
            m[j] -= step
            if k is not None:
                ri.append(i)
                ci.append(k)
                vals.append(w)
    return (
        np.array(ri, dtype=np.int64),
        np.array(ci, dtype=np.int64),
        np.array(vals, dtype=np.float64),
    )


def gepi_block_coo(rows, cols, twice_ells, block_ids, lower):
    """COO triplets of one class-indexed raising/lowering block.

    Same layout as :func:`ge_block_coo` but rows/cols are class
    representatives (ascending per block) and entries carry the
    interacting-class multiplier: the count of the destination value in the
    target class.  Raising moves act on the last slot of an equal-value run,
    lowering moves on the first; values sit on a step-2 lattice, so the moved
    slot stays in place and the representative stays canonical.
    """
    rows = np.array(rows, dtype=np.int64, copy=True, order="C")
    nr, n = rows.shape
    lookup = _index_of(np.asarray(cols, dtype=np.int64))
    ri, ci, vals = [], [], []
    step = -2 if lower else 2
    for i in range(nr):
        m = rows[i]
        for j in range(n):
            tl, tm, b = int(twice_ells[j]), int(m[j]), int(block_ids[j])
            if lower:
                if tm == -tl:
                    continue
                # move on the first slot of a run only
                if j > 0 and block_ids[j - 1] == b and m[j - 1] == tm:
                    continue
                w = 0.5 * np.sqrt((tl - tm + 2) * (tl + tm))
            else:
                if tm == tl:
                    continue
                # move on the last slot of a run only
                if j + 1 < n and block_ids[j + 1] == b and m[j + 1] == tm:
                    continue
                w = -0.5 * np.sqrt((tl + tm + 2) * (tl - tm))
            # multiplier: occurrences of the destination value in the target
            mult = 1
            for s in range(n):
                if block_ids[s] == b and s != j and m[s] == tm + step:
                    mult += 1
            m[j] += step
            idx = lookup.get(m.tobytes())
            m[j] -= step
            if idx is not None:
                ri.append(i)
                ci.append(idx)
                vals.append(w * mult)
    return (
        np.array(ri, dtype=np.int64),
        np.array(ci, dtype=np.int64),
        np.array(vals, dtype=np.float64),
    )
