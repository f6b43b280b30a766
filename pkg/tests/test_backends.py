"""The compiled and pure-Python kernels must agree entry-for-entry."""

import numpy as np
import pytest

from gcgbasis import _backend, _kernels_py
from gcgbasis.indexing import LVector

compiled = pytest.importorskip(
    "gcgbasis._kernels", reason="compiled extension not built"
)


def _values(tl):
    return np.arange(-tl, tl + 1, 2, dtype=np.int64)


@pytest.mark.parametrize(
    "tls,target",
    [([2, 2], 0), ([2, 4, 6], 2), ([1, 1, 3], 1), ([4] * 5, -6), ([2], 2), ([2], 5)],
)
def test_product_tuples_agree(tls, target):
    vals = [_values(tl) for tl in tls]
    a = compiled.product_tuples_with_sum(vals, target)
    b = _kernels_py.product_tuples_with_sum(vals, target)
    assert np.array_equal(a, b)
    if a.shape[0]:
        assert (a.sum(axis=1) == target).all()
        # strict lexicographic ordering
        order = np.lexsort(a.T[::-1])
        assert np.array_equal(order, np.arange(a.shape[0]))


@pytest.mark.parametrize(
    "tl,n,target", [(2, 3, 0), (4, 4, 2), (6, 6, 4), (3, 2, 0), (2, 5, -8), (2, 1, 2)]
)
def test_ascending_tuples_agree(tl, n, target):
    a = compiled.ascending_tuples_with_sum(_values(tl), n, target)
    b = _kernels_py.ascending_tuples_with_sum(_values(tl), n, target)
    assert np.array_equal(a, b)
    if a.shape[0]:
        assert (np.diff(a, axis=1) >= 0).all()
        assert (a.sum(axis=1) == target).all()


@pytest.mark.parametrize("lower", [False, True])
@pytest.mark.parametrize("spec", [[1, 1], [2, 1], [2, 2, 2], [1, 1, 3]])
def test_ge_blocks_agree(spec, lower):
    lv = LVector.of(spec)
    for tK in range(-lv.sum_ell.twice, lv.sum_ell.twice + 1, 2):
        rows = _kernels_py.product_tuples_with_sum(
            [_values(tl) for tl in lv.twice_ells], tK
        )
        cols = _kernels_py.product_tuples_with_sum(
            [_values(tl) for tl in lv.twice_ells], tK + (-2 if lower else 2)
        )
        a = compiled.ge_block_coo(rows, cols, lv.twice_ells, lower)
        b = _kernels_py.ge_block_coo(rows, cols, lv.twice_ells, lower)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)


@pytest.mark.parametrize("lower", [False, True])
@pytest.mark.parametrize(
    "spec", [[1, 1, 1], [2, 2], [(0, 1), (0, 1), (1, 2), (1, 2)], [3, 3, 3, 3]]
)
def test_gepi_blocks_agree(spec, lower):
    from gcgbasis.indexing import enum_classes_K
    from gcgbasis.halfint import HalfInt

    lv = LVector.of(spec)
    for tK in range(-lv.sum_ell.twice, lv.sum_ell.twice + 1, 2):
        rows = enum_classes_K(lv, HalfInt(tK))
        cols = enum_classes_K(lv, HalfInt(tK + (-2 if lower else 2)))
        a = compiled.gepi_block_coo(rows, cols, lv.twice_ells, lv.block_ids, lower)
        b = _kernels_py.gepi_block_coo(rows, cols, lv.twice_ells, lv.block_ids, lower)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)


def test_bases_identical_across_backends(monkeypatch):
    from gcgbasis import mup

    lv = LVector.of([2, 2, 2])
    saved = _backend.impl
    try:
        _backend.impl = _backend.get_impl("c")
        mup.index_rows.cache_clear()
        vc = mup.gepi_basis(lv, 2).vectors
        _backend.impl = _backend.get_impl("py")
        mup.index_rows.cache_clear()
        vp = mup.gepi_basis(lv, 2).vectors
    finally:
        _backend.impl = saved
        mup.index_rows.cache_clear()
    assert np.array_equal(vc, vp)


def test_get_impl_names():
    assert _backend.get_impl("py") is _kernels_py
    assert _backend.get_impl("c") is compiled
    assert _backend.get_impl(None) is _backend.impl
    with pytest.raises(ValueError):
        _backend.get_impl("fortran")
