import math

import pytest

from conftest import lvecs_over
from gold_tables import PER_ELL, PER_N
from gcgbasis import dims
from gcgbasis.halfint import HalfInt
from gcgbasis.indexing import LVector, total_classes, total_mtuples


def test_gold_table_spot_values():
    assert dims.dim_ge(LVector.of([3] * 8), 0) == 5719
    assert dims.dim_ge(LVector.of([2] * 5), 3) == 70
    assert dims.dim_gepi(LVector.of([2] * 8), 4) == 4
    assert dims.dim_ge(LVector.of([1, 1]), 0) == 1
    # the identical-l=1 family: GE-PI is 1 when L <= N with matching parity
    for n in range(1, 9):
        lv = LVector.of([1] * n)
        for L in range(0, n + 3):
            want = 1 if (L <= n and (n + L) % 2 == 0) else 0
            assert dims.dim_gepi(lv, L) == want


def test_gold_tables_full():
    for ell, rows in PER_ELL.items():
        for L, cols in rows.items():
            for n, (gepi, ge) in cols.items():
                lv = LVector.of([ell] * n)
                assert dims.dim_gepi(lv, L) == gepi
                assert dims.dim_ge(lv, L) == ge
    for n, rows in PER_N.items():
        for L, cols in rows.items():
            for ell, (gepi, ge) in cols.items():
                lv = LVector.of([ell] * n)
                assert dims.dim_gepi(lv, L) == gepi
                assert dims.dim_ge(lv, L) == ge


def test_single_channel():
    lv = LVector.of([2])
    assert dims.dim_ge(lv, 2) == 1
    for L in (0, 1, 3, 4):
        assert dims.dim_ge(lv, L) == 0


def test_explicit_equals_exact():
    for lv in lvecs_over([1, 2, 3, 4, 6], 3):
        for L in dims.admissible_L(lv):
            assert dims.dim_ge_explicit(lv, L) == dims.dim_ge(lv, L)
    # N=1 degenerate case of the collapsed formula
    for tl in (2, 3, 4):
        lv = LVector.of([tl], two=True)
        for tL in range(tl % 2, 2 * tl + 3, 2):
            assert dims.dim_ge_explicit(lv, HalfInt(tL)) == dims.dim_ge(lv, HalfInt(tL))


def test_explicit_out_of_range():
    lv = LVector.of([1, 1])
    assert dims.dim_ge_explicit(lv, 3) == 0
    with pytest.raises(ValueError):
        dims.dim_ge_explicit(LVector.of([1] * 25), 0)


def test_dim_cg():
    assert dims.dim_cg(1, 2, 1) == 1
    assert dims.dim_cg(1, 2, 4) == 0
    assert dims.dim_cg(HalfInt(1), HalfInt(1), 1) == 1
    assert dims.dim_cg(HalfInt(1), 1, 1) == 0  # half-integer sum
    with pytest.raises(ValueError):
        dims.dim_cg(-1, 0, 0)


def test_recursive_examples():
    lv2 = LVector.of([1, 1])
    assert dims.dim_ge_recursive(lv2, lv2, 0) == 3
    lv3 = LVector.of([2, 2, 2])
    assert dims.dim_ge_recursive(lv3, lv3, 2) == 260
    a = LVector.of([(0, 1), (0, 1)])
    b = LVector.of([(1, 1), (1, 1)])
    assert dims.dim_gepi_recursive(a, b, 0) == dims.dim_gepi(a.concat(b), 0)
    with pytest.raises(ValueError):
        dims.dim_gepi_recursive(lv2, lv2, 0)  # intersecting split


def test_recursive_random_splits(rng):
    pool = lvecs_over([1, 2, 3, 4], 3)
    for _ in range(50):
        lv1 = pool[rng.integers(len(pool))]
        lv2 = pool[rng.integers(len(pool))]
        merged = lv1.concat(lv2)
        tL = int(rng.integers(0, merged.sum_ell.twice + 1))
        L = HalfInt(tL if (tL + merged.sum_ell.twice) % 2 == 0 else tL + 1)
        assert dims.dim_ge_recursive(lv1, lv2, L) == dims.dim_ge(merged, L)


def test_recursive_gepi_random_nonintersecting(rng):
    base = lvecs_over([1, 2, 3], 2)
    count = 0
    for _ in range(200):
        lv1 = base[rng.integers(len(base))]
        lv2raw = base[rng.integers(len(base))]
        # disjoint tags guarantee no shared channel
        lv2 = LVector.of([(9, c.ell) for c in lv2raw.entries])
        merged = lv1.concat(lv2)
        tL = int(rng.integers(0, merged.sum_ell.twice + 1))
        L = HalfInt(tL if (tL + merged.sum_ell.twice) % 2 == 0 else tL + 1)
        assert dims.dim_gepi_recursive(lv1, lv2, L) == dims.dim_gepi(merged, L)
        count += 1
        if count >= 50:
            break


def test_order_bounds():
    for lv in lvecs_over([1, 2, 3], 3):
        for L in dims.admissible_L(lv):
            ge = dims.dim_ge(lv, L)
            gepi = dims.dim_gepi(lv, L)
            assert gepi <= ge <= (L.twice + 1) * total_mtuples(lv)


def test_direct_sum_totals():
    for lv in lvecs_over([1, 2, 3, 4], 3):
        ge = sum((L.twice + 1) * dims.dim_ge(lv, L) for L in dims.admissible_L(lv))
        gepi = sum((L.twice + 1) * dims.dim_gepi(lv, L) for L in dims.admissible_L(lv))
        assert ge == total_mtuples(lv)
        assert gepi == total_classes(lv)


def test_var_formulas():
    lv = LVector.of([1] * 9)
    assert dims.var_l(lv, "ge") == pytest.approx(2 * 9 / 3)
    # single-channel blocks: the GE-PI variance degenerates to the GE one
    lv = LVector.of([(0, 2), (1, 1), (2, 3)])
    assert dims.var_l(lv, "gepi") == pytest.approx(dims.var_l(lv, "ge"))
    # one block of length N: N l (N + 2l + 1) / 6
    lv = LVector.of([2] * 5)
    assert dims.var_l(lv, "gepi") == pytest.approx(5 * 2 * (5 + 5) / 6)


def test_asymptotic_accuracy_moderate_n():
    lv = LVector.of([2] * 40)
    est = dims.dim_asymptotic(lv, 0, "ge")
    exact = dims.dim_ge(lv, 0)
    assert exact == 2476761635082894491043465  # frozen from the exact count
    # measured relative error of the leading-order estimate at this size
    assert abs(est - exact) / exact < 0.024


def test_asymptotic_large_values_usable():
    # N=80, l=20 exceeds double-precision normalizers; log-domain survives
    lv = LVector.of([20] * 80)
    est = dims.dim_asymptotic(lv, 0, "gepi")
    assert math.isfinite(est) and est > 0


def test_report_paths():
    lv = LVector.of([2, 2, 2])
    assert dims.report(lv, 0, "gepi", "exact").exact == 1
    assert dims.report(lv, 0, "ge", "explicit").exact == 1
    r = dims.report(lv, 0, "ge", "asymptotic")
    assert r.estimate > 0 and r.var_l > 0
    with pytest.raises(ValueError):
        dims.report(lv, 0, "gepi", "explicit")
    with pytest.raises(ValueError):
        dims.report(lv, 0, "gepi", "recursive")  # single block
    two_block = LVector.of([(0, 1), (0, 1), (1, 1)])
    assert dims.report(two_block, 1, "gepi", "recursive").exact == dims.dim_gepi(two_block, 1)
