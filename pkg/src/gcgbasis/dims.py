"""Exact, explicit, recursive and asymptotic dimensions of GE / GE-PI spaces.

Exact counts are cardinality differences of the sum-constrained index sets
(computed from generating polynomials, arbitrary precision).  The explicit
inclusion-exclusion formula and the pairwise recursion are provided as
independent routes to the same numbers; the asymptotic estimates implement
the leading Gaussian term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .halfint import HalfInt
from .indexing import (
    LVector,
    card_classes_K,
    card_mtuples_K,
    total_classes,
    total_mtuples,
)


@dataclass(frozen=True)
class DimReport:
    """Result of one dimension query."""

    lvec: LVector
    L: HalfInt
    kind: str  # "ge" | "gepi"
    exact: int | None
    method: str  # cardinality-difference | inclusion-exclusion | recursive | asymptotic
    estimate: float | None = None
    var_l: float | None = None


def parity_ok(lvec: LVector, L: HalfInt) -> bool:
    """True when L + sum(l) is an integer (otherwise every dimension is 0)."""
    return (L.twice + lvec.sum_ell.twice) % 2 == 0


def admissible_L(lvec: LVector) -> list[HalfInt]:
    """All L with the right parity in [0 or 1/2, sum(l)]."""
    t_sum = lvec.sum_ell.twice
    start = t_sum % 2
    return [HalfInt(t) for t in range(start, t_sum + 1, 2)]


def dim_ge(lvec: LVector, L: HalfInt | int) -> int:
    """dim of the GE space: |M_{l,L}| - |M_{l,L+1}|; 0 on parity mismatch."""
    L = HalfInt.of(L)
    if L.twice < 0:
        raise ValueError("L must be >= 0")
    if not parity_ok(lvec, L):
        return 0
    return card_mtuples_K(lvec, L) - card_mtuples_K(lvec, L + 1)


def dim_gepi(lvec: LVector, L: HalfInt | int) -> int:
    """dim of the GE-PI space: class-count difference; 0 on parity mismatch."""
    L = HalfInt.of(L)
    if L.twice < 0:
        raise ValueError("L must be >= 0")
    if not parity_ok(lvec, L):
        return 0
    return card_classes_K(lvec, L) - card_classes_K(lvec, L + 1)


def dim(lvec: LVector, L: HalfInt | int, kind: str) -> int:
    if kind == "ge":
        return dim_ge(lvec, L)
    if kind == "gepi":
        return dim_gepi(lvec, L)
    raise ValueError(f"unknown kind {kind!r}")


MAX_EXPLICIT_N = 24


def dim_ge_explicit(lvec: LVector, L: HalfInt | int) -> int:
    """GE dimension via the signed-binomial inclusion-exclusion formula.

    Sums (-1)^(1+|S|) C(L + sum(l) - sum_{s in S}(2 l_s + 1) + N - 1, N - 2)
    over all subsets S of the slots, with out-of-range binomials set to 0.
    """
    L = HalfInt.of(L)
    n = lvec.n_slots
    if n > MAX_EXPLICIT_N:
        raise ValueError(f"N={n} too large for the 2^N-term formula (max {MAX_EXPLICIT_N})")
    if not parity_ok(lvec, L):
        return 0
    t_base = (L.twice + lvec.sum_ell.twice) // 2  # L + sum(l), an integer
    sizes = [int(tl) + 1 for tl in lvec.twice_ells]  # 2 l_s + 1

    def comb0(top: int, k: int) -> int:
        return math.comb(top, k) if 0 <= k <= top else 0

    total = 0
    for mask in range(1 << n):
        removed = 0
        bits = 0
        mm = mask
        while mm:
            low = mm & -mm
            removed += sizes[low.bit_length() - 1]
            bits += 1
            mm ^= low
        top = t_base - removed + n - 1
        if n >= 2:
            sign = -1 if bits % 2 == 0 else 1  # (-1)^(1+|S|)
            total += sign * comb0(top, n - 2)
        else:
            # N=1: the collapsed formula degenerates; take the cardinality
            # difference of the inclusion-exclusion sums, sign (-1)^|S|
            sign = 1 if bits % 2 == 0 else -1
            total += sign * (comb0(top, 0) - comb0(top + 1, 0))
    return total


def dim_cg(L1: HalfInt | int, L2: HalfInt | int, L: HalfInt | int) -> int:
    """Pairwise coupling multiplicity: 1 inside the triangle window, else 0."""
    t1, t2, t = HalfInt.of(L1).twice, HalfInt.of(L2).twice, HalfInt.of(L).twice
    if min(t1, t2, t) < 0:
        raise ValueError("angular indices must be >= 0")
    if (t1 + t2 + t) % 2 != 0:
        return 0
    return 1 if abs(t1 - t2) <= t <= t1 + t2 else 0


def dim_ge_recursive(lvec1: LVector, lvec2: LVector, L: HalfInt | int) -> int:
    """GE dimension of the concatenation from the two sub-vectors.

    Double sum over (L1, L2) in the triangle window of products of
    sub-dimensions; equals dim_ge(concat, L).
    """
    L = HalfInt.of(L)
    total = 0
    for L1 in admissible_L(lvec1):
        d1 = dim_ge(lvec1, L1)
        if d1 == 0:
            continue
        lo = abs(L.twice - L1.twice)
        hi = min(lvec2.sum_ell.twice, L1.twice + L.twice)
        for t2 in range(lo, hi + 1, 2):
            total += d1 * dim_ge(lvec2, HalfInt(t2))
    return total


def dim_gepi_recursive(lvec1: LVector, lvec2: LVector, L: HalfInt | int) -> int:
    """GE-PI dimension of the concatenation of two non-intersecting vectors."""
    if lvec1.intersects(lvec2):
        raise ValueError("sub-vectors share a channel; the recursion is invalid there")
    L = HalfInt.of(L)
    total = 0
    for L1 in admissible_L(lvec1):
        d1 = dim_gepi(lvec1, L1)
        if d1 == 0:
            continue
        lo = abs(L.twice - L1.twice)
        hi = min(lvec2.sum_ell.twice, L1.twice + L.twice)
        for t2 in range(lo, hi + 1, 2):
            total += d1 * dim_gepi(lvec2, HalfInt(t2))
    return total


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------


def var_l(lvec: LVector, kind: str) -> float:
    """Variance of the index sum: sum l(l+1)/3 (GE) or the block form
    sum N_j l_j (N_j + 2 l_j + 1)/6 (GE-PI)."""
    if kind == "ge":
        return sum((tl / 2.0) * (tl / 2.0 + 1.0) / 3.0 for tl in lvec.twice_ells)
    if kind == "gepi":
        out = 0.0
        for b, (start, length) in enumerate(lvec.blocks):
            l = lvec.block_channel(b).twice_ell / 2.0
            out += length * l * (length + 2.0 * l + 1.0) / 6.0
        return out
    raise ValueError(f"unknown kind {kind!r}")


def _log_normalizer(lvec: LVector, kind: str) -> float:
    if kind == "ge":
        return sum(math.log(int(tl) + 1) for tl in lvec.twice_ells)
    out = 0.0
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        out += math.lgamma(length + tl + 1) - math.lgamma(length + 1) - math.lgamma(tl + 1)
    return out


def dim_asymptotic(lvec: LVector, L: HalfInt | int, kind: str) -> float:
    """Leading-order estimate: normalizer * (2L+1) / (2 sqrt(2 pi) Var^(3/2))."""
    L = HalfInt.of(L)
    var = var_l(lvec, kind)
    log_est = (
        _log_normalizer(lvec, kind)
        + math.log(L.twice + 1.0)
        - math.log(2.0 * math.sqrt(2.0 * math.pi))
        - 1.5 * math.log(var)
    )
    return math.exp(log_est)


def report(lvec: LVector, L: HalfInt | int, kind: str, method: str = "exact") -> DimReport:
    """One-stop dimension query used by the CLI."""
    L = HalfInt.of(L)
    if method == "exact":
        return DimReport(lvec, L, kind, dim(lvec, L, kind), "cardinality-difference")
    if method == "explicit":
        if kind != "ge":
            raise ValueError("the explicit inclusion-exclusion formula exists for GE only")
        return DimReport(lvec, L, kind, dim_ge_explicit(lvec, L), "inclusion-exclusion")
    if method == "recursive":
        if lvec.n_slots < 2:
            raise ValueError("recursive method needs at least two channels")
        if kind == "ge":
            half = lvec.n_slots // 2
            v1, v2 = lvec.sub(0, half), lvec.sub(half, lvec.n_slots)
            value = dim_ge_recursive(v1, v2, L)
        else:
            if lvec.n_blocks < 2:
                raise ValueError(
                    "recursive GE-PI dimensions need a non-intersecting split; "
                    "this channel vector has a single block"
                )
            split = lvec.blocks[lvec.n_blocks // 2][0]
            v1, v2 = lvec.sub(0, split), lvec.sub(split, lvec.n_slots)
            value = dim_gepi_recursive(v1, v2, L)
        return DimReport(lvec, L, kind, value, "recursive")
    if method == "asymptotic":
        return DimReport(
            lvec,
            L,
            kind,
            None,
            "asymptotic",
            estimate=dim_asymptotic(lvec, L, kind),
            var_l=var_l(lvec, kind),
        )
    raise ValueError(f"unknown method {method!r}")
