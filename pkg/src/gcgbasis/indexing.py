"""Channel indices, m-tuple and permutation-class enumeration, count vectors.

Conventions used throughout the package:

* every magnetic index is stored doubled (``2*m`` as an int64), so SU(2)
  half-integers stay exact;
* an m-tuple is one row of an ``(n, N)`` int64 array, and enumerations are
  returned as such arrays in lexicographic row order;
* a class representative is an m-tuple sorted ascending inside every block
  of the owning :class:`LVector`.

Cardinalities are computed from generating polynomials with Python integers,
never by enumeration, so they are exact at any size.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _backend
from .halfint import HalfInt


@dataclass(frozen=True)
class LChannel:
    """One-particle channel: rotation-independent tags plus the angular index."""

    tags: tuple[int, ...]
    ell: HalfInt

    def __post_init__(self):
        if self.ell.twice < 0:
            raise ValueError("channel angular index must be >= 0")

    @property
    def twice_ell(self) -> int:
        return self.ell.twice

    @property
    def sort_key(self):
        return (self.tags, self.ell.twice)

    def __str__(self) -> str:
        if self.tags:
            return f"({','.join(map(str, self.tags))};{self.ell})"
        return str(self.ell)


class Move(NamedTuple):
    """One interacting-class move: shift a count unit p -> q inside a block."""

    block: int
    p: HalfInt
    q: HalfInt
    target: np.ndarray  # class representative reached by the move
    multiplier: int  # occurrence count of q in the target's block


@dataclass(frozen=True)
class LVector:
    """Canonically sorted channel vector with its minimal partition.

    ``entries`` are sorted by (tags, ell) and ``blocks`` lists (start, length)
    spans of equal channels; equal channels are always contiguous.
    """

    entries: tuple[LChannel, ...]
    blocks: tuple[tuple[int, int], ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(spec: Iterable, two: bool = False) -> "LVector":
        """Build from a list of ells or of (tag..., ell) tuples.

        With ``two=True`` the numbers are interpreted as doubled (SU(2)).
        """
        channels = []
        for item in spec:
            if isinstance(item, LChannel):
                channels.append(item)
                continue
            if isinstance(item, (tuple, list)):
                *tags, ell = item
            else:
                tags, ell = [], item
            ell = HalfInt(int(ell)) if two else HalfInt.of(ell)
            channels.append(LChannel(tuple(int(t) for t in tags), ell))
        return minimal_partition(channels)

    # -- basic views -------------------------------------------------------

    @property
    def n_slots(self) -> int:
        return len(self.entries)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sum_ell(self) -> HalfInt:
        return HalfInt(sum(c.twice_ell for c in self.entries))

    @functools.cached_property
    def twice_ells(self) -> np.ndarray:
        """Doubled ell per slot, int64."""
        return np.array([c.twice_ell for c in self.entries], dtype=np.int64)

    @functools.cached_property
    def block_ids(self) -> np.ndarray:
        """Block id per slot, int64."""
        out = np.empty(self.n_slots, dtype=np.int64)
        for b, (start, length) in enumerate(self.blocks):
            out[start : start + length] = b
        return out

    def block_channel(self, b: int) -> LChannel:
        return self.entries[self.blocks[b][0]]

    def block_values(self, b: int) -> np.ndarray:
        """Doubled m values admissible in block b, ascending."""
        tl = self.block_channel(b).twice_ell
        return np.arange(-tl, tl + 1, 2, dtype=np.int64)

    def sub(self, lo: int, hi: int) -> "LVector":
        """The LVector formed by slots [lo, hi) (already sorted)."""
        return minimal_partition(self.entries[lo:hi])

    def concat(self, other: "LVector") -> "LVector":
        return minimal_partition(self.entries + other.entries)

    def intersects(self, other: "LVector") -> bool:
        return bool(set(self.entries) & set(other.entries))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.entries) + ")"


def minimal_partition(entries: Sequence[LChannel]) -> LVector:
    """Sort channels canonically and split into maximal runs of equal channels."""
    if not entries:
        raise ValueError("channel vector must be non-empty")
    ordered = tuple(sorted(entries, key=lambda c: c.sort_key))
    blocks = []
    start = 0
    for i in range(1, len(ordered) + 1):
        if i == len(ordered) or ordered[i] != ordered[start]:
            blocks.append((start, i - start))
            start = i
    return LVector(ordered, tuple(blocks))


@dataclass(frozen=True)
class CountVector:
    """Occurrence counts per block: counts[j][k] is the number of slots in
    block j holding the k-th admissible value (-ell .. ell ascending)."""

    counts: tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _lexsort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def enum_mtuples_K(lvec: LVector, K: HalfInt | int) -> np.ndarray:
    """All m-tuples with sum K, as a lex-sorted (n, N) array of doubled values."""
    tK = HalfInt.of(K).twice
    values = [np.arange(-tl, tl + 1, 2, dtype=np.int64) for tl in lvec.twice_ells]
    return _backend.impl.product_tuples_with_sum(values, tK)


def enum_classes_K(lvec: LVector, K: HalfInt | int) -> np.ndarray:
    """All class representatives with sum K, lex-sorted (n, N) doubled array."""
    tK = HalfInt.of(K).twice
    shape = [(length, lvec.block_channel(b).twice_ell)
             for b, (start, length) in enumerate(lvec.blocks)]

    def block_tuples(b: int, t: int) -> np.ndarray:
        length, tl = shape[b]
        values = np.arange(-tl, tl + 1, 2, dtype=np.int64)
        return _backend.impl.ascending_tuples_with_sum(values, length, t)

    if lvec.n_blocks == 1:
        return block_tuples(0, tK)

    # cartesian assembly over blocks, pruning partial sums by suffix bounds
    suffix_hi = [0] * (lvec.n_blocks + 1)
    for b in range(lvec.n_blocks - 1, -1, -1):
        length, tl = shape[b]
        suffix_hi[b] = suffix_hi[b + 1] + length * tl
    partial: dict[int, list[np.ndarray]] = {0: [np.empty((1, 0), dtype=np.int64)]}
    for b in range(lvec.n_blocks):
        length, tl = shape[b]
        nxt: dict[int, list[np.ndarray]] = {}
        for s, chunks in partial.items():
            lo = max(-length * tl, tK - s - suffix_hi[b + 1])
            hi = min(length * tl, tK - s + suffix_hi[b + 1])
            for t in range(lo, hi + 1, 2):
                rows = block_tuples(b, t)
                if rows.shape[0] == 0:
                    continue
                for head in chunks:
                    nh, nt = head.shape[0], rows.shape[0]
                    combined = np.hstack(
                        [np.repeat(head, nt, axis=0), np.tile(rows, (nh, 1))]
                    )
                    nxt.setdefault(s + t, []).append(combined)
        partial = nxt
    if tK not in partial:
        return np.empty((0, lvec.n_slots), dtype=np.int64)
    return _lexsort_rows(np.vstack(partial[tK]))


# ---------------------------------------------------------------------------
# cardinalities via generating polynomials (exact big integers)
# ---------------------------------------------------------------------------


def _conv(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


@functools.lru_cache(maxsize=None)
def mtuple_sum_poly(lvec: LVector) -> tuple[int, ...]:
    """Coefficient c[i] = #{m-tuples with doubled sum = -2*sum(l) + 2*i}."""
    poly = [1]
    for tl in lvec.twice_ells:
        poly = _conv(poly, [1] * (tl + 1))
    return tuple(poly)


@functools.lru_cache(maxsize=None)
def _gauss_binom_coeffs(n_slots: int, twice_ell: int) -> tuple[int, ...]:
    """Coefficients of the Gaussian binomial [n_slots + twice_ell, twice_ell]_x.

    c[t] counts the ascending n_slots-tuples over values 0..twice_ell with
    value sum t, i.e. the bounded-part partitions behind the class counts.
    """
    width = n_slots * twice_ell + 1
    # unbounded occurrences per value, total slots fixed: iterate values,
    # tracking (slots used, sum) with a 2-D table
    table = [[0] * width for _ in range(n_slots + 1)]
    table[0][0] = 1
    for value in range(twice_ell + 1):
        nxt = [[0] * width for _ in range(n_slots + 1)]
        for used in range(n_slots + 1):
            row = table[used]
            for t in range(width):
                v = row[t]
                if not v:
                    continue
                c = 0
                while used + c <= n_slots and t + c * value < width:
                    nxt[used + c][t + c * value] += v
                    c += 1
        table = nxt
    return tuple(table[n_slots])


@functools.lru_cache(maxsize=None)
def class_sum_poly(lvec: LVector) -> tuple[int, ...]:
    """Coefficient c[i] = #{classes with doubled sum = -2*sum(l) + 2*i}."""
    poly = [1]
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        coeffs = list(_gauss_binom_coeffs(length, tl))
        poly = _conv(poly, coeffs)
    return tuple(poly)


def _coeff_at(poly: tuple[int, ...], lvec: LVector, tK: int) -> int:
    t_sum = int(lvec.sum_ell.twice)
    if (tK + t_sum) % 2 != 0:
        return 0
    idx = (tK + t_sum) // 2
    if idx < 0 or idx >= len(poly):
        return 0
    return poly[idx]


def card_mtuples_K(lvec: LVector, K: HalfInt | int) -> int:
    """|{m in M_l : sum m = K}| without enumeration; exact big integer."""
    return _coeff_at(mtuple_sum_poly(lvec), lvec, HalfInt.of(K).twice)


def card_classes_K(lvec: LVector, K: HalfInt | int) -> int:
    """Number of permutation classes with sum K; exact big integer."""
    return _coeff_at(class_sum_poly(lvec), lvec, HalfInt.of(K).twice)


def total_mtuples(lvec: LVector) -> int:
    """prod_i (2 l_i + 1)."""
    out = 1
    for tl in lvec.twice_ells:
        out *= int(tl) + 1
    return out


def total_classes(lvec: LVector) -> int:
    """prod_j C(N_j + 2 l_j, 2 l_j)."""
    import math

    out = 1
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        out *= math.comb(length + tl, tl)
    return out


# ---------------------------------------------------------------------------
# count vectors and interacting classes
# ---------------------------------------------------------------------------


def is_class_rep(lvec: LVector, row: np.ndarray) -> bool:
    """True when the tuple is ascending inside every block and in range."""
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        seg = row[start : start + length]
        if np.any(np.abs(seg) > tl) or np.any((seg + tl) % 2 != 0):
            return False
        if np.any(np.diff(seg) < 0):
            return False
    return True


def count_vector(lvec: LVector, class_row: np.ndarray) -> CountVector:
    """Occurrence-count encoding of a class representative."""
    counts = []
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        seg = class_row[start : start + length]
        lam = [0] * (tl + 1)
        for tm in seg:
            lam[(int(tm) + tl) // 2] += 1
        counts.append(tuple(lam))
    return CountVector(tuple(counts))


def class_of(lvec: LVector, cv: CountVector) -> np.ndarray:
    """Inverse of :func:`count_vector`."""
    if len(cv.counts) != lvec.n_blocks:
        raise ValueError("count vector has wrong number of blocks")
    row = np.empty(lvec.n_slots, dtype=np.int64)
    pos = 0
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        lam = cv.counts[b]
        if len(lam) != tl + 1 or sum(lam) != length:
            raise ValueError(f"block {b}: counts do not sum to the block length")
        for k, c in enumerate(lam):
            tm = -tl + 2 * k
            row[pos : pos + c] = tm
            pos += c
    return row


def interacting_classes(lvec: LVector, class_row: np.ndarray) -> list[Move]:
    """All classes reachable by moving one count unit p -> q within a block.

    Returns moves with lambda_{m,p} > 0 only; the multiplier is the count of
    the destination value q in the target class (block-local).
    """
    moves = []
    for b, (start, length) in enumerate(lvec.blocks):
        tl = lvec.block_channel(b).twice_ell
        seg = class_row[start : start + length]
        present = sorted(set(int(v) for v in seg))
        values = range(-tl, tl + 1, 2)
        for tp in present:
            for tq in values:
                if tq == tp:
                    continue
                target = class_row.copy()
                tgt_seg = target[start : start + length]
                # remove one p, add one q, keep the block ascending
                idx = int(np.searchsorted(tgt_seg, tp))
                tgt_list = list(tgt_seg)
                tgt_list.pop(idx)
                ins = int(np.searchsorted(np.array(tgt_list), tq))
                tgt_list.insert(ins, tq)
                target[start : start + length] = tgt_list
                multiplier = tgt_list.count(tq)
                moves.append(
                    Move(b, HalfInt(tp), HalfInt(tq), target, multiplier)
                )
    return moves
