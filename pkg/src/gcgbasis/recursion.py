"""Recursive assembly of coupling bases from sub-bases and pairwise couplings.

A basis over a concatenated channel vector is produced by contracting two
sub-bases with the pairwise coupling coefficients for every admissible
(L1, L2) window.  For GE this yields a basis outright; for GE-PI it yields a
basis when the two parts share no channel (which holds between minimal-
partition blocks) and a spanning set otherwise, reduced by an SVD.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .dims import admissible_L, dim_cg
from .halfint import HalfInt
from .indexing import LVector, minimal_partition
from .mup import CouplingBasis, ge_basis, gepi_basis, index_rows


@dataclass
class CoupledBasis:
    """A coupled family with per-vector provenance (L1, i1, L2, i2)."""

    basis: CouplingBasis
    provenance: list[tuple[HalfInt, int, HalfInt, int]]

    @property
    def n_vectors(self) -> int:
        return self.basis.n_vectors


@functools.lru_cache(maxsize=None)
def _cg_table(tL1: int, tL2: int, tL: int) -> dict[tuple[int, int], float]:
    """Pairwise coupling coefficients keyed by (2*k1, 2*k2); empty if none."""
    if dim_cg(HalfInt(tL1), HalfInt(tL2), HalfInt(tL)) == 0:
        return {}
    pair = LVector.of([HalfInt(tL1), HalfInt(tL2)])
    basis = ge_basis(pair, HalfInt(tL))
    swapped = pair.entries[0].twice_ell != tL1  # canonical sorting may flip
    table: dict[tuple[int, int], float] = {}
    for row, tK, coeffs in basis.entries():
        k1, k2 = (int(row[1]), int(row[0])) if swapped else (int(row[0]), int(row[1]))
        table[(k1, k2)] = float(coeffs[0])
    return table


def _merge_permutation(lv1: LVector, lv2: LVector) -> tuple[LVector, list[int]]:
    """Sorted concatenation and, per merged slot, its source position."""
    entries = list(lv1.entries) + list(lv2.entries)
    order = sorted(range(len(entries)), key=lambda i: (entries[i].sort_key, i))
    merged = minimal_partition(entries)
    return merged, order


def couple_pair(
    b1: CouplingBasis | list[CouplingBasis],
    b2: CouplingBasis | list[CouplingBasis],
    L: HalfInt | int,
) -> CoupledBasis:
    """Contract two sub-bases (or families of them) to target order L."""
    ones = [b1] if isinstance(b1, CouplingBasis) else list(b1)
    twos = [b2] if isinstance(b2, CouplingBasis) else list(b2)
    if not ones or not twos:
        raise ValueError("empty basis family")
    kind = ones[0].kind
    if any(b.kind != kind for b in ones + twos):
        raise ValueError("mixed GE/GE-PI inputs cannot be coupled")
    L = HalfInt.of(L)
    lv1, lv2 = ones[0].lvec, twos[0].lvec
    merged, order = _merge_permutation(lv1, lv2)
    tL = L.twice

    # output layout over the merged support
    out_rows = {tK: index_rows(merged, kind, tK) for tK in range(-tL, tL + 1, 2)}
    offsets: dict[int, int] = {}
    lookup: dict[int, dict[bytes, int]] = {}
    pos = 0
    for tK in range(-tL, tL + 1, 2):
        offsets[tK] = pos
        lookup[tK] = {r.tobytes(): i for i, r in enumerate(out_rows[tK])}
        pos += out_rows[tK].shape[0]
    total = pos

    columns: list[np.ndarray] = []
    provenance: list[tuple[HalfInt, int, HalfInt, int]] = []
    n1, n2 = lv1.n_slots, lv2.n_slots
    for f1 in ones:
        for f2 in twos:
            cg = _cg_table(f1.L.twice, f2.L.twice, tL)
            if not cg or f1.n_vectors == 0 or f2.n_vectors == 0:
                continue
            pair_cols = np.zeros((total, f1.n_vectors * f2.n_vectors))
            for row1, tK1, c1 in f1.entries():
                for row2, tK2, c2 in f2.entries():
                    w = cg.get((tK1, tK2))
                    if w is None:
                        continue
                    concat = np.concatenate([row1, row2])
                    key = concat[order]
                    if kind == "gepi":
                        key = _canonical(merged, key)
                    idx = lookup[tK1 + tK2].get(key.tobytes())
                    if idx is None:
                        continue
                    pair_cols[offsets[tK1 + tK2] + idx, :] += w * np.outer(c1, c2).ravel()
            columns.append(pair_cols)
            provenance.extend(
                (f1.L, i1, f2.L, i2)
                for i1 in range(f1.n_vectors)
                for i2 in range(f2.n_vectors)
            )
    vectors = (
        np.hstack(columns) if columns else np.zeros((total, 0))
    )
    group = ones[0].group if ones[0].group == twos[0].group else "su2"
    basis = CouplingBasis(group, kind, merged, L, None, out_rows, vectors)
    return CoupledBasis(basis, provenance)


def _canonical(lvec: LVector, row: np.ndarray) -> np.ndarray:
    out = row.copy()
    for start, length in lvec.blocks:
        out[start : start + length] = np.sort(out[start : start + length])
    return out


def dedup_span(vectors: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the span of the given column vectors (SVD cut)."""
    if vectors.shape[1] == 0:
        return vectors.copy()
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0))
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def _family(lvec: LVector, kind: str) -> list[CouplingBasis]:
    """Direct-solver bases for every admissible L of one channel vector."""
    make = ge_basis if kind == "ge" else gepi_basis
    out = []
    for L in admissible_L(lvec):
        b = make(lvec, L)
        if b.n_vectors:
            out.append(b)
    return out


def _assemble_family_ge(lvec: LVector) -> list[CouplingBasis]:
    if lvec.n_slots == 1:
        return _family(lvec, "ge")
    half = lvec.n_slots // 2
    left = _assemble_family_ge(lvec.sub(0, half))
    right = _assemble_family_ge(lvec.sub(half, lvec.n_slots))
    out = []
    merged = lvec
    for L in admissible_L(merged):
        coupled = couple_pair(left, right, L)
        if coupled.n_vectors:
            out.append(coupled.basis)
    return out


def assemble_ge(lvec: LVector, L: HalfInt | int) -> CoupledBasis:
    """GE basis assembled over a balanced binary split of the channels."""
    L = HalfInt.of(L)
    if lvec.n_slots == 1:
        b = ge_basis(lvec, L)
        return CoupledBasis(b, [(L, i, L, i) for i in range(b.n_vectors)])
    half = lvec.n_slots // 2
    left = _assemble_family_ge(lvec.sub(0, half))
    right = _assemble_family_ge(lvec.sub(half, lvec.n_slots))
    return couple_pair(left, right, L)


def assemble_gepi(lvec: LVector, L: HalfInt | int) -> CoupledBasis:
    """GE-PI basis from per-block direct bases coupled across blocks.

    Minimal-partition blocks never intersect, so the coupled family is a
    basis without any deduplication.
    """
    L = HalfInt.of(L)
    if lvec.n_blocks == 1:
        b = gepi_basis(lvec, L)
        return CoupledBasis(b, [(L, i, L, i) for i in range(b.n_vectors)])
    block_lvs = [lvec.sub(start, start + length) for start, length in lvec.blocks]
    families = [_family(lv, "gepi") for lv in block_lvs]
    # every single-block family is non-empty: the top order always has dim 1
    current, current_lv = families[0], block_lvs[0]
    for lv, fam in zip(block_lvs[1:-1], families[1:-1]):
        current_lv = current_lv.concat(lv)
        current = [
            cb.basis
            for Lmid in admissible_L(current_lv)
            if (cb := couple_pair(current, fam, Lmid)).n_vectors
        ]
    return couple_pair(current, families[-1], L)
