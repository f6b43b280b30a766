"""The fast path: supertriangular block matrix and its kernel.

For SO(3)/SU(2) the Lie-algebra constraint matrix reduces to one block
bidiagonal matrix per (l, L): scaled-identity diagonal blocks for
K = -L .. L-1, sparse raising blocks on the superdiagonal, and one final
lowering block tied to K = L.  Its kernel is the coupling-coefficient basis:
solve the final block's nullspace, then back-substitute block by block.

Index sets follow ``indexing``: m-tuples (GE) or class representatives
(GE-PI) as lex-sorted arrays of doubled values.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from . import _backend
from .halfint import HalfInt
from .indexing import LVector, enum_classes_K, enum_mtuples_K
from .dims import parity_ok

#: relative pivot threshold for the rank-revealing nullspace step
PIVOT_TOL = 1e-10
#: switch to the sparse elimination above this many final-block columns
DENSE_CUTOFF = 4096


class InternalConsistencyError(RuntimeError):
    """Kernel dimension disagrees with the cardinality formula (a construction bug)."""


@functools.lru_cache(maxsize=4096)
def index_rows(lvec: LVector, kind: str, tK: int) -> np.ndarray:
    """Cached lex-sorted index set at doubled sum tK (read-only array)."""
    if kind == "ge":
        rows = enum_mtuples_K(lvec, HalfInt(tK))
    elif kind == "gepi":
        rows = enum_classes_K(lvec, HalfInt(tK))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    rows.setflags(write=False)
    return rows


def _block_coo(lvec: LVector, kind: str, rows: np.ndarray, cols: np.ndarray, lower: bool):
    impl = _backend.impl
    if kind == "ge":
        return impl.ge_block_coo(rows, cols, lvec.twice_ells, lower)
    return impl.gepi_block_coo(rows, cols, lvec.twice_ells, lvec.block_ids, lower)


def b_super_block(lvec: LVector, kind: str, tK: int) -> scipy.sparse.csr_matrix:
    """Raising block (rows at sum K, columns at K+1): entries
    -(lambda) sqrt((l+m+1)(l-m)) at (m, m with one slot raised)."""
    rows = index_rows(lvec, kind, tK)
    cols = index_rows(lvec, kind, tK + 2)
    ri, ci, vals = _block_coo(lvec, kind, rows, cols, lower=False)
    return scipy.sparse.csr_matrix(
        (vals, (ri, ci)), shape=(rows.shape[0], cols.shape[0])
    )


def b_lower_block(lvec: LVector, kind: str, tK: int) -> scipy.sparse.csr_matrix:
    """Lowering block (rows at sum K, columns at K-1): entries
    +(lambda) sqrt((l-m+1)(l+m)) at (m, m with one slot lowered)."""
    rows = index_rows(lvec, kind, tK)
    cols = index_rows(lvec, kind, tK - 2)
    ri, ci, vals = _block_coo(lvec, kind, rows, cols, lower=True)
    return scipy.sparse.csr_matrix(
        (vals, (ri, ci)), shape=(rows.shape[0], cols.shape[0])
    )


def b_plus_matrix(lvec: LVector, K: HalfInt | int, kind: str = "ge") -> scipy.sparse.csr_matrix:
    """B+_K: maps the index set at K to the one at K+1 (rows at K+1)."""
    return b_lower_block(lvec, kind, HalfInt.of(K).twice + 2)


def b_minus_matrix(lvec: LVector, K: HalfInt | int, kind: str = "ge") -> scipy.sparse.csr_matrix:
    """B-_K: maps the index set at K to the one at K-1 (rows at K-1)."""
    return b_super_block(lvec, kind, HalfInt.of(K).twice - 2)


def w_diag(lvec: LVector, K: HalfInt | int) -> np.ndarray:
    """Diagonal of the count-factorial weight matrix W_K over classes at K."""
    rows = index_rows(lvec, "gepi", HalfInt.of(K).twice)
    out = np.empty(rows.shape[0], dtype=np.float64)
    block_ids = lvec.block_ids
    for i, row in enumerate(rows):
        w = 1.0
        run = 1
        for j in range(1, len(row) + 1):
            if j < len(row) and block_ids[j] == block_ids[j - 1] and row[j] == row[j - 1]:
                run += 1
            else:
                w *= math.factorial(run)
                run = 1
        out[i] = w
    return out


@dataclass
class BlockMatrixUp:
    """M^up for one (l, L): diagonal scalars, raising blocks, final block."""

    lvec: LVector
    L: HalfInt
    kind: str
    empty: bool  # parity mismatch marker: no admissible indices at all
    col_rows: dict[int, np.ndarray]  # tK -> index rows, K = -L..L
    a_diag: dict[int, float]  # tK -> sqrt((L+K+1)(L-K)), K = -L..L-1
    b_super: dict[int, scipy.sparse.csr_matrix]  # tK -> block (K, K+1)
    final_rows: np.ndarray  # index rows at K = L+1
    b_final: scipy.sparse.csr_matrix  # block (L+1, L)

    @property
    def n_cols(self) -> int:
        return sum(r.shape[0] for r in self.col_rows.values())

    @property
    def n_rows(self) -> int:
        if self.empty:
            return 0
        return (
            sum(self.col_rows[tK].shape[0] for tK in self.a_diag)
            + self.final_rows.shape[0]
        )

    def t_columns(self) -> list[int]:
        """Column block keys in ascending K order."""
        return sorted(self.col_rows)


def build_mup(lvec: LVector, L: HalfInt | int, kind: str) -> BlockMatrixUp:
    """Assemble M^up; parity mismatch yields the empty marker, not an error."""
    L = HalfInt.of(L)
    if L.twice < 0:
        raise ValueError("L must be >= 0")
    tL = L.twice
    if not parity_ok(lvec, L):
        return BlockMatrixUp(
            lvec, L, kind, True, {}, {},
            {}, np.empty((0, lvec.n_slots), dtype=np.int64),
            scipy.sparse.csr_matrix((0, 0)),
        )
    col_rows = {tK: index_rows(lvec, kind, tK) for tK in range(-tL, tL + 1, 2)}
    a_diag = {}
    b_super = {}
    for tK in range(-tL, tL, 2):
        # a_K = sqrt((L+K+1)(L-K)), doubled: 0.5 sqrt((tL+tK+2)(tL-tK))
        a_diag[tK] = 0.5 * math.sqrt((tL + tK + 2) * (tL - tK))
        b_super[tK] = b_super_block(lvec, kind, tK)
    final_rows = index_rows(lvec, kind, tL + 2)
    b_final = b_lower_block(lvec, kind, tL + 2)
    return BlockMatrixUp(lvec, L, kind, False, col_rows, a_diag, b_super, final_rows, b_final)


def build_Mup_ge(lvec: LVector, L: HalfInt | int) -> BlockMatrixUp:
    return build_mup(lvec, L, "ge")


def build_Mup_gepi(lvec: LVector, L: HalfInt | int) -> BlockMatrixUp:
    return build_mup(lvec, L, "gepi")


# ---------------------------------------------------------------------------
# nullspace of the final block
# ---------------------------------------------------------------------------


def _nullspace_dense(B: scipy.sparse.csr_matrix, tol: float) -> np.ndarray:
    """Orthonormal nullspace via Householder elimination with column pivoting."""
    nr, nc = B.shape
    if nr == 0:
        return np.eye(nc)
    # QR of B^T: the trailing columns of Q beyond rank(B) span null(B)
    q, r = scipy.linalg.qr(B.toarray().T, mode="full", pivoting=True)[:2]
    diag = np.abs(np.diag(r))
    if diag.size == 0:
        return np.eye(nc)
    rank = int(np.sum(diag > tol * diag[0]))
    return q[:, rank:]


def _nullspace_sparse(B: scipy.sparse.csr_matrix, tol: float) -> np.ndarray:
    """Column-ordered sparse Gaussian elimination with partial pivoting."""
    nr, nc = B.shape
    if nr == 0:
        return np.eye(nc)
    # rows as dicts col->value; per-column row registry for pivot search
    rows = []
    by_col: dict[int, set[int]] = {}
    csr = B.tocsr()
    for i in range(nr):
        sl = slice(csr.indptr[i], csr.indptr[i + 1])
        d = dict(zip(csr.indices[sl].tolist(), csr.data[sl].tolist()))
        rows.append(d)
        for c in d:
            by_col.setdefault(c, set()).add(i)
    max_seen = max((abs(v) for d in rows for v in d.values()), default=0.0)
    active = set(range(nr))
    pivots: list[tuple[int, int]] = []  # (col, row) in elimination order
    for col in range(nc):
        cand = [i for i in by_col.get(col, ()) if i in active]
        if not cand:
            continue
        piv = max(cand, key=lambda i: abs(rows[i].get(col, 0.0)))
        pval = rows[piv].get(col, 0.0)
        if abs(pval) <= tol * max_seen:
            continue
        # normalize pivot row
        prow = rows[piv]
        for c in list(prow):
            prow[c] /= pval
            max_seen = max(max_seen, abs(prow[c]))
        for i in list(by_col.get(col, ())):
            if i == piv or i not in active:
                continue
            factor = rows[i].get(col)
            if factor is None:
                continue
            for c, v in prow.items():
                newv = rows[i].get(c, 0.0) - factor * v
                if abs(newv) < 1e-300:
                    if c in rows[i]:
                        del rows[i][c]
                        by_col[c].discard(i)
                else:
                    if c not in rows[i]:
                        by_col.setdefault(c, set()).add(i)
                    rows[i][c] = newv
                    max_seen = max(max_seen, abs(newv))
        active.discard(piv)
        pivots.append((col, piv))
    pivot_cols = [c for c, _ in pivots]
    free_cols = sorted(set(range(nc)) - set(pivot_cols))
    null = np.zeros((nc, len(free_cols)))
    for k, f in enumerate(free_cols):
        null[f, k] = 1.0
        for col, piv in reversed(pivots):
            s = sum(v * null[c, k] for c, v in rows[piv].items() if c != col)
            null[col, k] = -s
    return null


def final_block_nullspace(
    B: scipy.sparse.csr_matrix, tol: float = PIVOT_TOL, dense_cutoff: int = DENSE_CUTOFF
) -> np.ndarray:
    if B.shape[1] <= dense_cutoff:
        return _nullspace_dense(B, tol)
    return _nullspace_sparse(B, tol)


# ---------------------------------------------------------------------------
# kernel extraction and the coupling basis
# ---------------------------------------------------------------------------


@dataclass
class CouplingBasis:
    """Orthonormal kernel vectors restricted to the support k = sum(m).

    ``vectors`` has one column per basis vector; rows run over the
    concatenation of the index sets at K = -L .. L (ascending K, lex order
    inside each K).
    """

    group: str  # "so3" | "su2" | "o3"
    kind: str  # "ge" | "gepi"
    lvec: LVector
    L: HalfInt
    parity: str | None
    index_rows: dict[int, np.ndarray]  # tK -> (n_K, N)
    vectors: np.ndarray  # (total_support, n_vectors)

    @property
    def n_vectors(self) -> int:
        return self.vectors.shape[1]

    @property
    def support_size(self) -> int:
        return self.vectors.shape[0]

    def t_keys(self) -> list[int]:
        return sorted(self.index_rows)

    def offsets(self) -> dict[int, int]:
        off, pos = {}, 0
        for tK in self.t_keys():
            off[tK] = pos
            pos += self.index_rows[tK].shape[0]
        return off

    def block(self, tK: int) -> np.ndarray:
        """Vector slice over the index set at doubled sum tK."""
        off = self.offsets()[tK]
        n = self.index_rows[tK].shape[0]
        return self.vectors[off : off + n, :]

    def entries(self):
        """Yield (index_row, tK, column_of_coefficients) over the support."""
        for tK in self.t_keys():
            rows = self.index_rows[tK]
            blk = self.block(tK)
            for i in range(rows.shape[0]):
                yield rows[i], tK, blk[i, :]


def _orthonormalize(V: np.ndarray) -> np.ndarray:
    """Deterministic orthonormalization of the columns of V.

    Householder QR with the R diagonal normalized positive, which is the
    Gram-Schmidt orthonormalization of the same columns up to machine
    rounding but runs at BLAS3 speed on large supports.
    """
    if V.shape[1] == 0:
        return np.array(V, dtype=np.float64, copy=True)
    q, r = np.linalg.qr(V, mode="reduced")
    d = np.diagonal(r)
    if np.abs(d).min() < 1e-12 * max(np.abs(d).max(), 1.0):
        raise InternalConsistencyError("kernel vectors became linearly dependent")
    return q * np.sign(d)[None, :]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    for j in range(V.shape[1]):
        col = V[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            V[:, j] = -col
    return V


def solve_kernel(
    M: BlockMatrixUp, tol: float = PIVOT_TOL, dense_cutoff: int = DENSE_CUTOFF
) -> np.ndarray:
    """Kernel of M^up: final-block nullspace then block back-substitution.

    Returns the orthonormal, sign-fixed vectors as an (n_cols, dim) array;
    raises :class:`InternalConsistencyError` when the dimension disagrees
    with the cardinality formula.
    """
    if M.empty:
        return np.zeros((0, 0))
    tL = M.L.twice
    n_L = M.col_rows[tL].shape[0]
    n_L1 = M.final_rows.shape[0]
    expected = n_L - n_L1
    c_L = final_block_nullspace(M.b_final, tol, dense_cutoff)
    if c_L.shape[1] != max(expected, 0):
        raise InternalConsistencyError(
            f"final-block nullspace has dimension {c_L.shape[1]}, "
            f"cardinality formula gives {expected} "
            f"(l={M.lvec}, L={M.L}, kind={M.kind})"
        )
    dim = c_L.shape[1]
    total = M.n_cols
    out = np.zeros((total, dim))
    if dim == 0:
        return out
    offsets = {}
    pos = 0
    for tK in range(-tL, tL + 1, 2):
        offsets[tK] = pos
        pos += M.col_rows[tK].shape[0]
    out[offsets[tL] : offsets[tL] + n_L, :] = c_L
    c_next = c_L
    for tK in range(tL - 2, -tL - 2, -2):
        a = M.a_diag[tK]
        assert a > 0.0, "zero diagonal scalar inside the band"
        c_here = -(M.b_super[tK] @ c_next) / a
        n_here = M.col_rows[tK].shape[0]
        out[offsets[tK] : offsets[tK] + n_here, :] = c_here
        c_next = c_here
    out = _fix_signs(_orthonormalize(out))
    return out


def _basis_from(
    lvec: LVector, L: HalfInt, kind: str, group: str, parity: str | None = None
) -> CouplingBasis:
    M = build_mup(lvec, L, kind)
    vectors = solve_kernel(M)
    if M.empty:
        index_rows_ = {}
        vectors = np.zeros((0, 0))
    else:
        index_rows_ = dict(M.col_rows)
    return CouplingBasis(group, kind, lvec, HalfInt.of(L), parity, index_rows_, vectors)


def _check_group(lvec: LVector, L: HalfInt, group: str) -> None:
    if group in ("so3", "o3"):
        bad = [c for c in lvec.entries if not c.ell.is_integer]
        if bad or not L.is_integer:
            raise ValueError(f"group {group} requires integer angular indices")
    elif group != "su2":
        raise ValueError(f"unknown group {group!r}")


def _resolve_group(lvec: LVector, L: HalfInt, group: str | None) -> str:
    if group is None:
        half = not L.is_integer or any(not c.ell.is_integer for c in lvec.entries)
        return "su2" if half else "so3"
    _check_group(lvec, L, group)
    return group


def ge_basis(lvec: LVector, L: HalfInt | int, group: str | None = None) -> CouplingBasis:
    """Orthonormal GE coupling basis for (l, L)."""
    L = HalfInt.of(L)
    return _basis_from(lvec, L, "ge", _resolve_group(lvec, L, group))


def gepi_basis(lvec: LVector, L: HalfInt | int, group: str | None = None) -> CouplingBasis:
    """Orthonormal GE-PI coupling basis for (l, L)."""
    L = HalfInt.of(L)
    return _basis_from(lvec, L, "gepi", _resolve_group(lvec, L, group))


def o3_basis(
    lvec: LVector, L: HalfInt | int, parity: str, kind: str = "gepi"
) -> CouplingBasis:
    """O(3) basis: the SO(3) basis when parity matches (-1)^sum(l), else empty.

    Only integer angular indices support the reflection extension.
    """
    L = HalfInt.of(L)
    if parity not in ("+", "-"):
        raise ValueError("parity must be '+' or '-'")
    if any(not c.ell.is_integer for c in lvec.entries) or not L.is_integer:
        raise ValueError("O(3) requires integer angular indices")
    natural = "+" if lvec.sum_ell.as_int() % 2 == 0 else "-"
    if parity != natural:
        empty = CouplingBasis(
            "o3", kind, lvec, L, parity, {}, np.zeros((0, 0))
        )
        return empty
    basis = _basis_from(lvec, L, kind, "o3", parity)
    return basis
