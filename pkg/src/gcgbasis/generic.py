"""Group-agnostic constraint matrices and their dense kernels.

Builds the full stacked matrix whose kernel is the space of coupling
coefficients, for any set of Lie-algebra derivative matrices (one per
generator and channel).  This is the desk-scale correctness oracle for the
specialized solver and the entry point for user-supplied groups; everything
here is dense or kron-sparse, with no attempt at performance.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .halfint import HalfInt
from .indexing import LChannel, LVector, interacting_classes
from . import wigner


class UnsupportedGeneratorError(RuntimeError):
    """A generator matrix is defective (no eigenbasis); the eigen route fails."""


@dataclass
class GeneratorSet:
    """Derivative matrices of the representations at the identity.

    ``channels`` maps an :class:`LChannel` to its ``n_dim`` square matrices;
    the matrix size is ``2*ell + 1`` (equivalently the stored dimension for a
    non-rotation group, where 'ell' is just (dim-1)/2 bookkeeping).
    """

    n_dim: int
    channels: dict[LChannel, list[np.ndarray]] = field(default_factory=dict)

    def add(self, channel: LChannel, mats: list[np.ndarray]) -> None:
        mats = [np.asarray(m, dtype=np.complex128) for m in mats]
        if len(mats) != self.n_dim:
            raise ValueError(f"expected {self.n_dim} matrices, got {len(mats)}")
        size = channel.twice_ell + 1
        for m in mats:
            if m.shape != (size, size):
                raise ValueError(
                    f"channel {channel}: matrix shape {m.shape} != ({size}, {size})"
                )
        self.channels[channel] = mats

    def for_channel(self, channel: LChannel) -> list[np.ndarray]:
        try:
            return self.channels[channel]
        except KeyError:
            raise KeyError(f"no derivative matrices for channel {channel}") from None

    def for_ell(self, ell: HalfInt | int) -> list[np.ndarray]:
        """Matrices for a bare angular index (tags ignored)."""
        ell = HalfInt.of(ell)
        plain = LChannel((), ell)
        if plain in self.channels:
            return self.channels[plain]
        for ch, mats in self.channels.items():
            if ch.ell == ell:
                return mats
        raise KeyError(f"no derivative matrices for angular index {ell}")

    # -- constructors --------------------------------------------------

    @staticmethod
    def su2(lvec: LVector, L: HalfInt | int) -> "GeneratorSet":
        """Populate from the Euler-angle derivatives for SO(3)/SU(2)."""
        gens = GeneratorSet(3)
        wanted = set(lvec.entries) | {LChannel((), HalfInt.of(L))}
        for ch in wanted:
            gens.add(ch, [wigner.drho(ch.ell, d) for d in (1, 2, 3)])
        return gens

    # -- JSON interchange ----------------------------------------------

    @staticmethod
    def from_json(doc) -> "GeneratorSet":
        """Read the documented JSON schema (see README: user-supplied groups).

        {"n_dim": int, "channels": [{"tags": [int...],
          "two_ell_or_dim": int, "derivatives": [[[ [re, im], ... ]...]...]}]}
        """
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        gens = GeneratorSet(int(doc["n_dim"]))
        for ch in doc["channels"]:
            tags = tuple(int(t) for t in ch.get("tags", []))
            twice = int(ch["two_ell_or_dim"])
            mats = []
            for dmat in ch["derivatives"]:
                rows = [[complex(e[0], e[1]) for e in row] for row in dmat]
                mats.append(np.array(rows, dtype=np.complex128))
            gens.add(LChannel(tags, HalfInt(twice)), mats)
        return gens

    def to_json(self) -> dict:
        out = {"n_dim": self.n_dim, "channels": []}
        for ch, mats in self.channels.items():
            out["channels"].append(
                {
                    "tags": list(ch.tags),
                    "two_ell_or_dim": ch.twice_ell,
                    "derivatives": [
                        [[[float(e.real), float(e.imag)] for e in row] for row in m]
                        for m in mats
                    ],
                }
            )
        return out


def _resolve_L(gens: GeneratorSet, L) -> tuple[HalfInt, list[np.ndarray]]:
    if isinstance(L, LChannel):
        return L.ell, gens.for_channel(L)
    L = HalfInt.of(L)
    return L, gens.for_ell(L)


def full_mtuples(lvec: LVector) -> np.ndarray:
    """The whole product index set M_l, lex-ordered (doubled values)."""
    ranges = [range(-tl, tl + 1, 2) for tl in lvec.twice_ells.tolist()]
    return np.array(list(itertools.product(*ranges)), dtype=np.int64).reshape(
        -1, lvec.n_slots
    )


def full_classes(lvec: LVector) -> np.ndarray:
    """The whole class set, lex-ordered over block-ascending representatives."""
    per_block = []
    for b, (start, length) in enumerate(lvec.blocks):
        vals = lvec.block_values(b).tolist()
        per_block.append(
            [list(t) for t in itertools.combinations_with_replacement(vals, length)]
        )
    rows = [sum(combo, []) for combo in itertools.product(*per_block)]
    return np.array(rows, dtype=np.int64).reshape(-1, lvec.n_slots)


def build_Md_ge(gens: GeneratorSet, lvec: LVector, L, d: int) -> scipy.sparse.csr_matrix:
    """One generator block of the GE constraint matrix (d in 1..n_dim)."""
    tL, Lmats = _resolve_L(gens, L)
    slot_mats = [gens.for_channel(c) for c in lvec.entries]
    sizes = [c.twice_ell + 1 for c in lvec.entries]
    dimL = tL.twice + 1
    slot_sum = None
    for j in range(lvec.n_slots):
        factors = [
            scipy.sparse.identity(s, format="csr", dtype=np.complex128) for s in sizes
        ]
        factors[j] = scipy.sparse.csr_matrix(slot_mats[j][d - 1].T)
        term = factors[0]
        for f in factors[1:]:
            term = scipy.sparse.kron(term, f, format="csr")
        slot_sum = term if slot_sum is None else slot_sum + term
    return scipy.sparse.kron(
        slot_sum, scipy.sparse.identity(dimL, dtype=np.complex128), format="csr"
    ) - scipy.sparse.kron(
        scipy.sparse.identity(int(np.prod(sizes)), dtype=np.complex128),
        scipy.sparse.csr_matrix(Lmats[d - 1]),
        format="csr",
    )


def build_M_ge(gens: GeneratorSet, lvec: LVector, L) -> scipy.sparse.csr_matrix:
    """The stacked GE constraint matrix over columns (m, k), complex sparse.

    Column ordering is m-major (lex) and k-minor (ascending); the rows stack
    the per-generator blocks in generator order.
    """
    return scipy.sparse.vstack(
        [build_Md_ge(gens, lvec, L, d) for d in range(1, gens.n_dim + 1)],
        format="csr",
    )


def build_Md_gepi(gens: GeneratorSet, lvec: LVector, L, d: int) -> scipy.sparse.csr_matrix:
    """One generator block of the GE-PI constraint matrix (d in 1..n_dim)."""
    tL, Lmats = _resolve_L(gens, L)
    classes = full_classes(lvec)
    n_cls = classes.shape[0]
    dimL = tL.twice + 1
    index = {row.tobytes(): i for i, row in enumerate(classes)}
    slot_mats = [gens.for_channel(c) for c in lvec.entries]
    block_first_slot = [start for start, _ in lvec.blocks]

    rows, cols, vals = [], [], []

    def put(ci, cj, kk, kk2, v):
        if v != 0:
            rows.append(ci * dimL + kk)
            cols.append(cj * dimL + kk2)
            vals.append(v)

    Ld = Lmats[d - 1]
    for ci in range(n_cls):
        rep = classes[ci]
        diag_m = sum(
            slot_mats[j][d - 1][
                (rep[j] + lvec.twice_ells[j]) // 2, (rep[j] + lvec.twice_ells[j]) // 2
            ]
            for j in range(lvec.n_slots)
        )
        for kk in range(dimL):
            for kk2 in range(dimL):
                if kk == kk2:
                    put(ci, ci, kk, kk, diag_m - Ld[kk, kk])
                else:
                    put(ci, ci, kk, kk2, -Ld[kk, kk2])
        for mv in interacting_classes(lvec, rep):
            cj = index.get(mv.target.tobytes())
            if cj is None:
                continue
            mats = slot_mats[block_first_slot[mv.block]][d - 1]
            tl = lvec.block_channel(mv.block).twice_ell
            qi = (mv.q.twice + tl) // 2
            pi = (mv.p.twice + tl) // 2
            v = mv.multiplier * mats[qi, pi]
            for kk in range(dimL):
                put(ci, cj, kk, kk, v)
    return scipy.sparse.csr_matrix(
        (np.array(vals, dtype=np.complex128), (rows, cols)),
        shape=(n_cls * dimL, n_cls * dimL),
    )


def build_M_gepi(gens: GeneratorSet, lvec: LVector, L) -> scipy.sparse.csr_matrix:
    """The stacked GE-PI constraint matrix over columns (class, k)."""
    return scipy.sparse.vstack(
        [build_Md_gepi(gens, lvec, L, d) for d in range(1, gens.n_dim + 1)],
        format="csr",
    )


@dataclass
class DenseKernelBasis:
    """Orthonormal nullspace vectors (columns) and the tolerance used."""

    vectors: np.ndarray
    tol: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.vectors)


def _fix_signs_complex(V: np.ndarray) -> np.ndarray:
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        piv = V[i, j]
        if np.abs(piv) > 0:
            V[:, j] = V[:, j] * (np.conj(piv) / np.abs(piv))
    return V


def kernel_dense(M, tol: float = 1e-10) -> DenseKernelBasis:
    """Orthonormal nullspace basis by dense SVD, rank cut at sigma > tol*max.

    The basis is rotated to a real one when the kernel admits it (always the
    case for the rotation groups in this package); otherwise it stays complex.
    """
    A = M.toarray() if scipy.sparse.issparse(M) else np.asarray(M)
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[1]
    if A.shape[0] == 0:
        null = np.eye(n, dtype=np.complex128)
    else:
        # in economy mode all n right singular vectors are present iff m >= n
        full = A.shape[0] < n
        _, s, vh = np.linalg.svd(A, full_matrices=full)
        cutoff = tol * (s[0] if s.size else 0.0)
        rank = int(np.sum(s > cutoff))
        null = vh[rank:].conj().T
    if null.shape[1] == 0:
        return DenseKernelBasis(np.zeros((n, 0)), tol)
    scale = np.abs(A).max() if A.size else 1.0
    # try to rotate the kernel onto a real basis
    W = np.hstack([null.real, null.imag])
    u, s2, _ = np.linalg.svd(W, full_matrices=False)
    k = null.shape[1]
    if s2.size >= k and s2[k - 1] > 1e-9:
        real_basis = u[:, :k]
        resid = np.abs(A @ real_basis).max() if A.shape[0] else 0.0
        if resid <= max(tol * scale * 10, 1e-9):
            return DenseKernelBasis(_fix_signs_complex(real_basis.astype(np.float64)), tol)
    return DenseKernelBasis(_fix_signs_complex(null), tol)


def kernel_blocks(blocks: list, tol: float = 1e-10) -> DenseKernelBasis:
    """Kernel of a stacked system, pre-reduced through diagonal blocks.

    Any generator block that is numerically diagonal pins the kernel to the
    coordinates where its diagonal vanishes; restricting the remaining blocks
    to those columns is exact and leaves a much smaller dense SVD.  With no
    diagonal blocks this degenerates to :func:`kernel_dense` of the stack.
    """
    blocks = [b.tocsr() if scipy.sparse.issparse(b) else scipy.sparse.csr_matrix(b) for b in blocks]
    n = blocks[0].shape[1]
    keep = np.ones(n, dtype=bool)
    rest = []
    for b in blocks:
        if b.shape[1] != n:
            raise ValueError("blocks must share the column index set")
        off = b - scipy.sparse.diags(b.diagonal())
        if off.nnz == 0 or np.abs(off.data).max() <= 1e-300:
            diag = b.diagonal()
            scale = np.abs(diag).max() if n else 0.0
            keep &= np.abs(diag) <= tol * max(scale, 1.0)
        else:
            rest.append(b)
    (support,) = np.nonzero(keep)
    if support.size == 0:
        return DenseKernelBasis(np.zeros((n, 0)), tol)
    if not rest:
        inner = np.eye(support.size, dtype=np.float64)
        basis = DenseKernelBasis(inner, tol)
    else:
        reduced = scipy.sparse.vstack([b[:, support] for b in rest], format="csr")
        reduced = reduced[reduced.getnnz(axis=1) > 0]
        basis = kernel_dense(reduced, tol)
    out = np.zeros((n, basis.dim), dtype=basis.vectors.dtype)
    out[support, :] = basis.vectors
    return DenseKernelBasis(out, tol)


def kernel_Md_eigen(gens: GeneratorSet, lvec: LVector, L, d: int) -> DenseKernelBasis:
    """Kernel of the single-generator block via sums of eigenvalues.

    Tensor products of slot eigenvectors (of the transposed derivative) and a
    representation eigenvector whose eigenvalues satisfy sum - eps_L = 0.
    Cross-check oracle only; dense and unguarded.
    """
    tL, Lmats = _resolve_L(gens, L)
    slot_mats = [gens.for_channel(c)[d - 1] for c in lvec.entries]
    Ld = Lmats[d - 1]

    def eig_or_fail(mat, what):
        w, v = np.linalg.eig(mat)
        if np.linalg.matrix_rank(v, tol=1e-9) < mat.shape[0]:
            raise UnsupportedGeneratorError(f"defective generator matrix for {what}")
        return w, v

    slot_eigs = [eig_or_fail(m.T, f"slot {j}") for j, m in enumerate(slot_mats)]
    L_w, L_v = eig_or_fail(Ld, "the target representation")
    scale = max(
        [np.abs(w).max() if w.size else 0.0 for w, _ in slot_eigs] + [np.abs(L_w).max(), 1.0]
    )
    vectors = []
    for combo in itertools.product(*[range(len(w)) for w, _ in slot_eigs]):
        eps = sum(slot_eigs[j][0][c] for j, c in enumerate(combo))
        for kL in range(len(L_w)):
            if abs(eps - L_w[kL]) <= 1e-9 * scale:
                vec = np.array([1.0 + 0j])
                for j, c in enumerate(combo):
                    vec = np.kron(vec, slot_eigs[j][1][:, c])
                vec = np.kron(vec, L_v[:, kL])
                vectors.append(vec)
    if not vectors:
        dim_total = int(np.prod([m.shape[0] for m in slot_mats])) * Ld.shape[0]
        return DenseKernelBasis(np.zeros((dim_total, 0)), 1e-9)
    V = np.stack(vectors, axis=1)
    q, r = np.linalg.qr(V, mode="reduced")
    keep = np.abs(np.diagonal(r)) > 1e-9 * np.abs(np.diagonal(r)).max()
    return DenseKernelBasis(q[:, keep], 1e-9)
