"""Independent checks on generated bases.

Everything here validates a finished basis through a route that does not
share code with the solver: representation-level identities sampled at random
group elements, spatial evaluation on point sets, exact direct-sum counting,
and subspace comparison against the dense generic engine.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import generic, wigner
from .dims import admissible_L, dim_ge, dim_gepi
from .halfint import HalfInt
from .indexing import LVector, total_classes, total_mtuples
from .mup import CouplingBasis

#: residual budget for the sampled identities
RESIDUAL_TOL = 1e-9
#: row-space guard for the dense checks
DENSE_GUARD = 1000


@dataclass
class VerificationReport:
    """Outcome of a batch of checks; deterministic given the seed."""

    seed: int
    checks: list[dict] = field(default_factory=list)

    def add(self, name: str, value, threshold, passed: bool) -> None:
        self.checks.append(
            {"name": name, "value": value, "threshold": threshold, "pass": bool(passed)}
        )

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "ok": self.ok, "checks": self.checks}, indent=2)


def _sample_euler(rng: np.random.Generator, su2: bool) -> tuple[float, float, float]:
    span = 4.0 * math.pi if su2 else 2.0 * math.pi
    return (
        float(rng.uniform(0.0, span)),
        float(rng.uniform(0.0, math.pi)),
        float(rng.uniform(0.0, span)),
    )


def _apply_rep_transpose(lvec: LVector, angles, C: np.ndarray) -> np.ndarray:
    """Contract (prod_i D^{l_i})^T with a full-grid coefficient array.

    C has shape (d_1, ..., d_N, *rest); slot i is summed against the row
    index of D^{l_i}.  Equivalent to (kron of D)^T @ C but O(X * sum d_i).
    """
    n = lvec.n_slots
    for i in range(n):
        D = wigner.wigner_D(HalfInt(int(lvec.twice_ells[i])), *angles)
        C = np.moveaxis(np.tensordot(D, C, axes=([0], [i])), 0, i)
    return C


def _is_su2(lvec: LVector, L: HalfInt) -> bool:
    return not L.is_integer or any(not c.ell.is_integer for c in lvec.entries)


def to_grid(basis: CouplingBasis) -> tuple[np.ndarray, np.ndarray]:
    """Expand a support-restricted basis onto the full (index, k) grid.

    Returns (index_list, grid) where grid has shape
    (n_index * (2L+1), n_vectors) with k minor, matching the generic engine's
    column ordering.
    """
    lvec, L = basis.lvec, basis.L
    full = generic.full_mtuples(lvec) if basis.kind == "ge" else generic.full_classes(lvec)
    pos = {row.tobytes(): i for i, row in enumerate(full)}
    dimL = L.twice + 1
    grid = np.zeros((full.shape[0] * dimL, basis.n_vectors))
    for row, tK, coeffs in basis.entries():
        k_index = (tK + L.twice) // 2
        grid[pos[row.tobytes()] * dimL + k_index, :] = coeffs
    return full, grid


def _class_members(lvec: LVector, rep: np.ndarray) -> np.ndarray:
    """All distinct m-tuples in the class of `rep` (block-wise permutations)."""
    per_block = []
    for start, length in lvec.blocks:
        seg = tuple(rep[start : start + length].tolist())
        per_block.append(sorted(set(itertools.permutations(seg))))
    rows = [sum((list(p) for p in combo), []) for combo in itertools.product(*per_block)]
    return np.array(rows, dtype=np.int64).reshape(-1, lvec.n_slots)


def check_equivariance_ge(basis: CouplingBasis, n_samples: int = 20, seed: int = 0) -> float:
    """Max residual of the sampled GE coefficient identity (exact at 0)."""
    lvec, L = basis.lvec, basis.L
    if total_mtuples(lvec) > DENSE_GUARD:
        raise ValueError("index set too large for the dense equivariance check")
    if basis.n_vectors == 0:
        return 0.0
    _, grid = to_grid(basis)
    dimL = L.twice + 1
    sizes = [int(tl) + 1 for tl in lvec.twice_ells]
    C = grid.reshape(-1, dimL, basis.n_vectors).astype(np.complex128)
    C_slots = C.reshape(*sizes, dimL, basis.n_vectors)
    rng = np.random.default_rng(seed)
    su2 = _is_su2(lvec, L)
    worst = 0.0
    for _ in range(n_samples):
        angles = _sample_euler(rng, su2)
        DL = wigner.wigner_D(L, *angles)
        lhs = np.einsum("mkv,jk->mjv", C, DL)
        rhs = _apply_rep_transpose(lvec, angles, C_slots).reshape(C.shape)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def check_equivariance_gepi(basis: CouplingBasis, n_samples: int = 20, seed: int = 0) -> float:
    """Max residual of the class-summed GE-PI coefficient identity."""
    lvec, L = basis.lvec, basis.L
    if total_mtuples(lvec) > DENSE_GUARD:
        raise ValueError("index set too large for the dense equivariance check")
    if basis.n_vectors == 0:
        return 0.0
    classes, grid = to_grid(basis)
    dimL = L.twice + 1
    sizes = [int(tl) + 1 for tl in lvec.twice_ells]
    C = grid.reshape(-1, dimL, basis.n_vectors).astype(np.complex128)
    full = generic.full_mtuples(lvec)
    pos = {row.tobytes(): i for i, row in enumerate(full)}
    rep_rows = np.array([pos[row.tobytes()] for row in classes])
    member_idx = [
        np.array([pos[r.tobytes()] for r in _class_members(lvec, rep)])
        for rep in classes
    ]
    # coefficients scattered onto the full grid at representative rows:
    # rhs[c, k] = sum_{mu in class c} sum_{c'} prod_i D[rep(c')_i, mu_i] C[c', k]
    scattered = np.zeros((full.shape[0], dimL, basis.n_vectors), dtype=np.complex128)
    scattered[rep_rows] = C
    scattered = scattered.reshape(*sizes, dimL, basis.n_vectors)
    rng = np.random.default_rng(seed)
    su2 = _is_su2(lvec, L)
    worst = 0.0
    for _ in range(n_samples):
        angles = _sample_euler(rng, su2)
        DL = wigner.wigner_D(L, *angles)
        lhs = np.einsum("mkv,jk->mjv", C, DL)
        G = _apply_rep_transpose(lvec, angles, scattered).reshape(
            full.shape[0], dimL, basis.n_vectors
        )
        rhs = np.stack([G[idx].sum(axis=0) for idx in member_idx], axis=0)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def perturb(basis: CouplingBasis, delta: float = 0.1) -> CouplingBasis:
    """Negative control: bump one coefficient of the first vector."""
    if basis.n_vectors == 0:
        raise ValueError("cannot perturb an empty basis")
    vectors = basis.vectors.copy()
    vectors[0, 0] += delta
    return CouplingBasis(
        basis.group, basis.kind, basis.lvec, basis.L, basis.parity,
        basis.index_rows, vectors,
    )


# ---------------------------------------------------------------------------
# spatial checks
# ---------------------------------------------------------------------------


def _one_particle(tl: int, tags: tuple[int, ...], angles) -> np.ndarray:
    """Column mu=0 of the representation at the point, times a tag weight.

    For integer l these are the complex spherical harmonics of the point (up
    to a fixed normalization); the constant tag weight keeps channels with
    equal l but different tags distinguishable.
    """
    D = wigner.wigner_D(HalfInt(tl), *angles)
    w = 1.0
    for t in tags:
        w *= 1.0 + 0.25 * (t + 1)
    return w * D[:, tl // 2]


def _eval_components(
    basis: CouplingBasis, points: list[tuple[float, float, float]], style: str
) -> np.ndarray:
    """Evaluate the basis functions at one point tuple.

    ``style='density'`` uses products of point sums (the evaluation the
    GE-PI coefficients are built for); ``style='sym'`` uses the explicit
    sum over all slot permutations.  Returns (2L+1, n_vectors) complex.
    """
    lvec, L = basis.lvec, basis.L
    n = lvec.n_slots
    phi = []  # per slot: (2l+1, n_points) one-particle values
    for j, ch in enumerate(lvec.entries):
        cols = [_one_particle(ch.twice_ell, ch.tags, p) for p in points]
        phi.append(np.stack(cols, axis=1))
    dimL = L.twice + 1
    out = np.zeros((dimL, basis.n_vectors), dtype=np.complex128)
    for row, tK, coeffs in basis.entries():
        k_index = (tK + L.twice) // 2
        if style == "density":
            val = 1.0 + 0j
            for j in range(n):
                tl = lvec.twice_ells[j]
                val *= phi[j][(row[j] + tl) // 2, :].sum()
        else:
            val = 0.0 + 0j
            for sigma in itertools.permutations(range(len(points))):
                term = 1.0 + 0j
                for j in range(n):
                    tl = lvec.twice_ells[j]
                    term *= phi[j][(row[j] + tl) // 2, sigma[j]]
                val += term
        out[k_index, :] += val * coeffs
    return out


def check_permutation_spatial(
    basis: CouplingBasis,
    n_point_sets: int = 10,
    seed: int = 0,
    style: str = "sym",
) -> dict[str, float]:
    """Point-sampled invariance and equivariance of the basis functions.

    Evaluates every basis component at random point tuples, then checks (a)
    equality under all permutations of the points and (b) the representation
    transformation rule under a random rotation of all points.
    """
    lvec, L = basis.lvec, basis.L
    if any(not c.ell.is_integer for c in lvec.entries):
        raise ValueError("spatial checks need integer angular indices")
    n = lvec.n_slots
    rng = np.random.default_rng(seed)
    perm_resid = 0.0
    rot_resid = 0.0
    if basis.n_vectors == 0:
        return {"perm": 0.0, "rot": 0.0}
    for _ in range(n_point_sets):
        points = [_sample_euler(rng, False) for _ in range(n)]
        ref = _eval_components(basis, points, style)
        for sigma in itertools.permutations(range(n)):
            shuffled = [points[i] for i in sigma]
            got = _eval_components(basis, shuffled, style)
            perm_resid = max(perm_resid, float(np.abs(got - ref).max()))
        # rotation: points are group elements, rotating means left-composition
        g = _sample_euler(rng, False)
        Dg = wigner.wigner_D(L, *g)
        rotated = [_compose_euler(g, p) for p in points]
        got = _eval_components(basis, rotated, style)
        want = Dg @ ref
        rot_resid = max(rot_resid, float(np.abs(got - want).max()))
    return {"perm": perm_resid, "rot": rot_resid}


def _compose_euler(g, p):
    """Euler angles of the composed group element, via the spin-1/2 matrix.

    In the ascending-index convention the 2x2 representation reads
    [[cos(b/2) e^{i(a+c)/2},  sin(b/2) e^{i(a-c)/2}],
     [-sin(b/2) e^{-i(a-c)/2}, cos(b/2) e^{-i(a+c)/2}]],
    so the angles can be read back from the moduli and phases.
    """
    a = wigner.wigner_D(HalfInt(1), *g) @ wigner.wigner_D(HalfInt(1), *p)
    cos_half = min(1.0, abs(a[1, 1]))
    sin_half = min(1.0, abs(a[0, 1]))
    beta = 2.0 * math.atan2(sin_half, cos_half)
    sum_ag = -2.0 * float(np.angle(a[1, 1])) if cos_half > 1e-12 else 0.0
    diff_ag = 2.0 * float(np.angle(a[0, 1])) if sin_half > 1e-12 else 0.0
    alpha = (sum_ag + diff_ag) / 2.0
    gamma = (sum_ag - diff_ag) / 2.0
    return (alpha, beta, gamma)


# ---------------------------------------------------------------------------
# exact accounting and oracle comparison
# ---------------------------------------------------------------------------


def check_direct_sum(lvec: LVector) -> dict[str, bool]:
    """Exact big-integer direct-sum identities for both kinds."""
    ge_total = sum((L.twice + 1) * dim_ge(lvec, L) for L in admissible_L(lvec))
    gepi_total = sum((L.twice + 1) * dim_gepi(lvec, L) for L in admissible_L(lvec))
    return {
        "ge": ge_total == total_mtuples(lvec),
        "gepi": gepi_total == total_classes(lvec),
    }


def cross_check_generic(lvec: LVector, L: HalfInt | int, kind: str) -> np.ndarray:
    """Principal angles between the fast-path span and the dense-oracle span."""
    from . import mup

    L = HalfInt.of(L)
    n_index = total_mtuples(lvec) if kind == "ge" else total_classes(lvec)
    if n_index * (L.twice + 1) > 2000:
        raise ValueError("stacked matrix too large for the dense cross-check")
    basis = mup.ge_basis(lvec, L) if kind == "ge" else mup.gepi_basis(lvec, L)
    gens = generic.GeneratorSet.su2(lvec, L)
    build_d = generic.build_Md_ge if kind == "ge" else generic.build_Md_gepi
    blocks = [build_d(gens, lvec, L, d) for d in (1, 2, 3)]
    oracle = generic.kernel_blocks(blocks)
    if basis.n_vectors != oracle.dim:
        raise AssertionError(
            f"dimension mismatch: solver {basis.n_vectors} vs oracle {oracle.dim} "
            f"(l={lvec}, L={L}, {kind})"
        )
    if basis.n_vectors == 0:
        return np.zeros(0)
    _, grid = to_grid(basis)
    return scipy.linalg.subspace_angles(grid.astype(np.complex128), oracle.vectors)


def run_standard_checks(basis: CouplingBasis, seed: int = 0, n_samples: int = 20) -> VerificationReport:
    """The battery the CLI runs with --verify; residual tolerance 1e-9."""
    report = VerificationReport(seed=seed)
    lvec, L = basis.lvec, basis.L
    small = total_mtuples(lvec) <= DENSE_GUARD
    if small:
        if basis.kind == "ge":
            r = check_equivariance_ge(basis, n_samples, seed)
            report.add("equivariance_ge", r, RESIDUAL_TOL, r <= RESIDUAL_TOL)
        else:
            r = check_equivariance_gepi(basis, n_samples, seed)
            report.add("equivariance_gepi", r, RESIDUAL_TOL, r <= RESIDUAL_TOL)
    expected = dim_ge(lvec, L) if basis.kind == "ge" else dim_gepi(lvec, L)
    if basis.parity is not None:
        natural = "+" if lvec.sum_ell.twice % 4 == 0 else "-"
        if basis.parity != natural:
            expected = 0
    report.add("dimension", basis.n_vectors, expected, basis.n_vectors == expected)
    if basis.n_vectors:
        gram = basis.vectors.T @ basis.vectors
        r = float(np.abs(gram - np.eye(basis.n_vectors)).max())
        report.add("orthonormal", r, 1e-12, r <= 1e-12)
    return report
