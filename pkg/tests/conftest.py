import itertools

import numpy as np
import pytest
import scipy.linalg

from gcgbasis import verify
from gcgbasis.indexing import LVector


def lvecs_over(twice_ells, n_max, n_min=1):
    """All multisets of the given doubled ells up to length n_max."""
    out = []
    for n in range(n_min, n_max + 1):
        for combo in itertools.combinations_with_replacement(sorted(twice_ells), n):
            out.append(LVector.of(list(combo), two=True))
    return out


def max_principal_angle(basis_a, basis_b) -> float:
    """Max principal angle between two coupling bases (grid-expanded)."""
    if basis_a.n_vectors != basis_b.n_vectors:
        raise AssertionError(
            f"dimension mismatch {basis_a.n_vectors} vs {basis_b.n_vectors}"
        )
    if basis_a.n_vectors == 0:
        return 0.0
    _, ga = verify.to_grid(basis_a)
    _, gb = verify.to_grid(basis_b)
    ang = scipy.linalg.subspace_angles(ga, gb)
    return float(ang.max()) if ang.size else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
