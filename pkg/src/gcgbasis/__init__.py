"""Coupling-coefficient bases for SO(3), SU(2) and O(3).

Builds orthonormal bases of group-equivariant (GE) and group-equivariant
permutation-invariant (GE-PI) coupling coefficients - generalized
Clebsch-Gordan coefficients - from the kernel of sparse matrices derived from
the Lie algebra, together with exact/recursive/asymptotic dimension counts, a
generic engine for user-supplied groups, and verification tooling.
"""

from ._backend import BACKEND
from .halfint import HalfInt
from .indexing import LChannel, LVector, minimal_partition
from .mup import CouplingBasis, ge_basis, gepi_basis, o3_basis
from .dims import dim_cg, dim_ge, dim_gepi

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HalfInt",
    "LChannel",
    "LVector",
    "minimal_partition",
    "CouplingBasis",
    "ge_basis",
    "gepi_basis",
    "o3_basis",
    "dim_cg",
    "dim_ge",
    "dim_gepi",
    "__version__",
]
