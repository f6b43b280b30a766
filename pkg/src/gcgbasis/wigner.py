"""Wigner-D matrices, small-d matrices, and their Euler-angle derivatives.

ZYZ Euler convention; rows and columns are indexed by mu, m = -l .. l in
ascending order.  Factorial products are accumulated with exact integers
before the square root, which keeps the entries accurate up to 2l = 60.
"""

from __future__ import annotations

import math

import numpy as np

from .halfint import HalfInt

#: largest supported doubled angular index
MAX_TWICE_ELL = 60


def _check_ell(ell: HalfInt) -> int:
    tl = HalfInt.of(ell).twice
    if tl < 0:
        raise ValueError("ell must be >= 0")
    if tl > MAX_TWICE_ELL:
        raise ValueError(f"ell={HalfInt(tl)} exceeds the supported range 2*ell <= {MAX_TWICE_ELL}")
    return tl


def small_d(ell: HalfInt | int | float, beta: float) -> np.ndarray:
    """Real rotation matrix d^l(beta) about the y axis, shape (2l+1, 2l+1).

    Entry (mu, m) follows the factorial sum formula; the sum index s runs over
    max(0, mu-m) .. min(l+mu, l-m).
    """
    tl = _check_ell(ell)
    dim = tl + 1
    out = np.empty((dim, dim), dtype=np.float64)
    # the alternating factorial sum cancels badly for large l; exact integer
    # factorials plus extended-precision accumulation keep 2l = 60 usable
    c = np.longdouble(math.cos(beta / 2.0))
    s = np.longdouble(math.sin(beta / 2.0))
    one = np.longdouble(1.0)
    for i in range(dim):  # mu = -l + i
        tmu = -tl + 2 * i
        for j in range(dim):  # m = -l + j
            tm = -tl + 2 * j
            # all of these are integers: l+m = (tl+tm)/2 etc.
            lpm = (tl + tm) // 2
            lmm = (tl - tm) // 2
            lpu = (tl + tmu) // 2
            lmu = (tl - tmu) // 2
            pref = np.sqrt(
                np.longdouble(
                    math.factorial(lpm)
                    * math.factorial(lmm)
                    * math.factorial(lpu)
                    * math.factorial(lmu)
                )
            )
            mu_minus_m = (tmu - tm) // 2
            s_lo = max(0, mu_minus_m)
            s_hi = min(lpu, lmm)
            acc = np.longdouble(0.0)
            for k in range(s_lo, s_hi + 1):
                denom = (
                    math.factorial(lpu - k)
                    * math.factorial(k)
                    * math.factorial(-mu_minus_m + k)
                    * math.factorial(lmm - k)
                )
                term = (
                    (c ** (lpu + lmm - 2 * k))
                    * (s ** (-mu_minus_m + 2 * k))
                    * (one / np.longdouble(denom))
                )
                acc += -term if k % 2 else term
            out[i, j] = float(pref * acc)
    return out


def wigner_D(
    ell: HalfInt | int | float, alpha: float, beta: float, gamma: float
) -> np.ndarray:
    """Complex Wigner-D matrix e^{-i mu alpha} d^l_{mu m}(beta) e^{-i m gamma}."""
    tl = _check_ell(ell)
    d = small_d(HalfInt(tl), beta)
    halves = np.arange(-tl, tl + 1, 2) / 2.0
    left = np.exp(-1j * halves * alpha)
    right = np.exp(-1j * halves * gamma)
    return left[:, None] * d * right[None, :]


def drho(ell: HalfInt | int | float, d: int) -> np.ndarray:
    """Euler-angle derivative of D^l at the identity, generator d in {1,2,3}.

    d=1 (alpha) and d=3 (gamma) give diag(-i m); d=2 (beta) is the real
    bidiagonal matrix with entries (1/2)sqrt((l-m+1)(l+m)) at (mu, m=mu+1)
    and -(1/2)sqrt((l+m+1)(l-m)) at (mu, m=mu-1).
    """
    tl = _check_ell(ell)
    dim = tl + 1
    if d in (1, 3):
        m = np.arange(-tl, tl + 1, 2) / 2.0
        return np.diag(-1j * m).astype(np.complex128)
    if d == 2:
        out = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(dim):  # mu = -l + i
            tmu = -tl + 2 * i
            tm = tmu + 2  # m = mu + 1
            if tm <= tl:
                out[i, i + 1] = 0.5 * math.sqrt((tl - tm + 2) * (tl + tm)) / 2.0
            tm = tmu - 2  # m = mu - 1
            if tm >= -tl:
                out[i, i - 1] = -0.5 * math.sqrt((tl + tm + 2) * (tl - tm)) / 2.0
        return out
    raise ValueError("generator index must be 1, 2 or 3")


def euler_rotation(d: int, t: float) -> tuple[float, float, float]:
    """Euler triple moving distance t along generator d from the identity."""
    if d == 1:
        return (t, 0.0, 0.0)
    if d == 2:
        return (0.0, t, 0.0)
    if d == 3:
        return (0.0, 0.0, t)
    raise ValueError("generator index must be 1, 2 or 3")
