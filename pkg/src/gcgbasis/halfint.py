"""Exact half-integer arithmetic.

Angular-momentum labels for SU(2) run over 0, 1/2, 1, 3/2, ... and the
associated magnetic quantum numbers step by 1 inside [-l, l].  Storing the
doubled value as a plain integer keeps every index computation exact; no
floating-point labels ever enter the index bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, order=True)
class HalfInt:
    """A number of the form twice/2 with exact integer arithmetic."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int):
            raise TypeError(f"twice must be int, got {type(self.twice).__name__}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(value) -> "HalfInt":
        """Coerce an int, HalfInt, Fraction or exact float (n/2) to HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, int):
            return HalfInt(2 * value)
        if isinstance(value, Fraction):
            if value.denominator not in (1, 2):
                raise ValueError(f"{value} is not a half-integer")
            return HalfInt(int(value * 2))
        if isinstance(value, float):
            doubled = 2 * value
            if doubled != int(doubled):
                raise ValueError(f"{value} is not a half-integer")
            return HalfInt(int(doubled))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __mul__(self, n: int) -> "HalfInt":
        if not isinstance(n, int):
            raise TypeError("HalfInt can only be scaled by an int")
        return HalfInt(self.twice * n)

    __rmul__ = __mul__

    # -- queries -----------------------------------------------------------

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_int(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __float__(self) -> float:
        return self.twice / 2.0

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self.twice})"


ZERO = HalfInt(0)
HALF = HalfInt(1)
ONE = HalfInt(2)
