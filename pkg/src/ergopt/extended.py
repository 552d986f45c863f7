"""Exact rational scalars extended with +inf / -inf.

Values of action potentials live in Q united with {+inf, -inf}.  Arithmetic is
checked: the indeterminate sum (+inf) + (-inf) raises instead of silently
producing a value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import ExtendedArithmeticError

FINITE = "finite"
PLUS_INF_TAG = "+inf"
MINUS_INF_TAG = "-inf"


@total_ordering
@dataclass(frozen=True)
class ActionValue:
    """A rational number or a signed infinity, ordered the obvious way."""

    tag: str
    value: Fraction | None = None

    def __post_init__(self):
        if self.tag not in (FINITE, PLUS_INF_TAG, MINUS_INF_TAG):
            raise ValueError(f"unknown tag {self.tag!r}")
        if (self.tag == FINITE) != (self.value is not None):
            raise ValueError("finite values carry a Fraction, infinite ones do not")

    @classmethod
    def finite(cls, value) -> "ActionValue":
        return cls(FINITE, Fraction(value))

    @property
    def is_finite(self) -> bool:
        return self.tag == FINITE

    @property
    def is_plus_inf(self) -> bool:
        return self.tag == PLUS_INF_TAG

    @property
    def is_minus_inf(self) -> bool:
        return self.tag == MINUS_INF_TAG

    def _rank(self) -> int:
        if self.tag == MINUS_INF_TAG:
            return -1
        if self.tag == PLUS_INF_TAG:
            return 1
        return 0

    def __lt__(self, other: "ActionValue") -> bool:
        if not isinstance(other, ActionValue):
            return NotImplemented
        ra, rb = self._rank(), other._rank()
        if ra != rb:
            return ra < rb
        if ra == 0:
            return self.value < other.value
        return False

    def __add__(self, other: "ActionValue") -> "ActionValue":
        if not isinstance(other, ActionValue):
            other = ActionValue.finite(other)
        if self.is_finite and other.is_finite:
            return ActionValue.finite(self.value + other.value)
        if self.is_plus_inf and other.is_minus_inf:
            raise ExtendedArithmeticError("(+inf) + (-inf) is undefined")
        if self.is_minus_inf and other.is_plus_inf:
            raise ExtendedArithmeticError("(-inf) + (+inf) is undefined")
        if self.is_plus_inf or other.is_plus_inf:
            return PLUS_INF
        return MINUS_INF

    __radd__ = __add__

    def __neg__(self) -> "ActionValue":
        if self.is_plus_inf:
            return MINUS_INF
        if self.is_minus_inf:
            return PLUS_INF
        return ActionValue.finite(-self.value)

    def scaled(self, c) -> "ActionValue":
        """Multiply by a positive rational; sign of infinities is preserved."""
        c = Fraction(c)
        if c <= 0:
            raise ExtendedArithmeticError("scaling is only defined for positive factors")
        if self.is_finite:
            return ActionValue.finite(c * self.value)
        return self

    def serialize(self) -> str:
        if self.is_plus_inf:
            return "+inf"
        if self.is_minus_inf:
            return "-inf"
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self) -> str:
        return f"ActionValue({self.serialize()})"


PLUS_INF = ActionValue(PLUS_INF_TAG)
MINUS_INF = ActionValue(MINUS_INF_TAG)
