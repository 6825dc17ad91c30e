"""Exact rational scalars and their "p/q" wire form.

All membership logic in this package runs over `fractions.Fraction`
(arbitrary-precision, stored in lowest terms with positive denominator,
which is exactly the invariant we need).  Floats enter only when
matrices are materialised.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

RationalLike = Union[Fraction, int, str]


def rat(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "p/q" / "n" string to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rats(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(rat(v) for v in values)


def rat_str(value: Fraction) -> str:
    """Serialise a Fraction as "p/q" (or "p" when the denominator is 1)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rat_strs(values: Iterable[Fraction]) -> list[str]:
    return [rat_str(v) for v in values]
