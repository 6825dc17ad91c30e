"""Fiedler-style inequality tests for prescribed spectrum plus diagonal,
and the closed-form realisers for orders two and three.

All tests run over exact rationals on internally sorted copies of the
inputs; reported indices refer to the sorted order (1-based).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import DimensionMismatchError, NotRealizableError
from .numkit import DiagonalList, Spectrum, SymMatrix


@dataclass(frozen=True)
class FiedlerVerdict:
    necessary_ok: bool
    sufficient_ok: bool
    first_violated: Optional[str]


class H2Data(NamedTuple):
    """A 2-list with prescribed diagonal: (perron; second) over {d1, d2}."""

    perron: Fraction
    second: Fraction
    d1: Fraction
    d2: Fraction


def _sorted_inputs(sigma: Spectrum, diag: DiagonalList) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    if sigma.n != diag.n:
        raise DimensionMismatchError(f"|sigma| = {sigma.n} != |diag| = {diag.n}")
    return sigma.values, diag.sorted_desc


def _necessary_violation(lam: tuple[Fraction, ...], a: tuple[Fraction, ...]) -> Optional[str]:
    n = len(lam)
    if lam[0] < a[0]:
        return f"lambda_1 = {lam[0]} < a_1 = {a[0]}"
    if sum(lam) != sum(a):
        return f"sum mismatch: sum(lambda) = {sum(lam)} != sum(a) = {sum(a)}"
    lam_prefix = [Fraction(0)]
    a_prefix = [Fraction(0)]
    for v in lam:
        lam_prefix.append(lam_prefix[-1] + v)
    for v in a:
        a_prefix.append(a_prefix[-1] + v)
    for k in range(2, n + 1):
        for s in range(1, k):
            lhs = lam_prefix[s] + lam[k - 1]
            rhs = a_prefix[s - 1] + a[k - 2] + a[k - 1]
            if lhs < rhs:
                return f"(s={s}, k={k}): {lhs} < {rhs}"
    return None


def _sufficient_violation(lam: tuple[Fraction, ...], a: tuple[Fraction, ...]) -> Optional[str]:
    n = len(lam)
    run_l = Fraction(0)
    run_a = Fraction(0)
    for k in range(1, n):
        run_l += lam[k - 1]
        run_a += a[k - 1]
        if run_l < run_a:
            return f"partial sum k={k}: {run_l} < {run_a}"
    if run_l + lam[n - 1] != run_a + a[n - 1]:
        return f"sum mismatch at k={n}"
    for k in range(2, n):
        if lam[k - 1] > a[k - 2]:
            return f"lambda_{k} = {lam[k - 1]} > a_{k - 1} = {a[k - 2]}"
    return None


def fiedler_necessary(sigma: Spectrum, diag: DiagonalList) -> FiedlerVerdict:
    """Necessary conditions for sigma to be realisable with the given diagonal."""
    lam, a = _sorted_inputs(sigma, diag)
    nec = _necessary_violation(lam, a)
    suf = _sufficient_violation(lam, a)
    return FiedlerVerdict(nec is None, suf is None, nec)


def fiedler_sufficient(sigma: Spectrum, diag: DiagonalList) -> FiedlerVerdict:
    """Sufficient conditions; passing guarantees a realising matrix exists."""
    lam, a = _sorted_inputs(sigma, diag)
    nec = _necessary_violation(lam, a)
    suf = _sufficient_violation(lam, a)
    return FiedlerVerdict(nec is None, suf is None, suf)


def realize_2x2(sigma: Spectrum, diag: DiagonalList) -> SymMatrix:
    """Realise a 2-list: [[a1, w], [w, a2]] with w = sqrt((l1-a1)(l1-a2))."""
    if sigma.n != 2 or diag.n != 2:
        raise DimensionMismatchError("realize_2x2 needs lists of length 2")
    lam, a = _sorted_inputs(sigma, diag)
    if lam[0] < a[0]:
        raise NotRealizableError(f"lambda_1 = {lam[0]} < a_1 = {a[0]}")
    if lam[0] + lam[1] != a[0] + a[1]:
        raise NotRealizableError(
            f"trace mismatch: {lam[0]} + {lam[1]} != {a[0]} + {a[1]}"
        )
    w = math.sqrt(float((lam[0] - a[0]) * (lam[0] - a[1])))
    a1, a2 = float(a[0]), float(a[1])
    return SymMatrix([[a1, w], [w, a2]])


def check_n3(sigma: Spectrum, diag: DiagonalList) -> bool:
    """Exact yes/no for order 3: lam2 <= a1 <= lam1, lam3 <= a3, equal sums."""
    if sigma.n != 3 or diag.n != 3:
        raise DimensionMismatchError("check_n3 needs lists of length 3")
    lam, a = _sorted_inputs(sigma, diag)
    return (
        lam[1] <= a[0] <= lam[0]
        and lam[2] <= a[2]
        and lam[0] + lam[1] + lam[2] == a[0] + a[1] + a[2]
    )


def split_n3(sigma: Spectrum, diag: DiagonalList) -> tuple[H2Data, Fraction, H2Data]:
    """Split a realisable 3-list into two glued 2-lists sharing c = l1+l2-a1."""
    if not check_n3(sigma, diag):
        raise NotRealizableError(f"{sigma.values} with diagonal {diag.values} fails the order-3 test")
    lam, a = _sorted_inputs(sigma, diag)
    c = lam[0] + lam[1] - a[0]
    return (
        H2Data(lam[0], lam[1], a[0], c),
        c,
        H2Data(c, lam[2], a[1], a[2]),
    )
