"""Soules-type partition sequences and the orthogonal matrices they generate.

A sequence of n partitions of {1..n}, each refining the previous by one
two-way split, together with a positive unit first column x, determines an
orthogonal matrix R whose similarity R diag(s) R^T stays nonnegative off
the diagonal for every non-increasing s.  The squared entries of R are
rational in the squared entries of x, which gives an exact path to the
diagonal of the realisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import DimensionMismatchError, NotRealizableError
from .numkit import DiagonalList, OrthMatrix, Spectrum, SymMatrix
from .rationals import rat_str, rats

OFFDIAG_TOL = 1e-10


@dataclass(frozen=True)
class Split:
    """One refinement step: `parent` breaks into `star` and `starstar`.

    The sign convention downstream puts the positive part of the new
    column on `star`. Elements are 1-based.
    """

    parent: frozenset[int]
    star: frozenset[int]
    starstar: frozenset[int]

    @classmethod
    def of(cls, parent: Iterable[int], star: Iterable[int], starstar: Iterable[int]) -> "Split":
        return cls(frozenset(parent), frozenset(star), frozenset(starstar))


@dataclass(frozen=True)
class SoulesSequence:
    """Soules-type sequence of partitions, stored by its n-1 splits."""

    n: int
    splits: tuple[Split, ...]

    def partitions(self) -> list[list[frozenset[int]]]:
        """All n partitions, from the trivial one down to singletons."""
        parts = [frozenset(range(1, self.n + 1))]
        out = [list(parts)]
        for sp in self.splits:
            parts = [p for p in parts if p != sp.parent] + [sp.star, sp.starstar]
            out.append(list(parts))
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "splits": [
                {
                    "parent": sorted(sp.parent),
                    "star": sorted(sp.star),
                    "starstar": sorted(sp.starstar),
                }
                for sp in self.splits
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SoulesSequence":
        return cls(
            n=int(doc["n"]),
            splits=tuple(
                Split.of(s["parent"], s["star"], s["starstar"]) for s in doc["splits"]
            ),
        )


def _first_sequence_violation(seq: SoulesSequence) -> Optional[str]:
    n = seq.n
    if n < 1:
        return "n must be >= 1"
    if len(seq.splits) != n - 1:
        return f"expected {n - 1} splits, got {len(seq.splits)}"
    current = {frozenset(range(1, n + 1))}
    for i, sp in enumerate(seq.splits, start=2):
        if sp.parent not in current:
            return f"split {i}: parent {sorted(sp.parent)} is not a current block"
        if not sp.star or not sp.starstar:
            return f"split {i}: both parts must be nonempty"
        if sp.star & sp.starstar:
            return f"split {i}: parts overlap"
        if sp.star | sp.starstar != sp.parent:
            return f"split {i}: parts do not cover the parent"
        current.remove(sp.parent)
        current.add(sp.star)
        current.add(sp.starstar)
    return None


def validate_sequence(seq: SoulesSequence) -> bool:
    """True iff the splits define a genuine Soules-type partition sequence."""
    return _first_sequence_violation(seq) is None


@dataclass(frozen=True)
class SoulesSpec:
    """A Soules matrix, specified by its sequence and the squares of x.

    x is carried through its rational squares so the diagonal of the
    realisation can be computed exactly; the float vector is derived.
    """

    seq: SoulesSequence
    x_squared: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        msg = _first_sequence_violation(self.seq)
        if msg is not None:
            raise ValueError(f"invalid Soules-type sequence: {msg}")
        if len(self.x_squared) != self.seq.n:
            raise DimensionMismatchError("x^2 length does not match sequence order")
        for v in self.x_squared:
            if v <= 0:
                raise ValueError("x must be strictly positive")
        if sum(self.x_squared, Fraction(0)) != 1:
            raise ValueError("x^2 entries must sum to 1 exactly")

    @property
    def n(self) -> int:
        return self.seq.n

    def x_floats(self) -> np.ndarray:
        return np.sqrt(np.array([float(v) for v in self.x_squared]))

    def to_json(self) -> dict:
        doc = self.seq.to_json()
        doc["x_squared"] = [rat_str(v) for v in self.x_squared]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SoulesSpec":
        return cls(SoulesSequence.from_json(doc), rats(doc["x_squared"]))


def _restriction_norms(spec: SoulesSpec, sp: Split) -> tuple[Fraction, Fraction]:
    s1 = sum((spec.x_squared[j - 1] for j in sp.star), Fraction(0))
    s2 = sum((spec.x_squared[j - 1] for j in sp.starstar), Fraction(0))
    return s1, s2


def build_soules_matrix(spec: SoulesSpec, orth_tol: float = 1e-10) -> OrthMatrix:
    """Materialise the orthogonal matrix: column 1 is x, column i >= 2 is the
    signed, normalised difference of the two restrictions of x at split i,
    positive on the star part."""
    n = spec.n
    x = spec.x_floats()
    r = np.zeros((n, n))
    r[:, 0] = x
    for i, sp in enumerate(spec.seq.splits, start=2):
        s_star, s_ss = _restriction_norms(spec, sp)
        total = s_star + s_ss
        coef_star = math.sqrt(float(s_ss / (s_star * total)))
        coef_ss = -math.sqrt(float(s_star / (s_ss * total)))
        col = np.zeros(n)
        for j in sp.star:
            col[j - 1] = coef_star * x[j - 1]
        for j in sp.starstar:
            col[j - 1] = coef_ss * x[j - 1]
        r[:, i - 1] = col
    return OrthMatrix(r, orth_tol=orth_tol)


def soules_realize(spec: SoulesSpec, sigma: Spectrum) -> tuple[SymMatrix, list[float]]:
    """Form A = R diag(sigma) R^T; returns A and its diagonal separately.

    Off-diagonal entries are guaranteed nonnegative by theory for any
    non-increasing sigma and are asserted to be so up to roundoff.
    """
    if sigma.n != spec.n:
        raise DimensionMismatchError("spectrum length does not match spec order")
    r = build_soules_matrix(spec).array
    lam = np.array(sigma.floats())
    a = (r * lam) @ r.T
    a = 0.5 * (a + a.T)
    if spec.n > 1:
        mask = ~np.eye(spec.n, dtype=bool)
        off_min = float(np.min(a[mask]))
        if off_min < -OFFDIAG_TOL:
            raise AssertionError(
                f"off-diagonal entry {off_min} below -{OFFDIAG_TOL}; "
                "Soules structure violated"
            )
    return SymMatrix(a), [float(v) for v in np.diag(a)]


def soules_diag_exact_raw(spec: SoulesSpec, sigma: Spectrum) -> tuple[Fraction, ...]:
    """Exact rational diagonal of R diag(sigma) R^T, sign-unrestricted.

    Uses the closed form of the squared entries of R in terms of x^2;
    no square roots are ever taken.
    """
    if sigma.n != spec.n:
        raise DimensionMismatchError("spectrum length does not match spec order")
    n = spec.n
    r_sq = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        r_sq[j][0] = spec.x_squared[j]
    for i, sp in enumerate(spec.seq.splits, start=2):
        s_star, s_ss = _restriction_norms(spec, sp)
        total = s_star + s_ss
        for j in sp.star:
            r_sq[j - 1][i - 1] = spec.x_squared[j - 1] * s_ss / (s_star * total)
        for j in sp.starstar:
            r_sq[j - 1][i - 1] = spec.x_squared[j - 1] * s_star / (s_ss * total)
    diag = []
    for j in range(n):
        diag.append(sum((r_sq[j][i] * sigma.values[i] for i in range(n)), Fraction(0)))
    return tuple(diag)


def soules_diag_exact(spec: SoulesSpec, sigma: Spectrum) -> DiagonalList:
    """Exact diagonal as a DiagonalList; fails if any entry is negative,
    since such a spectrum is not realised by this spec."""
    raw = soules_diag_exact_raw(spec, sigma)
    if any(v < 0 for v in raw):
        raise NotRealizableError(
            f"exact diagonal {raw} has negative entries; sigma is outside "
            "the realisable cone of this Soules spec"
        )
    return DiagonalList(raw)
