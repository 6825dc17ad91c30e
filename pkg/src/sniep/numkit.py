"""Core value types and the binary64 verification backend.

Two numeric layers coexist: exact rationals (Spectrum, DiagonalList) carry
all membership logic, while SymMatrix/OrthMatrix hold binary64 entries for
materialised realising matrices.  The eigensolver is a self-contained
cyclic-by-row Jacobi iteration, adequate for the dense symmetric matrices
(n <= ~64) this package produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, ReducibleBlockError
from .rationals import RationalLike, rat_strs, rats

DEFAULT_SPECTRUM_TOL = 1e-9
DEFAULT_ORTH_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """A prospective spectrum: exact rationals, non-increasing, Perron first."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise DimensionMismatchError("a spectrum needs at least one value")
        for a, b in zip(self.values, self.values[1:]):
            if a < b:
                raise ValueError(
                    "spectrum must be sorted non-increasingly with the Perron "
                    f"value first, got {self.values}"
                )

    @classmethod
    def of(cls, *values: RationalLike) -> "Spectrum":
        return cls(rats(values))

    @classmethod
    def from_values(cls, values: Iterable[RationalLike]) -> "Spectrum":
        return cls(rats(values))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def perron(self) -> Fraction:
        return self.values[0]

    @cached_property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def floats(self) -> list[float]:
        return [float(v) for v in self.values]

    def to_json(self) -> list[str]:
        return rat_strs(self.values)


@dataclass(frozen=True)
class DiagonalList:
    """Multiset of prescribed nonnegative diagonal entries (order-free)."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        for v in self.values:
            if v < 0:
                raise ValueError(f"diagonal entries must be nonnegative, got {v}")

    @classmethod
    def of(cls, *values: RationalLike) -> "DiagonalList":
        return cls(rats(values))

    @classmethod
    def from_values(cls, values: Iterable[RationalLike]) -> "DiagonalList":
        return cls(rats(values))

    @classmethod
    def zeros(cls, n: int) -> "DiagonalList":
        return cls(tuple(Fraction(0) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.values)

    @cached_property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    @cached_property
    def maximum(self) -> Fraction:
        return max(self.values)

    @cached_property
    def sorted_desc(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.values, reverse=True))

    def to_json(self) -> list[str]:
        return rat_strs(self.values)


class SymMatrix:
    """Dense symmetric matrix; symmetry is exact by construction.

    Only the upper triangle of the input is trusted; it is mirrored into
    the lower one so entries[i][j] == entries[j][i] holds bit-for-bit.
    """

    def __init__(self, rows: Sequence[Sequence[float]] | np.ndarray):
        a = np.array(rows, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        iu = np.triu_indices(a.shape[0], k=1)
        a[(iu[1], iu[0])] = a[iu]
        self._a = a
        self._a.setflags(write=False)

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self._a[ij])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._a))) if self.n else 0.0

    def min_entry(self) -> float:
        return float(np.min(self._a))

    def diagonal(self) -> list[float]:
        return [float(v) for v in np.diag(self._a)]

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [[float(v) for v in row] for row in self._a]}

    @classmethod
    def from_json(cls, doc: dict) -> "SymMatrix":
        rows = doc["rows"]
        if len(rows) != doc["n"]:
            raise DimensionMismatchError("matrix JSON: row count does not match n")
        return cls(rows)

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n})"


class OrthMatrix:
    """Square matrix whose columns are numerically orthonormal."""

    def __init__(self, columns: np.ndarray, orth_tol: float = DEFAULT_ORTH_TOL):
        q = np.array(columns, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {q.shape}")
        defect = np.max(np.abs(q.T @ q - np.eye(q.shape[0]))) if q.size else 0.0
        if defect > orth_tol:
            raise ValueError(f"columns are not orthonormal: defect {defect:.3e} > {orth_tol:.1e}")
        self._q = q
        self._q.setflags(write=False)
        self.orth_defect = float(defect)

    @property
    def n(self) -> int:
        return self._q.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._q

    def column(self, i: int) -> np.ndarray:
        return self._q[:, i].copy()

    def __repr__(self) -> str:
        return f"OrthMatrix(n={self.n}, defect={self.orth_defect:.2e})"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking a matrix against a prescribed spectrum/diagonal."""

    symmetric_ok: bool
    nonneg_ok: bool
    spectrum_err: float
    diag_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.symmetric_ok
            and self.nonneg_ok
            and self.spectrum_err <= self.tol
            and self.diag_err <= self.tol
        )

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "symmetric_ok": self.symmetric_ok,
            "nonneg_ok": self.nonneg_ok,
            "spectrum_err": self.spectrum_err,
            "diag_err": self.diag_err,
            "tol": self.tol,
        }


def jacobi_eig(
    a: SymMatrix,
    tol: float = DEFAULT_SPECTRUM_TOL,
    max_sweeps: int = 100,
) -> tuple[list[float], OrthMatrix]:
    """Eigendecomposition of a symmetric matrix by cyclic-by-row Jacobi.

    Returns eigenvalues sorted non-increasingly and the matching orthogonal
    eigenvector matrix V (columns).  Sweeps run until the off-diagonal
    Frobenius mass drops below tol * max(1, ||A||_max).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = a.n
    m = a.array.copy()
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    v = np.eye(n)
    scale = max(1.0, a.max_abs())
    threshold = tol * scale

    def off_mass() -> float:
        return float(np.sqrt(np.sum(np.tril(m, -1) ** 2) * 2.0))

    converged = False
    for _ in range(max_sweeps):
        if off_mass() <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= threshold / max(1, n * n):
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = m[p, :].copy()
                rq = m[q, :].copy()
                m[p, :] = c * rp - s * rq
                m[q, :] = s * rp + c * rq
                cp = m[:, p].copy()
                cq = m[:, q].copy()
                m[:, p] = c * cp - s * cq
                m[:, q] = s * cp + c * cq
                m[p, q] = 0.0
                m[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if not converged and off_mass() > threshold:
        raise ConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps "
            f"(off mass {off_mass():.3e} > {threshold:.3e}); matrix is ill-conditioned"
        )

    eig = np.diag(m).copy()
    order = np.argsort(-eig, kind="stable")
    eig = eig[order]
    v = v[:, order]
    return [float(x) for x in eig], OrthMatrix(v, orth_tol=1e-8)


def verify_realization(
    a: SymMatrix,
    sigma: Spectrum,
    diag: Optional[DiagonalList] = None,
    tol: float = DEFAULT_SPECTRUM_TOL,
) -> VerificationReport:
    """Check that `a` realises `sigma` (and, if given, the diagonal multiset)."""
    if a.n != sigma.n:
        raise DimensionMismatchError(f"matrix order {a.n} != spectrum length {sigma.n}")
    if diag is not None and diag.n != sigma.n:
        raise DimensionMismatchError("diagonal list length does not match spectrum")
    nonneg_ok = a.min_entry() >= -tol
    eig, _ = jacobi_eig(a, tol=min(tol, 1e-10))
    target = sorted(sigma.floats(), reverse=True)
    spectrum_err = max(abs(e - t) for e, t in zip(eig, target))
    if diag is None:
        diag_err = 0.0
    else:
        got = sorted(a.diagonal())
        want = sorted(float(v) for v in diag.values)
        diag_err = max(abs(g - w) for g, w in zip(got, want))
    return VerificationReport(
        symmetric_ok=True,  # exact by SymMatrix storage
        nonneg_ok=nonneg_ok,
        spectrum_err=spectrum_err,
        diag_err=diag_err,
        tol=tol,
    )


def perron_vector(a: SymMatrix, tol: float = DEFAULT_SPECTRUM_TOL) -> np.ndarray:
    """Unit eigenvector for the maximal eigenvalue of a nonnegative symmetric
    matrix, sign-normalised so its largest-magnitude entry is positive.

    Raises ReducibleBlockError if the vector has genuinely negative entries
    (degenerate reducible case); the caller should split blocks instead.
    """
    eig, v = jacobi_eig(a, tol=min(tol, 1e-10))
    vec = v.column(0)
    k = int(np.argmax(np.abs(vec)))
    if vec[k] < 0:
        vec = -vec
    if np.min(vec) < -tol:
        raise ReducibleBlockError(
            "Perron vector has negative entries; split the matrix into "
            "irreducible blocks before gluing"
        )
    return vec
