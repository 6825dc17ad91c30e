"""Gluing two symmetric nonnegative matrices at a shared scalar c.

Matrix A holds c as a diagonal entry, matrix B has Perron root c.  The
merged matrix C of order k+l-1 realises both spectra with one copy of c
cancelled, and the block-assembled Z diagonalises it.  The designated
diagonal position of A is moved last internally; rows of C are reported
as (rows of A without that position, then rows of B).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, NotRealizableError
from .numkit import (
    DEFAULT_SPECTRUM_TOL,
    OrthMatrix,
    Spectrum,
    SymMatrix,
    jacobi_eig,
    perron_vector,
)

NONNEG_TOL = 1e-10


@dataclass(frozen=True)
class GlueInput:
    a: SymMatrix
    pos: int  # diagonal position of A holding the glue value c
    b: SymMatrix
    c: Optional[float] = None  # defaults to A[pos, pos]
    x: Optional[OrthMatrix] = None  # diagonaliser of A
    y: Optional[OrthMatrix] = None  # diagonaliser of B, Perron column first
    tol: float = DEFAULT_SPECTRUM_TOL

    def glue_value(self) -> float:
        return self.a[self.pos, self.pos] if self.c is None else float(self.c)


def _diagonalizer(m: SymMatrix, tol: float) -> OrthMatrix:
    _, v = jacobi_eig(m, tol=min(tol, 1e-10))
    return v


def _perron_first(b: SymMatrix, tol: float) -> OrthMatrix:
    eig, v = jacobi_eig(b, tol=min(tol, 1e-10))
    cols = v.array.copy()
    cols[:, 0] = perron_vector(b, tol=tol)
    return OrthMatrix(cols, orth_tol=1e-8)


def smigoc_glue(inp: GlueInput) -> tuple[SymMatrix, OrthMatrix]:
    """Merge A (diagonal entry c at `pos`) with B (Perron root c).

    Returns (C, Z) with C nonnegative symmetric of order k+l-1 and Z an
    orthogonal diagonaliser of C.  The spectrum of C is checked against
    the merged spectra within tol.
    """
    k, l = inp.a.n, inp.b.n
    if not 0 <= inp.pos < k:
        raise DimensionMismatchError(f"designated position {inp.pos} outside 0..{k - 1}")
    c = inp.glue_value()
    tol = inp.tol
    if abs(inp.a[inp.pos, inp.pos] - c) > tol:
        raise NotRealizableError(
            f"A[{inp.pos},{inp.pos}] = {inp.a[inp.pos, inp.pos]} does not hold the glue value {c}"
        )
    if inp.a.min_entry() < -NONNEG_TOL or inp.b.min_entry() < -NONNEG_TOL:
        raise NotRealizableError("glue inputs must be entrywise nonnegative")
    eig_b, _ = jacobi_eig(inp.b, tol=min(tol, 1e-10))
    if abs(eig_b[0] - c) > tol:
        raise NotRealizableError(
            f"Perron root of B is {eig_b[0]}, expected the glue value {c}"
        )

    if k == 1:
        y = inp.y if inp.y is not None else _perron_first(inp.b, tol)
        return inp.b, y
    if l == 1:
        x = inp.x if inp.x is not None else _diagonalizer(inp.a, tol)
        return inp.a, x

    # Symmetric permutation moving the designated position last.
    perm = [i for i in range(k) if i != inp.pos] + [inp.pos]
    ap = inp.a.array[np.ix_(perm, perm)]
    a1 = ap[: k - 1, : k - 1]
    a_col = ap[: k - 1, k - 1]
    if a_col.size and float(np.min(a_col)) < -NONNEG_TOL:
        raise NotRealizableError("off-position column of A must be nonnegative")

    if inp.x is not None:
        # A supplied diagonaliser refers to A's original row order.
        x = OrthMatrix(inp.x.array[perm, :], orth_tol=1e-8)
    else:
        _, x = jacobi_eig(SymMatrix(ap), tol=min(tol, 1e-10))
    y = inp.y if inp.y is not None else _perron_first(inp.b, tol)

    u_block = x.array[: k - 1, :]
    u_last = x.array[k - 1, :]
    v_col = y.array[:, 0]
    v_block = y.array[:, 1:]

    cmat = np.zeros((k + l - 1, k + l - 1))
    cmat[: k - 1, : k - 1] = a1
    cmat[: k - 1, k - 1 :] = np.outer(a_col, v_col)
    cmat[k - 1 :, : k - 1] = np.outer(v_col, a_col)
    cmat[k - 1 :, k - 1 :] = inp.b.array
    cfull = SymMatrix(cmat)

    z = np.zeros((k + l - 1, k + l - 1))
    z[: k - 1, :k] = u_block
    z[k - 1 :, :k] = np.outer(v_col, u_last)
    z[k - 1 :, k:] = v_block
    zorth = OrthMatrix(z, orth_tol=1e-8)

    eig_a, _ = jacobi_eig(SymMatrix(ap), tol=min(tol, 1e-10))
    expected = sorted(eig_a + eig_b[1:], reverse=True)
    eig_c, _ = jacobi_eig(cfull, tol=min(tol, 1e-10))
    err = max(abs(e - g) for e, g in zip(expected, eig_c))
    if err > 10 * tol:
        raise NotRealizableError(f"glued spectrum off by {err:.3e} (> {10 * tol:.1e})")
    if cfull.min_entry() < -NONNEG_TOL:
        raise NotRealizableError("glued matrix has negative entries")
    return cfull, zorth


def glue_spectra(mu: Spectrum, nu: Spectrum, c: Fraction) -> Spectrum:
    """Exact spectrum-level gluing: merge mu with nu minus one copy of its
    Perron root c, sorted non-increasingly."""
    if nu.perron != c:
        raise NotRealizableError(f"glue value {c} is not the Perron root of {nu.values}")
    if mu.perron < c:
        raise NotRealizableError(
            f"Perron {mu.perron} of the host list is below the glue value {c}"
        )
    merged = sorted(mu.values + nu.values[1:], reverse=True)
    return Spectrum(tuple(merged))
