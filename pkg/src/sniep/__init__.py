"""Constructive solver and certificate toolkit for the symmetric
nonnegative inverse eigenvalue problem."""

from .errors import (
    BudgetExceededError,
    ConvergenceError,
    DimensionMismatchError,
    NotRealizableError,
    ReducibleBlockError,
    SniepError,
)
from .numkit import (
    DiagonalList,
    OrthMatrix,
    Spectrum,
    SymMatrix,
    VerificationReport,
    jacobi_eig,
    perron_vector,
    verify_realization,
)

__all__ = [
    "BudgetExceededError",
    "ConvergenceError",
    "DiagonalList",
    "DimensionMismatchError",
    "NotRealizableError",
    "OrthMatrix",
    "ReducibleBlockError",
    "SniepError",
    "Spectrum",
    "SymMatrix",
    "VerificationReport",
    "jacobi_eig",
    "perron_vector",
    "verify_realization",
]

__version__ = "0.1.0"
