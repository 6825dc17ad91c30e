import math
import random

import numpy as np
import pytest

from sniep.errors import DimensionMismatchError
from sniep.numkit import (
    DiagonalList,
    Spectrum,
    SymMatrix,
    jacobi_eig,
    perron_vector,
    verify_realization,
)

S32 = 1.0 / (2.0 * math.sqrt(2.0))
S34 = math.sqrt(3.0) / 4.0

# The 5x5 matrix of the worked example, realising (7,5,-2,-4,-6) with
# zero diagonal.
WORKED_A = SymMatrix(
    [
        [0, 6, S32, S34, S34],
        [6, 0, S32, S34, S34],
        [S32, S32, 0, math.sqrt(6), math.sqrt(6)],
        [S34, S34, math.sqrt(6), 0, 4],
        [S34, S34, math.sqrt(6), 4, 0],
    ]
)


def test_spectrum_invariants():
    s = Spectrum.of(3, 1, -2)
    assert s.perron == 3 and s.n == 3 and s.total == 2
    with pytest.raises(ValueError):
        Spectrum.of(1, 2)
    with pytest.raises(DimensionMismatchError):
        Spectrum(())
    with pytest.raises(ValueError):
        DiagonalList.of(1, -1)


def test_jacobi_identity():
    eig, v = jacobi_eig(SymMatrix(np.eye(3)))
    assert eig == [1.0, 1.0, 1.0]
    assert np.allclose(v.array @ v.array.T, np.eye(3))


def test_jacobi_2x2_offdiag():
    # characteristic polynomial x^2 - 36 has roots +-6
    eig, v = jacobi_eig(SymMatrix([[0, 6], [6, 0]]))
    assert abs(eig[0] - 6) < 1e-12 and abs(eig[1] + 6) < 1e-12
    recon = v.array @ np.diag(eig) @ v.array.T
    assert np.max(np.abs(recon - [[0, 6], [6, 0]])) < 1e-10


def test_jacobi_worked_example_matrix():
    eig, _ = jacobi_eig(WORKED_A)
    assert np.max(np.abs(np.array(eig) - [7, 5, -2, -4, -6])) < 1e-9


def test_jacobi_random_reconstruction():
    rng = random.Random(20240817)
    for _ in range(200):
        n = rng.randint(1, 8)
        m = np.array(
            [[rng.randint(-40, 40) / 4.0 for _ in range(n)] for _ in range(n)]
        )
        a = SymMatrix(m)
        eig, v = jacobi_eig(a)
        assert sorted(eig, reverse=True) == eig
        recon = v.array @ np.diag(eig) @ v.array.T
        assert np.max(np.abs(recon - a.array)) <= 1e-9 * max(1.0, a.max_abs())
        assert np.max(np.abs(v.array.T @ v.array - np.eye(n))) <= 1e-10
        # independent oracle: numpy's LAPACK eigensolver
        ref = np.sort(np.linalg.eigvalsh(a.array))[::-1]
        assert np.max(np.abs(ref - eig)) < 1e-8 * max(1.0, a.max_abs())


def test_verify_worked_example():
    rep = verify_realization(
        WORKED_A, Spectrum.of(7, 5, -2, -4, -6), DiagonalList.zeros(5)
    )
    assert rep.passed


def test_verify_trivial_cases():
    eye = SymMatrix(np.eye(2))
    assert verify_realization(eye, Spectrum.of(1, 1)).passed
    rep = verify_realization(eye, Spectrum.of(2, 1))
    assert not rep.passed
    assert abs(rep.spectrum_err - 1.0) < 1e-12


def test_verify_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        verify_realization(SymMatrix(np.eye(2)), Spectrum.of(1, 1, 1))


def test_perron_vector():
    v = perron_vector(SymMatrix([[0, 6], [6, 0]]))
    assert np.allclose(v, [1 / math.sqrt(2)] * 2)
    v = perron_vector(SymMatrix([[5.0]]))
    assert np.allclose(v, [1.0])
    v = perron_vector(SymMatrix([[0, 4], [4, 0]]))
    assert np.allclose(v, [1 / math.sqrt(2)] * 2)


def test_matrix_json_round_trip():
    doc = WORKED_A.to_json()
    back = SymMatrix.from_json(doc)
    assert np.array_equal(back.array, WORKED_A.array)
    assert doc["n"] == 5


def test_symmetry_is_exact():
    m = SymMatrix([[1.0, 0.3000000001], [0.3, 2.0]])
    assert m[0, 1] == m[1, 0]
