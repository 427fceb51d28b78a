from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from morseig.errors import EigensolverError, NotSelfAdjointError
from morseig.polyalg.fields import Field

log = logging.getLogger(__name__)

SELF_ADJOINT_TOL = 1e-12

Matrix = NDArray[np.float64] | NDArray[np.complex128]


def field_of(a: NDArray) -> Field:
    return Field.complex if np.iscomplexobj(a) else Field.real


def symmetrize(a: NDArray) -> NDArray:
    return 0.5 * (a + a.conj().T)


def as_self_adjoint(a: ArrayLike, field: Field | None = None) -> Matrix:
    """
    Validate and symmetrize a square matrix. Accepts deviations from self-adjointness up to
    `1e-12 (1 + |A|_F)`. A complex matrix with negligible imaginary part is kept complex only
    if `field` asks for it.
    """
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NotSelfAdjointError(f"Expected a nonempty square matrix, got shape {arr.shape}")
    if field is None:
        field = field_of(arr)
    arr = arr.astype(field.dtype) if field is Field.complex else _as_real(arr)
    deviation = float(np.linalg.norm(arr - arr.conj().T))
    if deviation > SELF_ADJOINT_TOL * (1.0 + float(np.linalg.norm(arr))):
        raise NotSelfAdjointError(f"Matrix is not self-adjoint (deviation {deviation:.3g})")
    return symmetrize(arr)


def _as_real(arr: NDArray) -> NDArray[np.float64]:
    if np.iscomplexobj(arr):
        if float(np.abs(arr.imag).max()) > SELF_ADJOINT_TOL * (1.0 + float(np.abs(arr).max())):
            raise NotSelfAdjointError("Complex entries in a real symmetric matrix")
        arr = arr.real
    return arr.astype(np.float64)


@dataclass(frozen=True)
class SpectralData:
    """
    Ascending eigenvalues and orthonormal eigenvectors (as columns) of a self-adjoint matrix.
    """

    eigenvalues: NDArray[np.float64]
    eigenvectors: Matrix

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def scale(self) -> float:
        """`1 + max|lambda|`, the reference magnitude for relative tolerances."""
        return 1.0 + float(np.abs(self.eigenvalues).max())

    def residual(self, a: NDArray) -> float:
        """Frobenius norm of `A - V diag(lambda) V*`."""
        v = self.eigenvectors
        return float(np.linalg.norm(a - (v * self.eigenvalues) @ v.conj().T))


def eig_sorted(a: ArrayLike) -> SpectralData:
    """
    Full eigendecomposition with eigenvalues in increasing order (LAPACK `eigh`).
    """
    mat = as_self_adjoint(a)
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as e:
        n = mat.shape[0]
        raise EigensolverError(f"Eigensolver did not converge for a {n}x{n} matrix: {e}") from e
    if not np.all(np.isfinite(w)):
        raise EigensolverError("Eigensolver returned non-finite eigenvalues")
    return SpectralData(eigenvalues=w, eigenvectors=v)


def eigvals_sorted(a: ArrayLike) -> NDArray[np.float64]:
    return eig_sorted(a).eigenvalues


## Tests


def test_diagonal_and_pauli():
    s = eig_sorted(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(s.eigenvalues, [1, 2, 3])
    s = eig_sorted(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(s.eigenvalues, [-1, 1])
    assert s.residual(np.array([[0.0, 1.0], [1.0, 0.0]])) < 1e-12


def test_rejects_non_symmetric():
    import pytest

    with pytest.raises(NotSelfAdjointError):
        as_self_adjoint(np.array([[0.0, 1.0], [0.0, 0.0]]))
