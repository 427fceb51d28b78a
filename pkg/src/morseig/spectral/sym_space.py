"""
Sym_nu(F) as a real inner product space: real symmetric or complex Hermitian `nu x nu`
matrices with the Frobenius pairing `Re Tr(X Y*)`. Over the complex field it has real
dimension `nu^2`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from morseig.polyalg.fields import Field, sym_dim
from morseig.spectral.self_adjoint import Matrix

SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=64)
def _basis_array(nu: int, f: Field) -> NDArray:
    mats: list[NDArray] = []
    for i in range(nu):
        e = np.zeros((nu, nu), dtype=f.dtype)
        e[i, i] = 1.0
        mats.append(e)
    for i in range(nu):
        for j in range(i + 1, nu):
            e = np.zeros((nu, nu), dtype=f.dtype)
            e[i, j] = e[j, i] = 1.0 / SQRT2
            mats.append(e)
    if f is Field.complex:
        for i in range(nu):
            for j in range(i + 1, nu):
                e = np.zeros((nu, nu), dtype=f.dtype)
                e[i, j] = 1j / SQRT2
                e[j, i] = -1j / SQRT2
                mats.append(e)
    arr = np.stack(mats)
    arr.setflags(write=False)
    return arr


def sym_basis(nu: int, f: Field) -> list[Matrix]:
    """Orthonormal real basis of Sym_nu(F)."""
    if nu < 1:
        raise ValueError(f"nu must be positive: {nu}")
    return [m.copy() for m in _basis_array(nu, f)]


def sym_coordinates(x: NDArray, f: Field) -> NDArray[np.float64]:
    """Coordinates of a self-adjoint matrix in `sym_basis`."""
    basis = _basis_array(x.shape[0], f)
    return np.real(np.einsum("bij,ij->b", basis.conj(), x))


def sym_from_coordinates(c: NDArray, nu: int, f: Field) -> Matrix:
    return np.einsum("b,bij->ij", c, _basis_array(nu, f))


def coordinate_matrix(
    mats: list[NDArray] | tuple[NDArray, ...], nu: int, f: Field
) -> NDArray[np.float64]:
    """Columns are the `sym_basis` coordinates of each matrix: shape `(dim Sym_nu, len(mats))`."""
    if not mats:
        return np.zeros((sym_dim(nu, f), 0))
    return np.stack([sym_coordinates(m, f) for m in mats], axis=1)


def frobenius(x: NDArray, y: NDArray) -> float:
    return float(np.real(np.vdot(y, x)))


def sym2_coordinates(a: NDArray) -> tuple[float, float, float]:
    """
    Chart `(x, y, z) -> [[x+y, z], [z, x-y]]` of real symmetric 2x2 matrices.
    """
    if a.shape != (2, 2):
        raise ValueError(f"Expected a 2x2 matrix: {a.shape}")
    a = np.real(a)
    return (
        float(0.5 * (a[0, 0] + a[1, 1])),
        float(0.5 * (a[0, 0] - a[1, 1])),
        float(0.5 * (a[0, 1] + a[1, 0])),
    )


def in_definite_cone(x: float, y: float, z: float) -> bool:
    """True iff the chart point is a (positive or negative) definite matrix."""
    return x * x > y * y + z * z


## Tests


def test_basis_is_orthonormal():
    for f in Field:
        for nu in (1, 2, 3):
            basis = sym_basis(nu, f)
            assert len(basis) == sym_dim(nu, f)
            gram = np.array([[frobenius(a, b) for b in basis] for a in basis])
            assert np.allclose(gram, np.eye(len(basis)))


def test_sym2_chart():
    assert sym2_coordinates(np.array([[2.0, 1.0], [1.0, 0.0]])) == (1.0, 1.0, 1.0)
    assert in_definite_cone(*sym2_coordinates(np.eye(2)))
    assert not in_definite_cone(*sym2_coordinates(np.diag([1.0, 0.0])))
