from __future__ import annotations

from enum import StrEnum


class Field(StrEnum):
    """
    Scalar field of the matrix family: real symmetric or complex Hermitian.
    """

    real = "real"
    complex = "complex"

    @property
    def dtype(self) -> type:
        import numpy as np

        return np.float64 if self is Field.real else np.complex128


def s_codim(i: int, f: Field) -> int:
    """
    `dim Sym_i(F) - 1`: the codimension of the locus where an eigenvalue has multiplicity `i`.
    """
    if i < 1:
        raise ValueError(f"s_codim needs i >= 1: {i}")
    if f is Field.real:
        return i * (i + 1) // 2 - 1
    return i * i - 1


def sym_dim(nu: int, f: Field) -> int:
    """Real dimension of Sym_nu(F)."""
    return s_codim(nu, f) + 1 if nu >= 1 else 0
