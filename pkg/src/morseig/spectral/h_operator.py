"""
The compression map: a tangent direction `v` goes to `U* (dF(x) v) U` on the eigenspace of
a degenerate eigenvalue. Its eigenvalues are the first-order slopes of the branches that
split off (Hellmann-Feynman).

Images depend on the choice of `U` only up to unitary conjugation `W* H W`, so everything
computed here (ranks, definiteness, slopes) is independent of that choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from morseig.errors import NotIsometryError
from morseig.families.matrix_family import MatrixFamily
from morseig.polyalg.fields import Field, sym_dim
from morseig.spectral.eig_clusters import EigenCluster
from morseig.spectral.self_adjoint import Matrix, symmetrize
from morseig.spectral.sym_space import coordinate_matrix, sym_from_coordinates

ISOMETRY_TOL = 1e-8
RANK_TOL = 1e-8


def compress(x: NDArray, u: NDArray) -> Matrix:
    """`U* X U` for an isometry `U` (`U* U = I`)."""
    nu = u.shape[1]
    deviation = float(np.linalg.norm(u.conj().T @ u - np.eye(nu)))
    if deviation > ISOMETRY_TOL:
        raise NotIsometryError(f"Compression needs an isometry (deviation {deviation:.3g})")
    return symmetrize(u.conj().T @ x @ u)


def fd_step(x: NDArray) -> float:
    return max(1e-5, 1e-4 * float(np.max(np.abs(x), initial=1.0)))


def differential(fam: MatrixFamily, x: ArrayLike) -> list[Matrix]:
    """
    Partial derivatives of the family at `x`, one matrix per coordinate: analytic when the
    family provides it, otherwise 4th order central differences.
    """
    pt = fam.point(x)
    analytic = fam.diff(pt)
    if analytic is not None:
        return analytic
    h = fd_step(pt)
    out = []
    for j in range(fam.d):
        e = np.zeros(fam.d)
        e[j] = h
        dm = (-fam(pt + 2 * e) + 8 * fam(pt + e) - 8 * fam(pt - e) + fam(pt - 2 * e)) / (12 * h)
        out.append(symmetrize(dm))
    return out


@dataclass(frozen=True)
class HOperator:
    """
    Values of the compression map on the coordinate directions of the parameter space.
    """

    images: tuple[Matrix, ...]
    field: Field

    @property
    def nu(self) -> int:
        return self.images[0].shape[0] if self.images else 0

    @property
    def d(self) -> int:
        return len(self.images)

    def apply(self, v: ArrayLike) -> Matrix:
        vec = np.asarray(v, dtype=np.float64).reshape(-1)
        if vec.shape != (self.d,):
            raise ValueError(f"Direction must have length {self.d}: {vec.shape}")
        return np.einsum("j,jab->ab", vec, np.stack(self.images))

    def coordinates(self) -> NDArray[np.float64]:
        """Real coordinate matrix of shape `(dim Sym_nu, d)`."""
        return coordinate_matrix(self.images, self.nu, self.field)

    def singular_values(self) -> NDArray[np.float64]:
        return np.linalg.svd(self.coordinates(), compute_uv=False)

    def rank(self, rank_tol: float = RANK_TOL) -> int:
        return _rank(self.singular_values(), rank_tol)

    def slopes(self, v: ArrayLike) -> NDArray[np.float64]:
        return np.linalg.eigvalsh(self.apply(v))


def _rank(sv: NDArray[np.float64], rank_tol: float) -> int:
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rank_tol * sv[0]))


def h_operator(fam: MatrixFamily, x: ArrayLike, c: EigenCluster) -> HOperator:
    u = c.isometry_U
    return HOperator(images=tuple(compress(m, u) for m in differential(fam, x)), field=fam.field)


def complement_basis(h: HOperator, rank_tol: float = RANK_TOL) -> list[Matrix]:
    """
    Orthonormal basis (Frobenius pairing, real coefficients) of the orthogonal complement
    of the range of `h` in Sym_nu.
    """
    coords = h.coordinates()
    u, sv, _vt = np.linalg.svd(coords, full_matrices=True)
    r = _rank(sv, rank_tol)
    return [sym_from_coordinates(u[:, j], h.nu, h.field) for j in range(r, sym_dim(h.nu, h.field))]


def kernel_basis(h: HOperator, rank_tol: float = RANK_TOL) -> NDArray[np.float64]:
    """Orthonormal basis of the kernel of `h` in parameter space, as columns `(d, m)`."""
    coords = h.coordinates()
    _u, sv, vt = np.linalg.svd(coords, full_matrices=True)
    r = _rank(sv, rank_tol)
    return vt[r:].T.copy()


def hf_slopes(
    fam: MatrixFamily, x: ArrayLike, v: ArrayLike, c: EigenCluster
) -> NDArray[np.float64]:
    """
    First-order slopes of the `nu` branches leaving the cluster `c` in direction `v`,
    ascending.
    """
    vec = np.asarray(v, dtype=np.float64)
    if not np.linalg.norm(vec) > 0:
        raise ValueError("Direction must be nonzero")
    return h_operator(fam, x, c).slopes(vec)
