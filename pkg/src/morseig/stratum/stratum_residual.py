"""
The constant multiplicity stratum as a zero set.

Near a point where eigenvalues `lo..hi` coincide, the eigenspace of that group is continued
from a frozen reference basis `U_ref` by the polar factor of `P(x) U_ref`, with `P(x)` the
total eigenprojector of the group. The compression of `F(x)` to that basis is a scalar
matrix exactly on the stratum, so the independent entries of its traceless part give a
smooth system of `s(nu)` equations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from morseig.errors import ProjectorContinuationError
from morseig.families.matrix_family import MatrixFamily
from morseig.polyalg.fields import Field, s_codim
from morseig.spectral.eig_clusters import EigenCluster
from morseig.spectral.self_adjoint import Matrix, SpectralData, eig_sorted, symmetrize

SQRT2 = np.sqrt(2.0)

MIN_OVERLAP = 0.5
"""Smallest singular value of `V(x)* U_ref` accepted when continuing the basis."""


@dataclass(frozen=True)
class StratumRef:
    """
    Branch `k` inside the eigenvalue group `lo..hi` (1-based, inclusive), with the reference
    isometry used to continue the group's eigenspace.
    """

    k: int
    lo: int
    hi: int
    u_ref: Matrix

    @property
    def nu(self) -> int:
        return self.hi - self.lo + 1

    @property
    def rel_index(self) -> int:
        return self.hi - self.k + 1

    def codim(self, f: Field) -> int:
        return s_codim(self.nu, f)

    def with_basis(self, u: Matrix) -> StratumRef:
        return replace(self, u_ref=u)

    @classmethod
    def from_cluster(cls, c: EigenCluster) -> StratumRef:
        return cls(k=c.k, lo=c.lo, hi=c.hi, u_ref=c.isometry_U)


@dataclass(frozen=True)
class ResidualEval:
    residual: NDArray[np.float64]
    basis: Matrix
    """Continued isometry at the evaluation point."""
    mean: float
    """Mean of the group eigenvalues."""
    spectrum: SpectralData

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.residual))


def traceless_components(m: Matrix, f: Field) -> NDArray[np.float64]:
    """
    Independent real entries of the traceless part of a `nu x nu` self-adjoint matrix:
    scaled off-diagonal real (and imaginary) parts, then the first `nu - 1` diagonal entries.
    """
    nu = m.shape[0]
    t = m - (np.trace(m).real / nu) * np.eye(nu)
    iu = np.triu_indices(nu, 1)
    parts = [SQRT2 * np.real(t[iu])]
    if f is Field.complex:
        parts.append(SQRT2 * np.imag(t[iu]))
    parts.append(np.real(np.diag(t))[: nu - 1])
    return np.concatenate(parts)


def continued_basis(s: SpectralData, ref: StratumRef) -> Matrix:
    """Polar factor of `P U_ref`, with `P` the eigenprojector of the group `lo..hi`."""
    w = s.eigenvalues
    lo, hi = ref.lo, ref.hi
    width = float(w[hi - 1] - w[lo - 1])
    below = float(w[lo - 1] - w[lo - 2]) if lo > 1 else np.inf
    above = float(w[hi] - w[hi - 1]) if hi < s.n else np.inf
    if min(below, above) <= width:
        raise ProjectorContinuationError(
            f"Eigenvalue group {lo}..{hi} is not isolated "
            f"(width {width:.3g}, gaps {below:.3g}, {above:.3g})"
        )
    vc = s.eigenvectors[:, lo - 1 : hi]
    a = vc.conj().T @ ref.u_ref
    wl, sv, zh = np.linalg.svd(a)
    if sv[-1] < MIN_OVERLAP:
        raise ProjectorContinuationError(
            f"Eigenspace rotated too far from the reference (overlap {sv[-1]:.3g})"
        )
    return vc @ (wl @ zh)


def evaluate_residual(fam: MatrixFamily, x: ArrayLike, ref: StratumRef) -> ResidualEval:
    mat = fam(x)
    s = eig_sorted(mat)
    u = continued_basis(s, ref)
    m = symmetrize(u.conj().T @ mat @ u)
    return ResidualEval(
        residual=traceless_components(m, fam.field),
        basis=u,
        mean=float(np.mean(s.eigenvalues[ref.lo - 1 : ref.hi])),
        spectrum=s,
    )


def stratum_residual(fam: MatrixFamily, x: ArrayLike, ref: StratumRef) -> NDArray[np.float64]:
    """The `s(nu)` residual components; zero exactly on the stratum."""
    return evaluate_residual(fam, x, ref).residual


def residual_jacobian(fam: MatrixFamily, x: ArrayLike, ref: StratumRef) -> NDArray[np.float64]:
    """Central difference Jacobian, shape `(s(nu), d)`."""
    pt = fam.point(x)
    h = 1e-6 * (1.0 + float(np.linalg.norm(pt)))
    cols = []
    for j in range(fam.d):
        e = np.zeros(fam.d)
        e[j] = h
        up, down = stratum_residual(fam, pt + e, ref), stratum_residual(fam, pt - e, ref)
        cols.append((up - down) / (2 * h))
    return np.stack(cols, axis=1)
