from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from morseig.families.matrix_family import MatrixFamily
from morseig.spectral.h_operator import differential
from morseig.spectral.self_adjoint import eig_sorted

HESSIAN_STEP = 1e-5


def branch_gradient(fam: MatrixFamily, x: ArrayLike, k: int) -> NDArray[np.float64]:
    """
    Gradient of a simple eigenvalue branch `lambda_k` (Hellmann-Feynman: `u* dF_j u`).
    Meaningless where `lambda_k` is degenerate.
    """
    pt = fam.point(x)
    u = eig_sorted(fam(pt)).eigenvectors[:, k - 1]
    return np.array([float(np.real(np.vdot(u, m @ u))) for m in differential(fam, pt)])


def branch_hessian(
    fam: MatrixFamily, x: ArrayLike, k: int, h: float = HESSIAN_STEP
) -> NDArray[np.float64]:
    """Central differences of `branch_gradient`, symmetrized."""
    pt = fam.point(x)
    cols = []
    for j in range(fam.d):
        e = np.zeros(fam.d)
        e[j] = h
        cols.append((branch_gradient(fam, pt + e, k) - branch_gradient(fam, pt - e, k)) / (2 * h))
    hess = np.stack(cols, axis=1)
    return 0.5 * (hess + hess.T)
