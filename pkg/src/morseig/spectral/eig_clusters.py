from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from morseig.spectral.self_adjoint import Matrix, SpectralData


def orthonormalize(u: NDArray) -> NDArray:
    """
    QR re-orthonormalization that keeps each column's phase (`R` has a positive diagonal
    after the fix-up), so nearly orthonormal inputs barely move.
    """
    q, r = np.linalg.qr(u)
    d = np.diag(r).copy()
    mags = np.abs(d)
    phases = np.where(mags > 0, d / np.where(mags > 0, mags, 1.0), 1.0)
    return q * phases


@dataclass(frozen=True)
class EigenCluster:
    """
    Group of (numerically) coinciding eigenvalues containing branch `k`. All indices are
    1-based; `rel_index` counts the position of `k` from the top of the group.
    """

    k: int
    lo: int
    hi: int
    eigenvalues: NDArray[np.float64]
    isometry_U: Matrix
    gap_below: float
    """Distance from the bottom of the cluster to the next lower eigenvalue (inf if none)."""
    gap_above: float
    """Distance from the top of the cluster to the next higher eigenvalue (inf if none)."""

    @property
    def nu(self) -> int:
        return self.hi - self.lo + 1

    @property
    def rel_index(self) -> int:
        return self.hi - self.k + 1

    @property
    def mean(self) -> float:
        return float(self.eigenvalues.mean())

    @property
    def width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    @property
    def isolation(self) -> float:
        return min(self.gap_below, self.gap_above)


def make_cluster(s: SpectralData, k: int, lo: int, hi: int) -> EigenCluster:
    """Cluster for an explicitly chosen index range `lo..hi` (1-based, inclusive)."""
    if not 1 <= lo <= k <= hi <= s.n:
        raise ValueError(f"Invalid cluster range: lo={lo}, k={k}, hi={hi}, n={s.n}")
    w = s.eigenvalues
    u = orthonormalize(s.eigenvectors[:, lo - 1 : hi])
    gap_below = float(w[lo - 1] - w[lo - 2]) if lo > 1 else float("inf")
    gap_above = float(w[hi] - w[hi - 1]) if hi < s.n else float("inf")
    return EigenCluster(
        k=k,
        lo=lo,
        hi=hi,
        eigenvalues=w[lo - 1 : hi].copy(),
        isometry_U=u,
        gap_below=gap_below,
        gap_above=gap_above,
    )


def cluster_at(s: SpectralData, k: int, tol: float = 1e-6) -> EigenCluster:
    """
    Maximal run of eigenvalues around branch `k` whose consecutive gaps are at most
    `tol (1 + max|lambda|)`.
    """
    if not 1 <= k <= s.n:
        raise ValueError(f"Branch index out of range: k={k}, n={s.n}")
    if tol <= 0:
        raise ValueError(f"Cluster tolerance must be positive: {tol}")
    w = s.eigenvalues
    thresh = tol * s.scale
    lo = hi = k
    while lo > 1 and w[lo - 1] - w[lo - 2] <= thresh:
        lo -= 1
    while hi < s.n and w[hi] - w[hi - 1] <= thresh:
        hi += 1
    return make_cluster(s, k, lo, hi)


## Tests


def test_cluster_indices():
    s = SpectralData(np.array([0.0, 0.0, 5.0]), np.eye(3))
    c = cluster_at(s, 1)
    assert (c.nu, c.rel_index) == (2, 2)
    c = cluster_at(s, 2)
    assert (c.nu, c.rel_index) == (2, 1)
    s = SpectralData(np.array([-1.0, 0.0, 0.0, 0.0, 3.0]), np.eye(5))
    c = cluster_at(s, 3)
    assert (c.lo, c.hi, c.nu, c.rel_index) == (2, 4, 3, 2)
    assert c.gap_below == 1.0 and c.gap_above == 3.0
