"""
Pointwise conditions on the compression map at a degenerate eigenvalue: regularity,
non-degenerate criticality (N), and transversality, plus the Clarke derivative bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from morseig.classify.definiteness import Found, definite_in_span
from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.polyalg.fields import Field, sym_dim
from morseig.spectral.h_operator import HOperator, complement_basis
from morseig.spectral.self_adjoint import Matrix
from morseig.spectral.sym_space import coordinate_matrix


@dataclass(frozen=True)
class RegularCertified:
    witness: NDArray[np.float64]
    """Unit direction `v` with `H(v)` positive definite."""
    margin: float


@dataclass(frozen=True)
class NotCertified:
    best_margin: float


def check_regular(
    h: HOperator, opts: AnalysisOptions = DEFAULT_OPTIONS
) -> RegularCertified | NotCertified:
    """
    Regular iff the range of `h` contains a definite matrix. Either sign certifies, since
    `v` and `-v` are both tangent, so only positive definiteness is searched for.
    """
    res = definite_in_span(
        h.images,
        tol_def=opts.tol_def,
        seed=opts.seed,
        starts_per_dim=opts.starts_per_dim,
        iters=opts.definite_iters,
    )
    if isinstance(res, Found):
        return RegularCertified(witness=res.combo, margin=res.margin)
    return NotCertified(best_margin=res.best_margin)


class NFailure(StrEnum):
    complement_dim_not_1 = "complement_dim_not_1"
    complement_not_definite = "complement_not_definite"


@dataclass(frozen=True)
class NHolds:
    b: Matrix
    """Unit Frobenius norm, positive definite spanning matrix of the complement."""
    margin: float


@dataclass(frozen=True)
class NFails:
    reason: NFailure
    complement_dim: int
    b: Matrix | None = None
    """The spanning matrix when the complement is one-dimensional, sign normalized."""


def check_condition_N(h: HOperator, opts: AnalysisOptions = DEFAULT_OPTIONS) -> NHolds | NFails:
    """
    Condition (N): the orthogonal complement of the range of `h` is one-dimensional and
    spanned by a definite matrix.
    """
    comp = complement_basis(h, opts.rank_tol)
    if len(comp) != 1:
        return NFails(NFailure.complement_dim_not_1, complement_dim=len(comp))
    b = comp[0]
    if float(np.real(np.trace(b))) < 0:
        b = -b
    lam_min = float(np.linalg.eigvalsh(b)[0])
    if lam_min > opts.tol_def * float(np.linalg.norm(b)):
        return NHolds(b=b, margin=lam_min)
    return NFails(NFailure.complement_not_definite, complement_dim=1, b=b)


def check_transversality(h: HOperator, f: Field, opts: AnalysisOptions = DEFAULT_OPTIONS) -> bool:
    """
    Transverse iff the identity together with the images of `h` span Sym_nu as a real
    vector space.
    """
    nu = h.nu
    mats = [np.eye(nu, dtype=f.dtype), *h.images]
    sv = np.linalg.svd(coordinate_matrix(mats, nu, f), compute_uv=False)
    rank = int(np.sum(sv > opts.rank_tol * sv[0])) if sv.size and sv[0] > 0 else 0
    return rank == sym_dim(nu, f)


def clarke_bound(h: HOperator, v: ArrayLike) -> float:
    """
    Upper bound `lambda_max(H(v))` for the Clarke directional derivative of the branch in
    direction `v`.
    """
    vec = np.asarray(v, dtype=np.float64)
    if not np.linalg.norm(vec) > 0:
        raise ValueError("Direction must be nonzero")
    return float(np.linalg.eigvalsh(h.apply(vec))[-1])
