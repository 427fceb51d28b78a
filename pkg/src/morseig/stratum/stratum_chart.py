"""
Local numerics on a constant multiplicity stratum: Gauss-Newton projection onto it, its
tangent space, the Hessian of the branch restricted to it, and Newton search for critical
points of that restriction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import subspace_angles

from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.errors import MorseigError, NoConvergence, NotTransverseError
from morseig.families.matrix_family import MatrixFamily, Point
from morseig.spectral.eig_clusters import EigenCluster, cluster_at, make_cluster
from morseig.spectral.h_operator import HOperator, compress, differential, kernel_basis
from morseig.spectral.self_adjoint import eig_sorted
from morseig.stratum.stratum_residual import (
    ResidualEval,
    StratumRef,
    evaluate_residual,
    residual_jacobian,
)

log = logging.getLogger(__name__)

MAX_BACKTRACKS = 20
GRAD_TOL = 1e-9


def reference_at(
    fam: MatrixFamily, x: ArrayLike, k: int, opts: AnalysisOptions = DEFAULT_OPTIONS
) -> StratumRef:
    """Reference for the eigenvalue cluster containing branch `k` at `x`."""
    s = eig_sorted(fam(x))
    return StratumRef.from_cluster(cluster_at(s, k, opts.tol_cluster))


def seed_reference(
    fam: MatrixFamily,
    x: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    group: tuple[int, int] | None = None,
) -> StratumRef:
    """
    Reference for projecting a point near (not on) a stratum. Uses `group` if given, else
    the cluster at `x`, else pairs `k` with its nearest neighboring eigenvalue.
    """
    s = eig_sorted(fam(x))
    if group is not None:
        lo, hi = group
        return StratumRef.from_cluster(make_cluster(s, k, lo, hi))
    c = cluster_at(s, k, opts.tol_cluster)
    if c.nu > 1 or s.n == 1:
        return StratumRef.from_cluster(c)
    w = s.eigenvalues
    below = w[k - 1] - w[k - 2] if k > 1 else np.inf
    above = w[k] - w[k - 1] if k < s.n else np.inf
    lo, hi = (k - 1, k) if below <= above else (k, k + 1)
    return StratumRef.from_cluster(make_cluster(s, k, lo, hi))


def residual_tolerance(fam: MatrixFamily, x: Point, opts: AnalysisOptions) -> float:
    return opts.tol_res * (1.0 + float(np.linalg.norm(fam(x))))


@dataclass(frozen=True)
class Projection:
    x: Point
    residual_norm: float
    iterations: int
    ref: StratumRef
    """Reference continued to the converged point."""
    mean: float


def _gauss_newton_step(
    fam: MatrixFamily, x: Point, ev: ResidualEval, ref: StratumRef
) -> tuple[Point, ResidualEval] | None:
    jac = residual_jacobian(fam, x, ref)
    step = np.linalg.lstsq(jac, -ev.residual, rcond=None)[0]
    alpha = 1.0
    for _ in range(MAX_BACKTRACKS):
        y = x + alpha * step
        try:
            ev_y = evaluate_residual(fam, y, ref)
        except MorseigError:
            ev_y = None
        if ev_y is not None and ev_y.norm < ev.norm:
            return y, ev_y
        alpha *= 0.5
    return None


def project_to_stratum(
    fam: MatrixFamily,
    x0: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    ref: StratumRef | None = None,
    group: tuple[int, int] | None = None,
) -> Projection:
    """
    Gauss-Newton (minimum norm steps, backtracking) on the stratum residual until its norm
    is at most `tol_res (1 + |F|)`. After convergence one more step is tried to push the
    residual to rounding level. A point already on the stratum is returned unchanged.
    """
    x = fam.point(x0)
    if ref is None:
        ref = seed_reference(fam, x, k, opts, group)
    ev = evaluate_residual(fam, x, ref)
    iterations = 0
    while ev.norm > residual_tolerance(fam, x, opts):
        if iterations >= opts.max_projection_iters:
            raise NoConvergence("stratum projection", iterations, ev.norm)
        stepped = _gauss_newton_step(fam, x, ev, ref)
        if stepped is None:
            raise NoConvergence("stratum projection (line search)", iterations, ev.norm)
        x, ev = stepped
        ref = ref.with_basis(ev.basis)
        iterations += 1
    if iterations > 0 and ev.norm > 0:
        stepped = _gauss_newton_step(fam, x, ev, ref)
        if stepped is not None:
            x, ev = stepped
            ref = ref.with_basis(ev.basis)
    return Projection(x=x, residual_norm=ev.norm, iterations=iterations, ref=ref, mean=ev.mean)


@dataclass(frozen=True)
class TangentSpace:
    basis: NDArray[np.float64]
    """Orthonormal columns, shape `(d, d - s(nu))`."""
    transversality_margin: float
    """Smallest over largest singular value of the residual Jacobian (1 if there is none)."""


def tangent_space(
    fam: MatrixFamily, x: ArrayLike, ref: StratumRef, opts: AnalysisOptions = DEFAULT_OPTIONS
) -> TangentSpace:
    pt = fam.point(x)
    codim = ref.codim(fam.field)
    if codim == 0:
        return TangentSpace(basis=np.eye(fam.d), transversality_margin=1.0)
    if codim > fam.d:
        raise NotTransverseError(f"Stratum codimension {codim} exceeds d={fam.d}")
    jac = residual_jacobian(fam, pt, ref)
    _u, sv, vt = np.linalg.svd(jac, full_matrices=True)
    margin = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    if margin <= opts.tol_def:
        raise NotTransverseError(f"Residual Jacobian is rank deficient (margin {margin:.3g})")
    return TangentSpace(basis=vt[codim:].T.copy(), transversality_margin=margin)


def tangent_basis(
    fam: MatrixFamily,
    x_on_s: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    ref: StratumRef | None = None,
) -> NDArray[np.float64]:
    """Orthonormal basis of the stratum tangent space: the null space of the residual Jacobian."""
    ref = ref or reference_at(fam, x_on_s, k, opts)
    return tangent_space(fam, x_on_s, ref, opts).basis


def h_operator_on(fam: MatrixFamily, x: Point, ref: StratumRef) -> HOperator:
    """Compression map at `x` using the continued basis of `ref`."""
    ev = evaluate_residual(fam, x, ref)
    images = tuple(compress(m, ev.basis) for m in differential(fam, x))
    return HOperator(images=images, field=fam.field)


def kernel_angle(
    fam: MatrixFamily, x: Point, ref: StratumRef, basis: NDArray, opts: AnalysisOptions
) -> float:
    """Largest principal angle between the tangent space and the kernel of the compression map."""
    kb = kernel_basis(h_operator_on(fam, x, ref), opts.rank_tol)
    if kb.shape[1] != basis.shape[1]:
        return float(np.pi / 2)
    if basis.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(basis, kb)))


@dataclass(frozen=True)
class RestrictedHessian:
    hessian: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    mu: int
    nondegenerate: bool


def _retracted_mean(fam: MatrixFamily, y: Point, ref: StratumRef, opts: AnalysisOptions) -> float:
    return project_to_stratum(fam, y, ref.k, opts, ref=ref).mean


def _second_differences(
    fam: MatrixFamily, x: Point, ref: StratumRef, basis: NDArray, h: float, opts: AnalysisOptions
) -> NDArray[np.float64]:
    m = basis.shape[1]

    def g(tau: NDArray) -> float:
        return _retracted_mean(fam, x + basis @ tau, ref, opts)

    g0 = g(np.zeros(m))
    hess = np.zeros((m, m))
    eye = np.eye(m) * h
    for i in range(m):
        hess[i, i] = (g(eye[i]) - 2 * g0 + g(-eye[i])) / h**2
        for j in range(i + 1, m):
            hess[i, j] = hess[j, i] = (
                g(eye[i] + eye[j]) - g(eye[i] - eye[j]) - g(-eye[i] + eye[j]) + g(-eye[i] - eye[j])
            ) / (4 * h**2)
    return hess


def classify_hessian(hess: NDArray[np.float64], opts: AnalysisOptions) -> RestrictedHessian:
    if hess.size == 0:
        return RestrictedHessian(hessian=hess, eigenvalues=np.zeros(0), mu=0, nondegenerate=True)
    hess = 0.5 * (hess + hess.T)
    eigs = np.linalg.eigvalsh(hess)
    thresh = opts.tol_hess * (1.0 + float(np.linalg.norm(hess)))
    return RestrictedHessian(
        hessian=hess,
        eigenvalues=eigs,
        mu=int(np.sum(eigs < -thresh)),
        nondegenerate=bool(np.all(np.abs(eigs) > thresh)),
    )


def restricted_hessian(
    fam: MatrixFamily,
    x_on_s: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    ref: StratumRef | None = None,
    basis: NDArray | None = None,
) -> RestrictedHessian:
    """
    Hessian of the branch restricted to the stratum, in tangent coordinates: second
    differences of the group mean along retracted steps, with one Richardson halving.
    """
    x = fam.point(x_on_s)
    ref = ref or reference_at(fam, x, k, opts)
    if basis is None:
        basis = tangent_space(fam, x, ref, opts).basis
    if basis.shape[1] == 0:
        return classify_hessian(np.zeros((0, 0)), opts)
    h = 1e-3 * (1.0 + float(np.linalg.norm(x)))
    coarse = _second_differences(fam, x, ref, basis, h, opts)
    fine = _second_differences(fam, x, ref, basis, h / 2, opts)
    return classify_hessian((4 * fine - coarse) / 3, opts)


def mean_gradient(fam: MatrixFamily, x: Point, ref: StratumRef) -> NDArray[np.float64]:
    """
    Gradient of the group mean: `Re Tr(U* dF_j U) / nu`, the trace of the eigenprojector
    times `dF_j`.
    """
    ev = evaluate_residual(fam, x, ref)
    u = ev.basis
    traces = [np.real(np.trace(u.conj().T @ m @ u)) for m in differential(fam, x)]
    return np.array(traces, dtype=np.float64) / ref.nu


def locate_stratum_critical(
    fam: MatrixFamily,
    x_on_s: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    ref: StratumRef | None = None,
    trust_radius: float = 0.25,
    max_iters: int = 50,
) -> Projection:
    """
    Newton iteration for a critical point of the branch restricted to the stratum, steps
    taken in tangent coordinates and retracted by projection. Isolated strata return at once.
    """
    proj = project_to_stratum(fam, x_on_s, k, opts, ref=ref)
    g = np.zeros(0)
    for _ in range(max_iters):
        x, ref = proj.x, proj.ref
        basis = tangent_space(fam, x, ref, opts).basis
        if basis.shape[1] == 0:
            return proj
        g = basis.T @ mean_gradient(fam, x, ref)
        if float(np.linalg.norm(g)) <= GRAD_TOL * (1.0 + abs(proj.mean)):
            return proj
        hess = restricted_hessian(fam, x, k, opts, ref=ref, basis=basis).hessian
        step = -np.linalg.lstsq(hess, g, rcond=None)[0]
        norm = float(np.linalg.norm(step))
        if norm > trust_radius:
            step *= trust_radius / norm
        proj = project_to_stratum(fam, x + basis @ step, k, opts, ref=ref)
    raise NoConvergence("stratum critical point search", max_iters, float(np.linalg.norm(g)))


@dataclass(frozen=True)
class StratumChart:
    """
    Local picture of the stratum at a point: where it is, its tangent space, and the
    restricted Hessian with its Morse index.
    """

    base_point: Point
    tangent_basis: NDArray[np.float64]
    residual_norm: float
    hessian_eigs: NDArray[np.float64]
    mu: int
    nondegenerate: bool
    kernel_angle: float
    transversality_margin: float
    value: float
    ref: StratumRef

    @property
    def tangent_dim(self) -> int:
        return int(self.tangent_basis.shape[1])


def stratum_chart(
    fam: MatrixFamily,
    x: ArrayLike,
    k: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    ref: StratumRef | None = None,
    cluster: EigenCluster | None = None,
    locate: bool = False,
) -> StratumChart:
    if ref is None and cluster is not None:
        ref = StratumRef.from_cluster(cluster)
    proj = (locate_stratum_critical if locate else project_to_stratum)(fam, x, k, opts, ref=ref)
    ts = tangent_space(fam, proj.x, proj.ref, opts)
    hess = restricted_hessian(fam, proj.x, k, opts, ref=proj.ref, basis=ts.basis)
    return StratumChart(
        base_point=proj.x,
        tangent_basis=ts.basis,
        residual_norm=proj.residual_norm,
        hessian_eigs=hess.eigenvalues,
        mu=hess.mu,
        nondegenerate=hess.nondegenerate,
        kernel_angle=kernel_angle(fam, proj.x, proj.ref, ts.basis, opts),
        transversality_margin=ts.transversality_margin,
        value=proj.mean,
        ref=proj.ref,
    )
