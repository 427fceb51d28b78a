"""
Global critical point search for one eigenvalue branch on a torus.

Candidates come from two independent sources on a uniform grid:

- Gap dips: cells where the gap between `lambda_k` and a neighboring branch is a local
  minimum and small against the local variation of the branch. These are refined by
  minimizing the spread of the pair, projected onto the stratum and, on strata of positive
  dimension, moved to a critical point of the restricted branch.
- Gradient dips: cells (away from degeneracies) where the finite difference gradient of
  `lambda_k` is a local minimum. These are refined by Newton's method on the
  Hellmann-Feynman gradient.

Refined candidates are merged on the torus metric, sorted, and classified.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from funlog import log_calls
from numpy.typing import NDArray
from scipy.optimize import minimize

from morseig.classify.classification import Regular
from morseig.classify.classify_point import classify_point
from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.errors import MorseigError
from morseig.families.matrix_family import TWO_PI, MatrixFamily, Point
from morseig.pipeline.morse_report import (
    CandidateSource,
    CriticalPointReport,
    MorseReport,
    StratumPoint,
    assemble_report,
)
from morseig.pipeline.torus_grid import (
    GridSpectra,
    check_torus,
    grid_spectra,
    neighbor_offsets,
    rolled,
    torus_distance,
)
from morseig.pipeline.workers import ordered_map
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.morse_poly import torus_poincare
from morseig.spectral.branch_derivatives import branch_gradient, branch_hessian
from morseig.spectral.eig_clusters import cluster_at
from morseig.spectral.self_adjoint import eig_sorted, eigvals_sorted
from morseig.stratum.stratum_chart import locate_stratum_critical, project_to_stratum, stratum_chart

log = logging.getLogger(__name__)

GAP_SLACK = 2.0
SMOOTH_FRACTION = 0.25
NEWTON_ITERS = 50
NEWTON_GRAD_TOL = 1e-9
SMOOTH_ACCEPT_TOL = 1e-7
CONSTANT_TOL = 1e-12
SNAP_TOL = 1e-12


@dataclass(frozen=True)
class Candidate:
    location: Point
    residual: float
    basin: int
    source: CandidateSource
    stratum: StratumPoint | None = None
    stratum_error: str | None = None


def canonical(x: NDArray[np.float64]) -> Point:
    """Torus coordinates in `[0, 2 pi)`, with values within rounding of `2 pi` sent to 0."""
    y = np.mod(x, TWO_PI)
    return np.where(y >= TWO_PI - SNAP_TOL, 0.0, y) + 0.0


def local_variation(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Largest absolute difference to any Moore neighbor."""
    d = a.ndim
    return np.max([np.abs(rolled(a, off) - a) for off in neighbor_offsets(d)], axis=0)


def is_local_min(a: NDArray[np.float64]) -> NDArray[np.bool_]:
    mask = np.ones(a.shape, dtype=bool)
    for off in neighbor_offsets(a.ndim):
        mask &= a <= rolled(a, off)
    return mask


def grid_gradient_norm(a: NDArray[np.float64], spacing: float) -> NDArray[np.float64]:
    total = np.zeros_like(a)
    for j in range(a.ndim):
        total += ((np.roll(a, -1, axis=j) - np.roll(a, 1, axis=j)) / (2 * spacing)) ** 2
    return np.sqrt(total)


def _sides(k: int, n: int) -> list[tuple[int, int]]:
    return [(lo, lo + 1) for lo in (k - 1, k) if lo >= 1 and lo + 1 <= n]


def _near_degenerate(spectra: GridSpectra, k: int) -> NDArray[np.bool_]:
    lam = spectra.eigenvalues
    thresh = GAP_SLACK * np.sqrt(spectra.d) * local_variation(spectra.branch(k))
    mask = np.zeros(lam.shape[:-1], dtype=bool)
    for lo, hi in _sides(k, spectra.n):
        mask |= lam[..., hi - 1] - lam[..., lo - 1] <= thresh
    return mask


def gap_seeds(spectra: GridSpectra, k: int) -> list[tuple[tuple[int, ...], tuple[int, int]]]:
    """Grid cells where the gap from `lambda_k` to a neighbor dips, with the pair involved."""
    lam = spectra.eigenvalues
    thresh = GAP_SLACK * np.sqrt(spectra.d) * local_variation(spectra.branch(k))
    seeds = []
    for lo, hi in _sides(k, spectra.n):
        gap = lam[..., hi - 1] - lam[..., lo - 1]
        mask = is_local_min(gap) & (gap <= thresh)
        seeds.extend((tuple(int(i) for i in idx), (lo, hi)) for idx in np.argwhere(mask))
    return seeds


def smooth_seeds(spectra: GridSpectra, k: int) -> list[tuple[int, ...]]:
    """Grid cells away from degeneracies where the finite difference gradient dips."""
    g = grid_gradient_norm(spectra.branch(k), spectra.spacing)
    gmax = float(g.max())
    if gmax <= 0:
        return []
    mask = is_local_min(g) & (g <= SMOOTH_FRACTION * gmax) & ~_near_degenerate(spectra, k)
    return [tuple(int(i) for i in idx) for idx in np.argwhere(mask)]


def refine_smooth(
    fam: MatrixFamily, k: int, x0: Point, basin: int, spacing: float, opts: AnalysisOptions
) -> Candidate | None:
    """
    Newton's method on the branch gradient, steps clipped to one grid spacing. Returns
    None (logged) if the iterate reaches a degeneracy or the gradient does not vanish.
    """
    x = x0
    grad = branch_gradient(fam, x, k)
    for _ in range(NEWTON_ITERS):
        if cluster_at(eig_sorted(fam(x)), k, opts.tol_cluster).nu > 1:
            log.debug("Smooth seed %s ran into a degeneracy at %s, dropped", basin, x)
            return None
        if float(np.linalg.norm(grad)) <= NEWTON_GRAD_TOL:
            break
        step = -np.linalg.lstsq(branch_hessian(fam, x, k), grad, rcond=None)[0]
        norm = float(np.linalg.norm(step))
        if norm > spacing:
            step *= spacing / norm
        x = x + step
        grad = branch_gradient(fam, x, k)
    residual = float(np.linalg.norm(grad))
    if residual > SMOOTH_ACCEPT_TOL:
        log.debug("Smooth seed %s: Newton stopped with gradient %.3g, dropped", basin, residual)
        return None
    return Candidate(
        location=canonical(x), residual=residual, basin=basin, source=CandidateSource.smooth
    )


def _minimize_spread(fam: MatrixFamily, x0: Point, group: tuple[int, int], spacing: float) -> Point:
    lo, hi = group

    def spread(y: NDArray[np.float64]) -> float:
        w = eigvals_sorted(fam(y))
        return float(w[hi - 1] - w[lo - 1])

    simplex = np.vstack([x0, x0 + 0.5 * spacing * np.eye(fam.d)])
    res = minimize(
        spread,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-12,
            "fatol": 1e-15,
            "maxiter": 400 * fam.d,
        },
    )
    return res.x if float(res.fun) <= spread(x0) else x0


def refine_degenerate(
    fam: MatrixFamily,
    k: int,
    x0: Point,
    group: tuple[int, int],
    basin: int,
    spacing: float,
    opts: AnalysisOptions,
) -> Candidate | None:
    """
    Minimize the spread of the pair, project onto the stratum of the full cluster there,
    then find a critical point of the branch along the stratum. A seed whose pair never
    meets is dropped. Failures after a successful projection keep the projected point but
    leave its stratum data empty.
    """
    x = _minimize_spread(fam, x0, group, spacing)
    s = eig_sorted(fam(x))
    pair_width = float(s.eigenvalues[group[1] - 1] - s.eigenvalues[group[0] - 1])
    c = cluster_at(s, k, max(opts.tol_cluster, 10 * pair_width / s.scale))
    if c.lo > group[0] or c.hi < group[1]:
        c_group = group
    else:
        c_group = (c.lo, c.hi)
    try:
        proj = project_to_stratum(fam, x, k, opts, group=c_group)
    except MorseigError as e:
        log.debug("Gap seed %s (group %s..%s) dropped: %s", basin, c_group[0], c_group[1], e)
        return None
    try:
        located = locate_stratum_critical(fam, proj.x, k, opts, ref=proj.ref)
        chart = stratum_chart(fam, located.x, k, opts, ref=located.ref)
    except MorseigError as e:
        log.warning("Degenerate point near %s: stratum analysis failed: %s", proj.x, e)
        return Candidate(
            location=canonical(proj.x),
            residual=proj.residual_norm,
            basin=basin,
            source=CandidateSource.degenerate,
            stratum_error=str(e),
        )
    loc = canonical(chart.base_point)
    stratum = StratumPoint(
        location=loc,
        k=k,
        lo=chart.ref.lo,
        hi=chart.ref.hi,
        mu=chart.mu,
        nondegenerate=chart.nondegenerate,
        tangent_dim=chart.tangent_dim,
    )
    return Candidate(
        location=loc,
        residual=chart.residual_norm,
        basin=basin,
        source=CandidateSource.degenerate,
        stratum=stratum,
    )


def merge_candidates(candidates: list[Candidate], radius: float) -> list[Candidate]:
    """
    Keep one candidate per `radius` ball on the torus, preferring lower residual, and return
    the survivors sorted by location.
    """
    kept: list[Candidate] = []
    for cand in sorted(candidates, key=lambda c: (c.residual, tuple(c.location))):
        if all(torus_distance(cand.location, other.location) > radius for other in kept):
            kept.append(cand)
    return sorted(kept, key=lambda c: tuple(c.location))


def _is_constant(branch: NDArray[np.float64]) -> bool:
    lo, hi = float(branch.min()), float(branch.max())
    return hi - lo <= CONSTANT_TOL * (1.0 + max(abs(lo), abs(hi)))


@log_calls(level="info", show_timing_only=True)
def scan(
    fam: MatrixFamily,
    k: int,
    grid_per_dim: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    spectra: GridSpectra | None = None,
    p_manifold: IntPoly | None = None,
) -> MorseReport:
    """
    Find the critical points of `lambda_k` on the torus, classify them and check the Morse
    inequalities against `p_manifold` (the torus by default). Deterministic for fixed
    inputs and options, whatever the number of workers.
    """
    check_torus(fam, grid_per_dim)
    if not 1 <= k <= fam.n:
        raise ValueError(f"Branch index k={k} outside 1..{fam.n}")
    if spectra is None:
        spectra = grid_spectra(fam, grid_per_dim, opts)
    elif spectra.grid != grid_per_dim or spectra.family_name != fam.name:
        raise ValueError("Precomputed grid spectra do not match this family and grid")
    p_manifold = p_manifold if p_manifold is not None else torus_poincare(fam.d)
    branch = spectra.branch(k)
    value_range = (float(branch.min()), float(branch.max()))

    def report(reports, stratum_points, stratum_complete, flags) -> MorseReport:
        return assemble_report(
            family_name=fam.name,
            d=fam.d,
            n=fam.n,
            k=k,
            field=fam.field,
            grid=grid_per_dim,
            reports=reports,
            stratum_points=stratum_points,
            stratum_complete=stratum_complete,
            flags=flags,
            p_manifold=p_manifold,
            value_range=value_range,
        )

    if _is_constant(branch):
        log.warning("lambda_%s of %s is constant: every point is critical", k, fam.name)
        flag = f"not_covered: lambda_{k} is constant, every point is a degenerate critical point"
        return report([], [], False, [flag])

    shape = branch.shape
    spacing = spectra.spacing

    def run_gap(seed: tuple[tuple[int, ...], tuple[int, int]]) -> Candidate | None:
        idx, group = seed
        basin = int(np.ravel_multi_index(idx, shape))
        return refine_degenerate(fam, k, spectra.coords(idx), group, basin, spacing, opts)

    def run_smooth(idx: tuple[int, ...]) -> Candidate | None:
        basin = int(np.ravel_multi_index(idx, shape))
        return refine_smooth(fam, k, spectra.coords(idx), basin, spacing, opts)

    g_seeds = gap_seeds(spectra, k)
    s_seeds = smooth_seeds(spectra, k)
    log.info("%s, k=%s: %s gap seeds, %s gradient seeds", fam.name, k, len(g_seeds), len(s_seeds))

    refined = [
        *ordered_map(run_gap, g_seeds, opts.workers),
        *ordered_map(run_smooth, s_seeds, opts.workers),
    ]
    merged = merge_candidates([c for c in refined if c is not None], TWO_PI / (4 * grid_per_dim))
    classified = ordered_map(
        lambda c: classify_point(fam, c.location, k, opts), merged, opts.workers
    )

    reports: list[CriticalPointReport] = []
    stratum_points: list[StratumPoint] = []
    flags: list[str] = []
    stratum_complete = True
    for cand, cls in zip(merged, classified, strict=True):
        if cand.stratum is not None:
            stratum_points.append(cand.stratum)
        if cand.stratum_error is not None:
            stratum_complete = False
        if isinstance(cls.verdict, Regular):
            log.debug("Candidate at %s is regular, not a critical point", cand.location)
            continue
        if not cls.is_conclusive:
            reason = getattr(cls.verdict, "reason", "degenerate smooth critical point")
            log.warning(
                "Inconclusive point of lambda_%s at %s: %s (%s)", k, cand.location, cls.kind, reason
            )
            flags.append(f"{cls.kind} at {np.round(cand.location, 6).tolist()}: {reason}")
        reports.append(
            CriticalPointReport(
                location=cand.location,
                value=cls.value,
                classification=cls,
                basin=cand.basin,
                residual=cand.residual,
                source=cand.source,
            )
        )
    return report(reports, stratum_points, stratum_complete, flags)


def scan_all(
    fam: MatrixFamily,
    grid_per_dim: int,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
    p_manifold: IntPoly | None = None,
) -> list[MorseReport]:
    """Scans of every branch `k = 1..n`, sharing one grid eigendecomposition."""
    spectra = grid_spectra(fam, grid_per_dim, opts)
    return [
        scan(fam, k, grid_per_dim, opts, spectra=spectra, p_manifold=p_manifold)
        for k in range(1, fam.n + 1)
    ]
