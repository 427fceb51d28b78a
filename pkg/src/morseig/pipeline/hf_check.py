"""
Cross-check of Hellmann-Feynman slopes against secant slopes of the sorted eigenvalues,
over seeded random trigonometric families.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from funlog import log_calls

from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.families.matrix_family import TWO_PI, MatrixFamily, Point
from morseig.families.random_family import random_family
from morseig.pipeline.workers import ordered_map
from morseig.polyalg.fields import Field
from morseig.spectral.eig_clusters import cluster_at
from morseig.spectral.h_operator import hf_slopes
from morseig.spectral.self_adjoint import eig_sorted, eigvals_sorted

log = logging.getLogger(__name__)

HF_TOL = 1e-5
MIN_GAP = 1e-2


@dataclass(frozen=True)
class HfSample:
    family_name: str
    k: int
    point: Point
    direction: Point
    hf_slope: float
    secant_slope: float

    @property
    def rel_error(self) -> float:
        return abs(self.hf_slope - self.secant_slope) / max(abs(self.hf_slope), 1.0)


@dataclass(frozen=True)
class HfCheckResult:
    trials: int
    checked: int
    skipped: int
    """Branches too close to a neighbor for a reliable secant."""
    max_rel_error: float
    worst: HfSample | None
    tol: float
    crossings: int = 0
    """Samples taken on both branches of a forced double eigenvalue."""

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.max_rel_error <= self.tol


def secant_slope(fam: MatrixFamily, x: Point, v: Point, k: int, t: float) -> float:
    """Central secant of `lambda_k` along `v` with one Richardson step."""

    def central(h: float) -> float:
        up = eigvals_sorted(fam(x + h * v))[k - 1]
        down = eigvals_sorted(fam(x - h * v))[k - 1]
        return float(up - down) / (2 * h)

    return (4 * central(t / 2) - central(t)) / 3


def forward_slope(fam: MatrixFamily, x: Point, v: Point, k: int, t: float) -> float:
    """
    One-sided secant of `lambda_k` along `v` with one Richardson step. Valid at a crossing,
    where the sorted branch is only one-sided differentiable.
    """
    base = eigvals_sorted(fam(x))[k - 1]

    def forward(h: float) -> float:
        return float(eigvals_sorted(fam(x + h * v))[k - 1] - base) / h

    return 2 * forward(t / 2) - forward(t)


def degenerate_at(fam: MatrixFamily, x: Point, k: int) -> MatrixFamily:
    """
    `fam` plus a constant matrix that lowers `lambda_{k+1}(x)` onto `lambda_k(x)`, so branches
    `k` and `k + 1` cross at `x`. The differential is unchanged.
    """
    if not 1 <= k < fam.n:
        raise ValueError(f"Need 1 <= k < n for a crossing: k={k}, n={fam.n}")
    s = eig_sorted(fam(x))
    u = s.eigenvectors[:, k]
    drop = float(s.eigenvalues[k] - s.eigenvalues[k - 1])
    return fam.offset(-drop * np.outer(u, u.conj()))


def check_degenerate(
    fam: MatrixFamily, x: Point, v: Point, k: int, opts: AnalysisOptions
) -> tuple[list[HfSample], int]:
    """
    Compare both slopes of a forced double eigenvalue (branches `k`, `k + 1` at `x`) with
    one-sided secants. Skipped when another eigenvalue is within `MIN_GAP` of the crossing
    or the two slopes are closer than `MIN_GAP`.
    """
    g = degenerate_at(fam, x, k)
    c = cluster_at(eig_sorted(g(x)), k, opts.tol_cluster)
    if c.nu != 2 or c.isolation < MIN_GAP:
        return [], 1
    slopes = hf_slopes(g, x, v, c)
    spread = float(slopes[1] - slopes[0])
    if spread < MIN_GAP:
        return [], 1
    t = 1e-5 * min(1.0, spread, c.isolation)
    samples = [
        HfSample(g.name, c.lo + j, x, v, float(slope), forward_slope(g, x, v, c.lo + j, t))
        for j, slope in enumerate(slopes)
    ]
    return samples, 0


def check_family(
    fam: MatrixFamily, x: Point, v: Point, opts: AnalysisOptions
) -> tuple[list[HfSample], int]:
    s = eig_sorted(fam(x))
    w = s.eigenvalues
    samples, skipped = [], 0
    for k in range(1, fam.n + 1):
        gap = min(
            float(w[k - 1] - w[k - 2]) if k > 1 else np.inf,
            float(w[k] - w[k - 1]) if k < fam.n else np.inf,
        )
        if gap < MIN_GAP:
            skipped += 1
            continue
        c = cluster_at(s, k, opts.tol_cluster)
        hf = float(hf_slopes(fam, x, v, c)[0])
        sec = secant_slope(fam, x, v, k, 1e-3 * min(1.0, gap))
        samples.append(HfSample(fam.name, k, x, v, hf, sec))
    return samples, skipped


def _trial(seed: int, trial: int, max_d: int, max_n: int):
    rng = np.random.default_rng([seed, trial])
    d = int(rng.integers(1, max_d + 1))
    n = int(rng.integers(2, max_n + 1))
    field = Field.real if trial % 2 == 0 else Field.complex
    fam = random_family(int(rng.integers(2**31)), d, n, field)
    x = rng.uniform(0.0, TWO_PI, size=d)
    v = rng.normal(size=d)
    return fam, x, v / np.linalg.norm(v)


@log_calls(level="info", show_timing_only=True)
def run_hf_check(
    trials: int = 200,
    seed: int = 0,
    tol: float = HF_TOL,
    max_d: int = 3,
    max_n: int = 6,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
) -> HfCheckResult:
    """
    Compare first order branch slopes from the compression map with Richardson
    extrapolated secants at a random point and direction of each random family. Each trial
    also forces a double eigenvalue at the point and checks both of its one-sided slopes.
    Fields alternate between real and complex.
    """
    if trials < 1:
        raise ValueError(f"Need at least one trial: {trials}")

    def one(trial: int) -> tuple[list[HfSample], list[HfSample], int]:
        fam, x, v = _trial(seed, trial, max_d, max_n)
        simple, skipped = check_family(fam, x, v, opts)
        crossing, skipped_crossing = check_degenerate(fam, x, v, 1 + trial % (fam.n - 1), opts)
        return simple, crossing, skipped + skipped_crossing

    results = ordered_map(one, range(trials), opts.workers)
    samples = [s for simple, crossing, _ in results for s in (*simple, *crossing)]
    crossings = sum(len(crossing) for _, crossing, _ in results)
    skipped = sum(skip for _, _, skip in results)
    worst = max(samples, key=lambda s: s.rel_error, default=None)
    result = HfCheckResult(
        trials=trials,
        checked=len(samples),
        skipped=skipped,
        max_rel_error=worst.rel_error if worst else 0.0,
        worst=worst,
        tol=tol,
        crossings=crossings,
    )
    if not result.passed:
        log.warning("Hellmann-Feynman check failed: max relative error %.3g", result.max_rel_error)
    return result
