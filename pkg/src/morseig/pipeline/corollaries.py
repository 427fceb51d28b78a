"""
Consequences of the Morse inequalities checked on finished scans: lower bounds on the
number of smooth saddle points (van Hove singularities), strict separation of extreme
values of neighboring branches, and the refined inequality through the strata.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

from morseig.errors import DomainError
from morseig.polyalg.int_poly import IntPoly, poly_sum
from morseig.polyalg.morse_poly import nonsmooth_contribution, torus_poincare
from morseig.pipeline.morse_report import MorseReport

log = logging.getLogger(__name__)

SEPARATION_MARGIN = 1e-9


@dataclass(frozen=True)
class BoundCheck:
    label: str
    k: int
    lhs: int
    bound: int

    @property
    def passed(self) -> bool:
        return self.lhs >= self.bound


@dataclass(frozen=True)
class VanHoveTable:
    d: int
    n: int
    counts: dict[int, dict[int, int]]
    """Branch `k` to its smooth critical point counts by Morse index."""
    checks: tuple[BoundCheck, ...]
    inconclusive: bool

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check_family_reports(reports: Sequence[MorseReport]) -> tuple[int, int]:
    if not reports:
        raise ValueError("Need at least one scan report")
    first = reports[0]
    if any(r.family_name != first.family_name or r.d != first.d for r in reports):
        raise ValueError("Reports must come from scans of the same family")
    ks = [r.k for r in reports]
    if ks != list(range(1, first.n + 1)):
        raise ValueError(f"Need reports for k = 1..{first.n} in order, got k = {ks}")
    return first.d, first.n


def betti_bounds(reports: Sequence[MorseReport], p_manifold: IntPoly) -> VanHoveTable:
    """
    Saddle point bounds for all branches of a family on a closed manifold of dimension 2
    or 3 with the given Poincare polynomial:

    - `d = 2`: `c_1(k) >= b_1` for every `k`;
    - `d = 3`: `c_1(1) >= b_1`, `c_1(k) + c_2(k-1) >= b_1 + b_2 - b_0 - b_3` for `k >= 2`,
      and `c_2(n) >= b_2`.
    """
    d, n = _check_family_reports(reports)
    if d not in (2, 3):
        raise DomainError(f"Saddle point bounds are only available for d = 2 or 3, got d={d}")
    if p_manifold.degree() != d:
        raise ValueError(f"Poincare polynomial {p_manifold} does not have degree d={d}")
    b = p_manifold.coeff
    c = {r.k: r.c_mu for r in reports}

    def count(k: int, mu: int) -> int:
        return c[k].get(mu, 0)

    checks: list[BoundCheck] = []
    if d == 2:
        checks = [BoundCheck(f"c1({k}) >= {b(1)}", k, count(k, 1), b(1)) for k in range(1, n + 1)]
    else:
        mixed = b(1) + b(2) - b(0) - b(3)
        checks.append(BoundCheck(f"c1(1) >= {b(1)}", 1, count(1, 1), b(1)))
        for k in range(2, n + 1):
            lhs = count(k, 1) + count(k - 1, 2)
            checks.append(BoundCheck(f"c1({k}) + c2({k - 1}) >= {mixed}", k, lhs, mixed))
        checks.append(BoundCheck(f"c2({n}) >= {b(2)}", n, count(n, 2), b(2)))
    for check in checks:
        if not check.passed:
            log.warning("Saddle bound fails: %s (lhs %s)", check.label, check.lhs)
    return VanHoveTable(
        d=d,
        n=n,
        counts=c,
        checks=tuple(checks),
        inconclusive=any(r.inconclusive for r in reports),
    )


def van_hove_table(reports: Sequence[MorseReport], d: int) -> VanHoveTable:
    """Saddle point bounds on the torus `T^d`."""
    if d not in (2, 3):
        raise DomainError(f"van Hove bounds are only available on T^2 and T^3, got d={d}")
    return betti_bounds(reports, torus_poincare(d))


@dataclass(frozen=True)
class SeparationCheck:
    k_lower: int
    k_upper: int
    max_lower: float
    max_upper: float
    min_lower: float
    min_upper: float

    @property
    def passed(self) -> bool:
        return (
            self.max_upper - self.max_lower > SEPARATION_MARGIN
            and self.min_upper - self.min_lower > SEPARATION_MARGIN
        )


def minmax_separation(reports: Sequence[MorseReport]) -> list[SeparationCheck]:
    """
    For each adjacent pair of branches, the strict inequalities `max lambda_{k-1} < max
    lambda_k` and `min lambda_{k-1} < min lambda_k`. Empty (vacuously passing) for `n = 1`.
    """
    _check_family_reports(reports)
    return [
        SeparationCheck(
            k_lower=lower.k,
            k_upper=upper.k,
            max_lower=lower.value_max,
            max_upper=upper.value_max,
            min_lower=lower.value_min,
            min_upper=upper.value_min,
        )
        for lower, upper in zip(reports, reports[1:], strict=False)
    ]


class ConseqStatus(StrEnum):
    passed = "passed"
    failed = "failed"
    skipped = "skipped"


@dataclass(frozen=True)
class ConseqResult:
    status: ConseqStatus
    left: IntPoly | None = None
    notice: str = ""


def conseq_check(report: MorseReport) -> ConseqResult:
    """
    The inequalities through the strata: the smooth Morse polynomial plus, for every
    critical point of the branch restricted to a stratum, `t^mu` times the non-smooth
    contribution of its multiplicity and relative index. This left side must dominate the
    Morse polynomial, which must dominate the Poincare polynomial of the manifold.
    Skipped when the stratum data is incomplete or a stratum has dimension above 1.
    """
    if report.inconclusive:
        return ConseqResult(ConseqStatus.skipped, notice="scan is inconclusive")
    if not report.stratum_complete:
        return ConseqResult(ConseqStatus.skipped, notice="stratum data is incomplete")
    points = report.stratum_points
    if any(sp.tangent_dim > 1 for sp in points):
        return ConseqResult(ConseqStatus.skipped, notice="a stratum has dimension above 1")
    if any(not sp.nondegenerate for sp in points):
        return ConseqResult(
            ConseqStatus.skipped, notice="a restricted critical point is degenerate"
        )

    strata = poly_sum(
        nonsmooth_contribution(sp.nu, sp.rel_index, report.field).shift(sp.mu) for sp in points
    )
    left = report.p_smooth + strata
    ok = left.dominates(report.p_morse) and report.p_morse.dominates(report.p_manifold)
    if not ok:
        log.warning(
            "Stratum inequality fails for lambda_%s: %s vs %s", report.k, left, report.p_morse
        )
    return ConseqResult(ConseqStatus.passed if ok else ConseqStatus.failed, left=left)
