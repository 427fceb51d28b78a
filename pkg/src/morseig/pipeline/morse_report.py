"""
Results of a global scan: the critical points found, the stratum data collected along the
way, and the assembled Morse polynomial with its inequality verdict.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from morseig.classify.classification import Classification, NonDegenerateCritical, SmoothCritical
from morseig.polyalg.fields import Field
from morseig.polyalg.int_poly import IntPoly, poly_sum
from morseig.polyalg.morse_poly import MorseVerdict, Violated, morse_division


class CandidateSource(StrEnum):
    smooth = "smooth"
    degenerate = "degenerate"


@dataclass(frozen=True)
class StratumPoint:
    """
    A critical point of the branch restricted to a constant multiplicity stratum, whether or
    not it is critical for the branch itself.
    """

    location: NDArray[np.float64]
    k: int
    lo: int
    hi: int
    mu: int
    nondegenerate: bool
    tangent_dim: int

    @property
    def nu(self) -> int:
        return self.hi - self.lo + 1

    @property
    def rel_index(self) -> int:
        return self.hi - self.k + 1


@dataclass(frozen=True)
class CriticalPointReport:
    location: NDArray[np.float64]
    value: float
    classification: Classification
    basin: int
    """Flat index of the grid cell whose seed led here."""
    residual: float
    """Final gradient norm (smooth) or stratum residual (degenerate)."""
    source: CandidateSource


@dataclass(frozen=True)
class MorseReport:
    family_name: str
    d: int
    n: int
    k: int
    field: Field
    grid: int
    reports: tuple[CriticalPointReport, ...]
    p_morse: IntPoly
    p_manifold: IntPoly
    verdict: MorseVerdict
    c_mu: dict[int, int]
    """Number of non-degenerate smooth critical points of each Morse index."""
    d_mu: dict[int, IntPoly]
    """Summed contributions of non-smooth critical points, by Morse index along the stratum."""
    p_smooth: IntPoly
    stratum_points: tuple[StratumPoint, ...]
    stratum_complete: bool
    """False if some degenerate point could not be analyzed on its stratum."""
    flags: tuple[str, ...]
    value_min: float
    value_max: float

    @property
    def inconclusive(self) -> bool:
        return bool(self.flags)

    @property
    def satisfied(self) -> bool:
        return self.verdict.ok

    @property
    def exit_code(self) -> int:
        """0 clean pass, 2 inequality violated, 3 inconclusive (takes precedence)."""
        if self.inconclusive:
            return 3
        return 2 if isinstance(self.verdict, Violated) else 0


def assemble_report(
    *,
    family_name: str,
    d: int,
    n: int,
    k: int,
    field: Field,
    grid: int,
    reports: Sequence[CriticalPointReport],
    stratum_points: Sequence[StratumPoint],
    stratum_complete: bool,
    flags: Sequence[str],
    p_manifold: IntPoly,
    value_range: tuple[float, float],
) -> MorseReport:
    """
    Sum the contributions of all critical points and run the Morse division.
    """
    c_mu: Counter[int] = Counter()
    d_mu: defaultdict[int, IntPoly] = defaultdict(IntPoly.zero)
    for r in reports:
        v = r.classification.verdict
        if isinstance(v, SmoothCritical) and v.nondegenerate:
            c_mu[v.mu] += 1
        elif isinstance(v, NonDegenerateCritical):
            d_mu[v.mu] = d_mu[v.mu] + v.contribution
    p_smooth = IntPoly((c_mu.get(j, 0) for j in range(max(c_mu, default=-1) + 1)))
    p_morse = p_smooth + poly_sum(d_mu.values())

    values = [r.value for r in reports]
    lo, hi = value_range
    return MorseReport(
        family_name=family_name,
        d=d,
        n=n,
        k=k,
        field=field,
        grid=grid,
        reports=tuple(reports),
        p_morse=p_morse,
        p_manifold=p_manifold,
        verdict=morse_division(p_morse, p_manifold),
        c_mu=dict(sorted(c_mu.items())),
        d_mu=dict(sorted(d_mu.items())),
        p_smooth=p_smooth,
        stratum_points=tuple(stratum_points),
        stratum_complete=stratum_complete,
        flags=tuple(flags),
        value_min=min([lo, *values]),
        value_max=max([hi, *values]),
    )
