from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from morseig.polyalg.int_poly import IntPoly
from morseig.spectral.self_adjoint import Matrix
from morseig.stratum.extremum import Extremum


@dataclass(frozen=True)
class Regular:
    witness_direction: NDArray[np.float64]
    margin: float


@dataclass(frozen=True)
class SmoothCritical:
    mu: int
    nondegenerate: bool
    hessian_eigs: NDArray[np.float64]


@dataclass(frozen=True)
class NonDegenerateCritical:
    nu: int
    rel_index: int
    mu: int
    contribution: IntPoly
    z2_poly: IntPoly
    extremum: Extremum
    tangent_dim: int


@dataclass(frozen=True)
class Borderline:
    complement_matrix: Matrix | None
    reason: str


@dataclass(frozen=True)
class NotCovered:
    reason: str


Verdict = Regular | SmoothCritical | NonDegenerateCritical | Borderline | NotCovered

VERDICT_NAMES: dict[type, str] = {
    Regular: "regular",
    SmoothCritical: "smooth_critical",
    NonDegenerateCritical: "nondegenerate_critical",
    Borderline: "borderline",
    NotCovered: "not_covered",
}


@dataclass(frozen=True)
class Diagnostics:
    nu: int
    rel_index: int
    rank: int
    complement_dim: int
    definite_margin: float
    """
    Best `lambda_min` found in the range of the compression map (the gradient norm if
    `nu = 1`).
    """
    condition_n_margin: float | None = None
    transversal: bool | None = None
    isolation: float = float("inf")
    """Gap from the eigenvalue group to the rest of the spectrum."""
    kernel_angle: float | None = None
    stratum_residual: float | None = None


@dataclass(frozen=True)
class Classification:
    point: NDArray[np.float64]
    k: int
    value: float
    verdict: Verdict
    diagnostics: Diagnostics

    @property
    def kind(self) -> str:
        return VERDICT_NAMES[type(self.verdict)]

    @property
    def is_critical(self) -> bool:
        return not isinstance(self.verdict, Regular)

    @property
    def is_conclusive(self) -> bool:
        """False for verdicts outside the reach of the theory (and degenerate smooth points)."""
        v = self.verdict
        if isinstance(v, Borderline | NotCovered):
            return False
        if isinstance(v, SmoothCritical):
            return v.nondegenerate
        return True

    @property
    def contribution(self) -> IntPoly:
        """This point's term in the Morse polynomial, zero unless non-degenerate critical."""
        v = self.verdict
        if isinstance(v, NonDegenerateCritical):
            return v.contribution
        if isinstance(v, SmoothCritical) and v.nondegenerate:
            return IntPoly.monomial(v.mu)
        return IntPoly.zero()

    @property
    def mu(self) -> int | None:
        v = self.verdict
        return v.mu if isinstance(v, SmoothCritical | NonDegenerateCritical) else None
