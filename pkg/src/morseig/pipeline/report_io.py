"""
JSON records for everything the CLI reports. Polynomials are stored as coefficient lists
(lowest degree first) together with their caret notation.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from prettyfmt import fmt_path
from pydantic import BaseModel

from morseig.classify.classification import (
    Borderline,
    Classification,
    NonDegenerateCritical,
    NotCovered,
    Regular,
    SmoothCritical,
)
from morseig.families.trig_poly import MatrixEntries
from morseig.pipeline.corollaries import ConseqResult, SeparationCheck, VanHoveTable
from morseig.pipeline.hf_check import HfCheckResult
from morseig.pipeline.morse_report import CriticalPointReport, MorseReport, StratumPoint
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.morse_poly import Satisfied
from morseig.stratum.stratum_trace import StratumTrace

log = logging.getLogger(__name__)


class PolyRecord(BaseModel):
    coeffs: list[int]
    text: str

    @classmethod
    def of(cls, p: IntPoly) -> PolyRecord:
        return cls(coeffs=list(p.coeffs), text=p.to_str())

    def to_poly(self) -> IntPoly:
        return IntPoly(self.coeffs)


def _vec(x) -> list[float]:
    return [float(v) for v in np.asarray(x).reshape(-1)]


class DiagnosticsRecord(BaseModel):
    nu: int
    rel_index: int
    rank: int
    complement_dim: int
    definite_margin: float
    condition_n_margin: float | None = None
    transversal: bool | None = None
    isolation: float | None = None
    kernel_angle: float | None = None
    stratum_residual: float | None = None


class ClassificationRecord(BaseModel):
    point: list[float]
    k: int
    value: float
    kind: str
    conclusive: bool
    mu: int | None = None
    contribution: PolyRecord
    z2_contribution: PolyRecord | None = None
    extremum: str | None = None
    tangent_dim: int | None = None
    nondegenerate: bool | None = None
    hessian_eigs: list[float] | None = None
    witness_direction: list[float] | None = None
    complement_matrix: MatrixEntries | None = None
    reason: str | None = None
    diagnostics: DiagnosticsRecord

    @classmethod
    def of(cls, c: Classification) -> ClassificationRecord:
        diag = c.diagnostics
        fields: dict = {}
        v = c.verdict
        if isinstance(v, Regular):
            fields["witness_direction"] = _vec(v.witness_direction)
        elif isinstance(v, SmoothCritical):
            fields.update(nondegenerate=v.nondegenerate, hessian_eigs=_vec(v.hessian_eigs))
        elif isinstance(v, NonDegenerateCritical):
            fields.update(
                z2_contribution=PolyRecord.of(v.z2_poly),
                extremum=str(v.extremum),
                tangent_dim=v.tangent_dim,
            )
        elif isinstance(v, Borderline):
            fields["reason"] = v.reason
            if v.complement_matrix is not None:
                fields["complement_matrix"] = MatrixEntries.from_array(v.complement_matrix)
        elif isinstance(v, NotCovered):
            fields["reason"] = v.reason
        return cls(
            point=_vec(c.point),
            k=c.k,
            value=c.value,
            kind=c.kind,
            conclusive=c.is_conclusive,
            mu=c.mu,
            contribution=PolyRecord.of(c.contribution),
            diagnostics=DiagnosticsRecord(
                nu=diag.nu,
                rel_index=diag.rel_index,
                rank=diag.rank,
                complement_dim=diag.complement_dim,
                definite_margin=diag.definite_margin,
                condition_n_margin=diag.condition_n_margin,
                transversal=diag.transversal,
                isolation=diag.isolation if np.isfinite(diag.isolation) else None,
                kernel_angle=diag.kernel_angle,
                stratum_residual=diag.stratum_residual,
            ),
            **fields,
        )


class CriticalPointRecord(BaseModel):
    location: list[float]
    value: float
    basin: int
    residual: float
    source: str
    classification: ClassificationRecord

    @classmethod
    def of(cls, r: CriticalPointReport) -> CriticalPointRecord:
        return cls(
            location=_vec(r.location),
            value=r.value,
            basin=r.basin,
            residual=r.residual,
            source=str(r.source),
            classification=ClassificationRecord.of(r.classification),
        )


class StratumPointRecord(BaseModel):
    location: list[float]
    lo: int
    hi: int
    rel_index: int
    mu: int
    nondegenerate: bool
    tangent_dim: int

    @classmethod
    def of(cls, sp: StratumPoint) -> StratumPointRecord:
        return cls(
            location=_vec(sp.location),
            lo=sp.lo,
            hi=sp.hi,
            rel_index=sp.rel_index,
            mu=sp.mu,
            nondegenerate=sp.nondegenerate,
            tangent_dim=sp.tangent_dim,
        )


class ConseqRecord(BaseModel):
    status: str
    left: PolyRecord | None = None
    notice: str = ""

    @classmethod
    def of(cls, r: ConseqResult) -> ConseqRecord:
        left = PolyRecord.of(r.left) if r.left is not None else None
        return cls(status=str(r.status), left=left, notice=r.notice)


class MorseReportRecord(BaseModel):
    family: str
    d: int
    n: int
    k: int
    field: str
    grid: int
    p_morse: PolyRecord
    p_manifold: PolyRecord
    p_smooth: PolyRecord
    satisfied: bool
    remainder: PolyRecord | None = None
    violated_degree: int | None = None
    c_mu: dict[int, int]
    d_mu: dict[int, PolyRecord]
    inconclusive: bool
    flags: list[str]
    value_min: float
    value_max: float
    critical_points: list[CriticalPointRecord]
    stratum_points: list[StratumPointRecord]
    conseq: ConseqRecord | None = None

    @classmethod
    def of(cls, r: MorseReport, conseq: ConseqResult | None = None) -> MorseReportRecord:
        v = r.verdict
        return cls(
            family=r.family_name,
            d=r.d,
            n=r.n,
            k=r.k,
            field=str(r.field),
            grid=r.grid,
            p_morse=PolyRecord.of(r.p_morse),
            p_manifold=PolyRecord.of(r.p_manifold),
            p_smooth=PolyRecord.of(r.p_smooth),
            satisfied=v.ok,
            remainder=PolyRecord.of(v.remainder) if isinstance(v, Satisfied) else None,
            violated_degree=None if isinstance(v, Satisfied) else v.index,
            c_mu=r.c_mu,
            d_mu={mu: PolyRecord.of(p) for mu, p in r.d_mu.items()},
            inconclusive=r.inconclusive,
            flags=list(r.flags),
            value_min=r.value_min,
            value_max=r.value_max,
            critical_points=[CriticalPointRecord.of(cp) for cp in r.reports],
            stratum_points=[StratumPointRecord.of(sp) for sp in r.stratum_points],
            conseq=ConseqRecord.of(conseq) if conseq is not None else None,
        )


class BoundCheckRecord(BaseModel):
    label: str
    k: int
    lhs: int
    bound: int
    passed: bool


class SeparationRecord(BaseModel):
    k_lower: int
    k_upper: int
    max_lower: float
    max_upper: float
    min_lower: float
    min_upper: float
    passed: bool

    @classmethod
    def of(cls, s: SeparationCheck) -> SeparationRecord:
        return cls(
            k_lower=s.k_lower,
            k_upper=s.k_upper,
            max_lower=s.max_lower,
            max_upper=s.max_upper,
            min_lower=s.min_lower,
            min_upper=s.min_upper,
            passed=s.passed,
        )


class VanHoveRecord(BaseModel):
    family: str
    d: int
    n: int
    counts: dict[int, dict[int, int]]
    checks: list[BoundCheckRecord]
    separation: list[SeparationRecord]
    inconclusive: bool
    passed: bool
    reports: list[MorseReportRecord]

    @classmethod
    def of(
        cls, table: VanHoveTable, separation: list[SeparationCheck], reports: list[MorseReport]
    ) -> VanHoveRecord:
        seps = [SeparationRecord.of(s) for s in separation]
        return cls(
            family=reports[0].family_name,
            d=table.d,
            n=table.n,
            counts=table.counts,
            checks=[
                BoundCheckRecord(label=c.label, k=c.k, lhs=c.lhs, bound=c.bound, passed=c.passed)
                for c in table.checks
            ],
            separation=seps,
            inconclusive=table.inconclusive,
            passed=table.passed and all(s.passed for s in seps),
            reports=[MorseReportRecord.of(r) for r in reports],
        )


class TraceRecord(BaseModel):
    family: str
    k: int
    step: float
    stop: str
    closed: bool
    length: float
    num_points: int
    flagged_segments: list[int]

    @classmethod
    def of(cls, family: str, k: int, step: float, trace: StratumTrace) -> TraceRecord:
        return cls(
            family=family,
            k=k,
            step=step,
            stop=str(trace.stop),
            closed=trace.closed,
            length=trace.length(),
            num_points=len(trace.points),
            flagged_segments=list(trace.flagged_segments),
        )


class HfCheckRecord(BaseModel):
    trials: int
    checked: int
    skipped: int
    crossings: int
    max_rel_error: float
    tol: float
    passed: bool
    worst_family: str | None = None
    worst_k: int | None = None

    @classmethod
    def of(cls, r: HfCheckResult) -> HfCheckRecord:
        return cls(
            trials=r.trials,
            checked=r.checked,
            skipped=r.skipped,
            crossings=r.crossings,
            max_rel_error=r.max_rel_error,
            tol=r.tol,
            passed=r.passed,
            worst_family=r.worst.family_name if r.worst else None,
            worst_k=r.worst.k if r.worst else None,
        )


def to_json(record: BaseModel) -> str:
    return record.model_dump_json(indent=2) + "\n"


def write_json(record: BaseModel, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(record))
    log.info("Wrote report: %s", fmt_path(path))
