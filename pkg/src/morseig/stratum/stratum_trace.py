from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np
from funlog import log_calls
from numpy.typing import ArrayLike, NDArray
from prettyfmt import fmt_path

from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.errors import DomainError, MorseigError
from morseig.families.matrix_family import Domain, MatrixFamily
from morseig.stratum.stratum_chart import project_to_stratum, reference_at, tangent_space

log = logging.getLogger(__name__)


class TraceStop(StrEnum):
    closed = "closed"
    max_steps = "max_steps"
    corrector_failed = "corrector_failed"
    near_non_transverse = "near_non_transverse"


@dataclass(frozen=True)
class StratumTrace:
    """
    Polyline of points on a one-dimensional stratum. Coordinates are not wrapped, so on a
    torus a closed curve may end a period away from where it started.
    """

    points: NDArray[np.float64]
    stop: TraceStop
    flagged_segments: list[int] = field(default_factory=list)
    """Indices `j` of segments `points[j] -> points[j+1]` with a low transversality margin."""

    @property
    def closed(self) -> bool:
        return self.stop is TraceStop.closed

    def length(self) -> float:
        segs = np.diff(self.points, axis=0)
        total = float(np.linalg.norm(segs, axis=1).sum())
        if self.closed and len(self.points) > 1:
            total += float(np.linalg.norm(_closing_offset(self.points[-1], self.points[0], True)))
        return total


def _closing_offset(a: NDArray, b: NDArray, periodic: bool) -> NDArray:
    diff = b - a
    if periodic:
        diff = (diff + np.pi) % (2 * np.pi) - np.pi
    return diff


def _oriented_tangent(basis: NDArray, prev: NDArray | None) -> NDArray:
    t = basis[:, 0]
    if prev is None:
        if t[int(np.argmax(np.abs(t)))] < 0:
            t = -t
    elif float(np.dot(t, prev)) < 0:
        t = -t
    return t


@log_calls(level="info", show_timing_only=True)
def trace_stratum(
    fam: MatrixFamily,
    x_on_s: ArrayLike,
    k: int,
    step: float = 0.05,
    max_steps: int = 2000,
    opts: AnalysisOptions = DEFAULT_OPTIONS,
) -> StratumTrace:
    """
    Follow a one-dimensional stratum from `x_on_s` with a tangent predictor and a projection
    corrector. Stops on returning within `step / 2` of the start, after `max_steps`, or when
    the corrector fails (the partial polyline is kept).
    """
    if step <= 0:
        raise ValueError(f"Step must be positive: {step}")
    start = project_to_stratum(fam, x_on_s, k, opts, ref=reference_at(fam, x_on_s, k, opts))
    ref = start.ref
    codim = ref.codim(fam.field)
    if fam.d - codim != 1:
        raise DomainError(
            f"Tracing needs a one-dimensional stratum: d={fam.d}, codimension {codim}"
        )
    periodic = fam.domain is Domain.torus

    points = [start.x]
    flagged: list[int] = []
    x = start.x
    prev_t: NDArray | None = None
    stop = TraceStop.max_steps
    travelled = 0.0
    for j in range(max_steps):
        ts = tangent_space(fam, x, ref, opts)
        if ts.transversality_margin <= opts.tol_def:
            stop = TraceStop.near_non_transverse
            flagged.append(j)
            break
        t = _oriented_tangent(ts.basis, prev_t)
        try:
            proj = project_to_stratum(fam, x + step * t, k, opts, ref=ref)
        except MorseigError as e:
            log.debug("Trace corrector failed after %s steps: %s", j, e)
            stop = TraceStop.corrector_failed
            break
        travelled += float(np.linalg.norm(proj.x - x))
        x, ref, prev_t = proj.x, proj.ref, t
        closing = float(np.linalg.norm(_closing_offset(x, start.x, periodic)))
        if travelled > 2 * step and closing <= step / 2:
            stop = TraceStop.closed
            break
        points.append(x)

    log.info("Traced %s points, stop: %s", len(points), stop)
    return StratumTrace(points=np.array(points), stop=stop, flagged_segments=flagged)


def polyline_csv(trace: StratumTrace) -> str:
    """Points as CSV rows under an `x1,...,xd` header."""
    d = trace.points.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{j + 1}" for j in range(d)])
    writer.writerows(trace.points.tolist())
    return buf.getvalue()


def write_polyline_csv(trace: StratumTrace, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(polyline_csv(trace))
    log.info("Wrote polyline: %s", fmt_path(path))
