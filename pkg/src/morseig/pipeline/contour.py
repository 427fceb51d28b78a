from __future__ import annotations

import csv
import io
import logging
from pathlib import Path

import numpy as np
from prettyfmt import fmt_path

from morseig.errors import DomainError
from morseig.families.matrix_family import Domain, MatrixFamily
from morseig.pipeline.torus_grid import grid_points

log = logging.getLogger(__name__)

CONTOUR_HEADER = ("x1", "x2", "lambda_k")

ContourRow = tuple[float, float, float]


def contour_rows(
    fam: MatrixFamily, k: int, grid: int = 64, extent: tuple[float, float] = (-1.0, 1.0)
) -> list[ContourRow]:
    """
    `(x1, x2, lambda_k)` samples of a two-parameter family on a uniform grid: the whole
    torus, or the square `extent x extent` of a chart.
    """
    if fam.d != 2:
        raise DomainError(f"Contours need a two-parameter family, {fam.name} has d={fam.d}")
    if not 1 <= k <= fam.n:
        raise ValueError(f"Branch index k={k} outside 1..{fam.n}")
    if grid < 2:
        raise ValueError(f"Contour grid needs at least 2 points per side: {grid}")
    if fam.domain is Domain.torus:
        pts = grid_points(2, grid)
    else:
        axis = np.linspace(extent[0], extent[1], grid)
        pts = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    vals = np.linalg.eigvalsh(fam.evaluate_many(pts))[:, k - 1]
    return [(float(p[0]), float(p[1]), float(v)) for p, v in zip(pts, vals, strict=True)]


def contour_csv(rows: list[ContourRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONTOUR_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def write_contour_csv(rows: list[ContourRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(contour_csv(rows))
    log.info("Wrote %s contour rows: %s", len(rows), fmt_path(path))
