"""
Uniform grids on the torus and the eigenvalues of a family over them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np
from numpy.typing import NDArray

from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.errors import DomainError
from morseig.families.matrix_family import TWO_PI, Domain, MatrixFamily
from morseig.pipeline.workers import ordered_map

log = logging.getLogger(__name__)

MIN_GRID = 8
CHUNK_POINTS = 4096


def grid_axis(grid: int) -> NDArray[np.float64]:
    return np.arange(grid) * (TWO_PI / grid)


def grid_points(d: int, grid: int) -> NDArray[np.float64]:
    """All `grid^d` points, shape `(grid^d, d)`, in C (row major) index order."""
    axes = np.meshgrid(*([grid_axis(grid)] * d), indexing="ij")
    return np.stack(axes, axis=-1).reshape(-1, d)


def neighbor_offsets(d: int) -> list[tuple[int, ...]]:
    """The `3^d - 1` nonzero offsets of the Moore neighborhood."""
    return [off for off in product((-1, 0, 1), repeat=d) if any(off)]


def rolled(a: NDArray, off: tuple[int, ...]) -> NDArray:
    """`out[i] = a[i + off]` with periodic wrap on the first `len(off)` axes."""
    return np.roll(a, shift=tuple(-o for o in off), axis=tuple(range(len(off))))


def torus_distance(a: NDArray, b: NDArray) -> float:
    delta = np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
    return float(np.linalg.norm(delta))


@dataclass(frozen=True)
class GridSpectra:
    """
    Sorted eigenvalues of a torus family at every grid point, shape `(grid,)*d + (n,)`.
    Shared by the scans of different branches of the same family.
    """

    family_name: str
    d: int
    n: int
    grid: int
    eigenvalues: NDArray[np.float64]

    @property
    def spacing(self) -> float:
        return TWO_PI / self.grid

    def branch(self, k: int) -> NDArray[np.float64]:
        if not 1 <= k <= self.n:
            raise ValueError(f"Branch index k={k} outside 1..{self.n}")
        return self.eigenvalues[..., k - 1]

    def coords(self, idx: tuple[int, ...]) -> NDArray[np.float64]:
        return np.asarray(idx, dtype=np.float64) * self.spacing


def check_torus(fam: MatrixFamily, grid: int) -> None:
    if fam.domain is not Domain.torus:
        raise DomainError(f"Global scans need a torus family, {fam.name} is on a {fam.domain}")
    if grid < MIN_GRID:
        raise ValueError(f"Grid must have at least {MIN_GRID} points per dimension: {grid}")


def grid_spectra(
    fam: MatrixFamily, grid: int, opts: AnalysisOptions = DEFAULT_OPTIONS
) -> GridSpectra:
    """
    Batched `eigvalsh` over the grid, in chunks distributed over the worker pool.
    """
    check_torus(fam, grid)
    pts = grid_points(fam.d, grid)
    chunks = [pts[i : i + CHUNK_POINTS] for i in range(0, len(pts), CHUNK_POINTS)]

    def solve(chunk: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.linalg.eigvalsh(fam.evaluate_many(chunk))

    log.info("Evaluating %s on a %s^%s grid (%s chunks)", fam.name, grid, fam.d, len(chunks))
    vals = np.concatenate(ordered_map(solve, chunks, opts.workers), axis=0)
    return GridSpectra(
        family_name=fam.name,
        d=fam.d,
        n=fam.n,
        grid=grid,
        eigenvalues=vals.reshape((grid,) * fam.d + (fam.n,)),
    )


## Tests


def test_grid_layout():
    pts = grid_points(2, 8)
    assert pts.shape == (64, 2)
    assert np.allclose(pts[9], [TWO_PI / 8, TWO_PI / 8])
    assert len(neighbor_offsets(3)) == 26
    a = np.arange(8)
    assert rolled(a, (1,))[0] == 1 and rolled(a, (-1,))[0] == 7
    assert abs(torus_distance(np.array([0.1]), np.array([TWO_PI - 0.1])) - 0.2) < 1e-12
