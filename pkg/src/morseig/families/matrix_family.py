from __future__ import annotations

from collections.abc import Callable, Sequence
import dataclasses
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from typing_extensions import override

from morseig.errors import DomainError, NotIsometryError
from morseig.polyalg.fields import Field
from morseig.spectral.self_adjoint import Matrix, as_self_adjoint

TWO_PI = 2.0 * np.pi

Point = NDArray[np.float64]

Evaluator = Callable[[Point], NDArray]
DiffEvaluator = Callable[[Point], Sequence[NDArray]]
BatchEvaluator = Callable[[NDArray[np.float64]], NDArray]


class Domain(StrEnum):
    """Parameter space: the torus `(R / 2 pi Z)^d`, or a coordinate chart of `R^d`."""

    torus = "torus"
    chart = "chart"


@dataclass(frozen=True)
class MatrixFamily:
    """
    A smooth map from a `d`-dimensional parameter space into `n x n` self-adjoint matrices.
    Immutable, and evaluators must not keep state, so concurrent evaluation is safe.
    """

    name: str
    d: int
    n: int
    field: Field
    domain: Domain
    evaluator: Evaluator = dataclasses.field(repr=False)
    analytic_diff: DiffEvaluator | None = dataclasses.field(default=None, repr=False)
    batch_evaluator: BatchEvaluator | None = dataclasses.field(default=None, repr=False)
    """Optional vectorized evaluator taking `(P, d)` points to `(P, n, n)` matrices."""
    description: str = ""

    def point(self, x: ArrayLike) -> Point:
        arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if arr.shape != (self.d,):
            raise DomainError(
                f"Family {self.name} has d={self.d}, got a point of shape {arr.shape}"
            )
        return arr

    def __call__(self, x: ArrayLike) -> Matrix:
        return as_self_adjoint(self.evaluator(self.point(x)), self.field)

    def evaluate_many(self, xs: NDArray[np.float64]) -> NDArray:
        """Evaluate at each row of `xs`, returning a `(P, n, n)` array."""
        xs = np.asarray(xs, dtype=np.float64).reshape(-1, self.d)
        if self.batch_evaluator is not None:
            return np.asarray(self.batch_evaluator(xs))
        return np.stack([self(x) for x in xs])

    def diff(self, x: ArrayLike) -> list[Matrix] | None:
        """Analytic differential (one matrix per coordinate), or None if not provided."""
        if self.analytic_diff is None:
            return None
        return [as_self_adjoint(m, self.field) for m in self.analytic_diff(self.point(x))]

    def wrap(self, x: ArrayLike) -> Point:
        """Reduce torus coordinates to `[0, 2 pi)`; charts are left alone."""
        arr = self.point(x)
        return np.mod(arr, TWO_PI) if self.domain is Domain.torus else arr

    def conjugated(self, w: ArrayLike) -> MatrixFamily:
        """The family `W* F(x) W` for a fixed unitary (or orthogonal) `W`."""
        wm = np.asarray(w)
        if wm.shape != (self.n, self.n):
            raise DomainError(f"Conjugating matrix must be {self.n}x{self.n}: {wm.shape}")
        if np.linalg.norm(wm.conj().T @ wm - np.eye(self.n)) > 1e-10:
            raise NotIsometryError("Conjugating matrix is not unitary")
        complex_w = np.iscomplexobj(wm) and float(np.abs(wm.imag).max()) > 0
        new_field = Field.complex if complex_w else self.field
        if not complex_w:
            wm = np.real(wm)
        wh = wm.conj().T
        ev, df = self.evaluator, self.analytic_diff
        return replace(
            self,
            name=f"{self.name}*conj",
            field=new_field,
            evaluator=lambda x: wh @ ev(x) @ wm,
            analytic_diff=None if df is None else (lambda x: [wh @ m @ wm for m in df(x)]),
            batch_evaluator=None,
        )

    def shifted(self, c: float) -> MatrixFamily:
        """The family `F(x) + c I`."""
        eye = np.eye(self.n)
        ev, batch = self.evaluator, self.batch_evaluator
        return replace(
            self,
            name=f"{self.name}+{c:g}",
            evaluator=lambda x: ev(x) + c * eye,
            batch_evaluator=None if batch is None else (lambda xs: batch(xs) + c * eye),
        )

    def offset(self, c: ArrayLike) -> MatrixFamily:
        """The family `F(x) + C` for a fixed self-adjoint `C`. The differential is unchanged."""
        cm = as_self_adjoint(c, self.field)
        if cm.shape != (self.n, self.n):
            raise DomainError(f"Offset matrix must be {self.n}x{self.n}: {cm.shape}")
        ev, batch = self.evaluator, self.batch_evaluator
        return replace(
            self,
            name=f"{self.name}+offset",
            evaluator=lambda x: ev(x) + cm,
            batch_evaluator=None if batch is None else (lambda xs: batch(xs) + cm),
        )

    def scaled(self, a: float) -> MatrixFamily:
        """The family `a F(x)` for `a > 0`."""
        if a <= 0:
            raise ValueError(f"Scale factor must be positive: {a}")
        ev, df, batch = self.evaluator, self.analytic_diff, self.batch_evaluator
        return replace(
            self,
            name=f"{a:g}*{self.name}",
            evaluator=lambda x: a * ev(x),
            analytic_diff=None if df is None else (lambda x: [a * m for m in df(x)]),
            batch_evaluator=None if batch is None else (lambda xs: a * batch(xs)),
        )

    @override
    def __str__(self) -> str:
        return f"{self.name} (d={self.d}, n={self.n}, {self.field}, {self.domain})"


def _block_diag(a: NDArray, b: NDArray) -> NDArray:
    na, nb = a.shape[-1], b.shape[-1]
    dtype = np.result_type(a, b)
    out = np.zeros(a.shape[:-2] + (na + nb, na + nb), dtype=dtype)
    out[..., :na, :na] = a
    out[..., na:, na:] = b
    return out


def direct_sum(f: MatrixFamily, g: MatrixFamily) -> MatrixFamily:
    """Block diagonal family `F(x) (+) G(x)` on a common parameter space."""
    if f.d != g.d or f.domain != g.domain:
        raise DomainError(f"Cannot form direct sum of {f} and {g}: parameter spaces differ")
    new_field = Field.complex if Field.complex in (f.field, g.field) else Field.real
    fd, gd = f.analytic_diff, g.analytic_diff
    diff = None
    if fd is not None and gd is not None:
        diff = lambda x: [_block_diag(a, b) for a, b in zip(fd(x), gd(x), strict=True)]
    return MatrixFamily(
        name=f"{f.name}+{g.name}",
        d=f.d,
        n=f.n + g.n,
        field=new_field,
        domain=f.domain,
        evaluator=lambda x: _block_diag(np.asarray(f.evaluator(x)), np.asarray(g.evaluator(x))),
        analytic_diff=diff,
        batch_evaluator=lambda xs: _block_diag(f.evaluate_many(xs), g.evaluate_many(xs)),
    )
