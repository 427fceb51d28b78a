"""
Built-in families: the small chart examples of cone-like and borderline degeneracies, and
band-structure style families on tori.
"""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from morseig.errors import UnknownFamilyError
from morseig.families.matrix_family import Domain, MatrixFamily
from morseig.families.trig_poly import from_spec, load_spec
from morseig.polyalg.fields import Field

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
EYE2 = np.eye(2)

NODAL_RING_WOBBLE = 0.1
"""Amplitude of the `x1 = eps sin(x3)` wobble of the `nodal-ring-t3` stratum."""


def _cone_symmetric() -> MatrixFamily:
    return MatrixFamily(
        name="cone-symmetric",
        d=2,
        n=2,
        field=Field.real,
        domain=Domain.chart,
        evaluator=lambda x: x[0] * SIGMA_Z + x[1] * SIGMA_X,
        analytic_diff=lambda x: [SIGMA_Z, SIGMA_X],
        description="[[x1, x2], [x2, -x1]]: isolated conical point at 0",
    )


def _cone_tilted() -> MatrixFamily:
    d1 = np.diag([1.0, 2.0])
    return MatrixFamily(
        name="cone-tilted",
        d=2,
        n=2,
        field=Field.real,
        domain=Domain.chart,
        evaluator=lambda x: x[0] * d1 + x[1] * SIGMA_X,
        analytic_diff=lambda x: [d1, SIGMA_X],
        description="[[x1, x2], [x2, 2 x1]]: tilted cone, regular at 0",
    )


def _borderline() -> MatrixFamily:
    def evaluate(x: NDArray) -> NDArray:
        x1, x2 = x
        return np.array([[x1, x2], [x2, x1 * x2 + x1 * x1]])

    def diff(x: NDArray) -> list[NDArray]:
        x1, x2 = x
        return [
            np.array([[1.0, 0.0], [0.0, x2 + 2 * x1]]),
            np.array([[0.0, 1.0], [1.0, x1]]),
        ]

    return MatrixFamily(
        name="borderline",
        d=2,
        n=2,
        field=Field.real,
        domain=Domain.chart,
        evaluator=evaluate,
        analytic_diff=diff,
        description="[[x1, x2], [x2, x1 x2 + x1^2]]: neither regular nor non-degenerate at 0",
    )


def _real2band_t2() -> MatrixFamily:
    def batch(xs: NDArray) -> NDArray:
        s1, s2 = np.sin(xs[:, 0]), np.sin(xs[:, 1])
        return s1[:, None, None] * SIGMA_Z + s2[:, None, None] * SIGMA_X

    return MatrixFamily(
        name="real2band-t2",
        d=2,
        n=2,
        field=Field.real,
        domain=Domain.torus,
        evaluator=lambda x: np.sin(x[0]) * SIGMA_Z + np.sin(x[1]) * SIGMA_X,
        analytic_diff=lambda x: [np.cos(x[0]) * SIGMA_Z, np.cos(x[1]) * SIGMA_X],
        batch_evaluator=batch,
        description="sin(x1) sz + sin(x2) sx: four conical points on T^2",
    )


def _weyl_t3() -> MatrixFamily:
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)

    def batch(xs: NDArray) -> NDArray:
        s = np.sin(xs)
        return np.einsum("pj,jab->pab", s, np.stack(paulis))

    return MatrixFamily(
        name="weyl-t3",
        d=3,
        n=2,
        field=Field.complex,
        domain=Domain.torus,
        evaluator=lambda x: batch(np.asarray(x, dtype=np.float64)[None, :])[0],
        analytic_diff=lambda x: [np.cos(x[j]) * paulis[j] for j in range(3)],
        batch_evaluator=batch,
        description="sin(x1) sx + sin(x2) sy + sin(x3) sz: eight Weyl nodes on T^3",
    )


def _nodal_t3(name: str, eps: float) -> MatrixFamily:
    def batch(xs: NDArray) -> NDArray:
        u = xs[:, 0] - eps * np.sin(xs[:, 2])
        return (
            np.sin(u)[:, None, None] * SIGMA_Z
            + np.sin(xs[:, 1])[:, None, None] * SIGMA_X
            + np.cos(xs[:, 2])[:, None, None] * EYE2
        )

    def diff(x: NDArray) -> list[NDArray]:
        cu = np.cos(x[0] - eps * np.sin(x[2]))
        return [
            cu * SIGMA_Z,
            np.cos(x[1]) * SIGMA_X,
            -eps * np.cos(x[2]) * cu * SIGMA_Z - np.sin(x[2]) * EYE2,
        ]

    return MatrixFamily(
        name=name,
        d=3,
        n=2,
        field=Field.real,
        domain=Domain.torus,
        evaluator=lambda x: batch(x[None, :])[0],
        analytic_diff=diff,
        batch_evaluator=batch,
        description=(
            f"sin(x1 - {eps:g} sin x3) sz + sin(x2) sx + cos(x3) I: closed nodal lines on T^3"
        ),
    )


def _graphene_t2() -> MatrixFamily:
    def evaluate(x: NDArray) -> NDArray:
        h = 1 + np.exp(1j * x[0]) + np.exp(1j * x[1])
        return np.array([[0, h], [np.conj(h), 0]])

    def diff(x: NDArray) -> list[NDArray]:
        out = []
        for j in range(2):
            dh = 1j * np.exp(1j * x[j])
            out.append(np.array([[0, dh], [np.conj(dh), 0]]))
        return out

    return MatrixFamily(
        name="graphene-t2",
        d=2,
        n=2,
        field=Field.complex,
        domain=Domain.torus,
        evaluator=evaluate,
        analytic_diff=diff,
        description="honeycomb hopping 1 + e^{i x1} + e^{i x2}: Dirac points with d < s(2) over C",
    )


def _sym2_identity() -> MatrixFamily:
    mats = [EYE2, SIGMA_Z, SIGMA_X]
    return MatrixFamily(
        name="sym2-identity",
        d=3,
        n=2,
        field=Field.real,
        domain=Domain.chart,
        evaluator=lambda x: x[0] * EYE2 + x[1] * SIGMA_Z + x[2] * SIGMA_X,
        analytic_diff=lambda x: mats,
        description="(x, y, z) -> [[x+y, z], [z, x-y]]: the identity chart of Sym_2(R)",
    )


def _cubic_inflection() -> MatrixFamily:
    return MatrixFamily(
        name="cubic-inflection",
        d=1,
        n=1,
        field=Field.real,
        domain=Domain.chart,
        evaluator=lambda x: np.array([[x[0] ** 3]]),
        analytic_diff=lambda x: [np.array([[3 * x[0] ** 2]])],
        description="lambda(x) = x^3: critical but not topologically critical at 0",
    )


BUILTINS: dict[str, Callable[[], MatrixFamily]] = {
    "cone-symmetric": _cone_symmetric,
    "cone-tilted": _cone_tilted,
    "borderline": _borderline,
    "real2band-t2": _real2band_t2,
    "weyl-t3": _weyl_t3,
    "nodal-ring-t3": lambda: _nodal_t3("nodal-ring-t3", NODAL_RING_WOBBLE),
    "nodal-line-t3": lambda: _nodal_t3("nodal-line-t3", 0.0),
    "graphene-t2": _graphene_t2,
    "sym2-identity": _sym2_identity,
    "cubic-inflection": _cubic_inflection,
}


def builtin(name: str) -> MatrixFamily:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownFamilyError(
            f"Unknown family: {name!r} (builtins: {', '.join(BUILTINS)})"
        ) from None


def load_family(name_or_path: str | Path) -> MatrixFamily:
    """A builtin by name, or a JSON trigonometric polynomial spec by path."""
    if isinstance(name_or_path, str) and name_or_path in BUILTINS:
        return builtin(name_or_path)
    path = Path(name_or_path)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise FileNotFoundError(f"Family spec not found: {path}")
        return from_spec(load_spec(path))
    return builtin(str(name_or_path))


def constant_family(value: NDArray, d: int, domain: Domain = Domain.torus) -> MatrixFamily:
    """Family with the same matrix at every point (zero differential)."""
    value = np.asarray(value)
    field = Field.complex if np.iscomplexobj(value) else Field.real
    zero = np.zeros_like(value)
    return MatrixFamily(
        name="constant",
        d=d,
        n=value.shape[0],
        field=field,
        domain=domain,
        evaluator=lambda x: value,
        analytic_diff=lambda x: [zero] * d,
        batch_evaluator=lambda xs: np.broadcast_to(value, (len(xs),) + value.shape),
    )
