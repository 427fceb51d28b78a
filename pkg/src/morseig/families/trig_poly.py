"""
Trigonometric polynomial families on tori, and their JSON file format.

A spec describes `F(x) = C_0 + sum_m Herm(C_m e^{i m.x})` where `Herm(X) = (X + X*)/2`, so
each harmonic is stored one-sided and the conjugate term is implicit. Every file therefore
describes a self-adjoint family. For real families the `re` and `im` parts must be symmetric,
and each term reads `re cos(m.x) - im sin(m.x)`.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from prettyfmt import fmt_path
from pydantic import BaseModel, ConfigDict, PositiveInt

from morseig.errors import FamilySpecError
from morseig.families.matrix_family import Domain, MatrixFamily
from morseig.polyalg.fields import Field

log = logging.getLogger(__name__)


class MatrixEntries(BaseModel):
    model_config = ConfigDict(extra="forbid")

    re: list[list[float]]
    im: list[list[float]] | None = None

    def to_array(self, n: int) -> NDArray[np.complex128]:
        re = np.asarray(self.re, dtype=np.float64)
        im = np.zeros_like(re) if self.im is None else np.asarray(self.im, dtype=np.float64)
        if re.shape != (n, n) or im.shape != (n, n):
            raise FamilySpecError(
                f"Matrix entries must be {n}x{n}: got re {re.shape}, im {im.shape}"
            )
        return re + 1j * im

    @classmethod
    def from_array(cls, a: NDArray) -> MatrixEntries:
        a = np.asarray(a)
        im = np.imag(a)
        return cls(re=np.real(a).tolist(), im=im.tolist() if np.any(im) else None)


class TrigTerm(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: list[int]
    re: list[list[float]]
    im: list[list[float]] | None = None

    def coefficient(self, n: int) -> NDArray[np.complex128]:
        return MatrixEntries(re=self.re, im=self.im).to_array(n)


class TrigPolySpec(BaseModel):
    """
    JSON family spec. Unknown keys are rejected.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    d: PositiveInt
    n: PositiveInt
    field: Field = Field.real
    domain: Domain = Domain.torus
    terms: list[TrigTerm] = []
    constant: MatrixEntries | None = None


def _symmetry_tol(a: NDArray) -> float:
    return 1e-14 * (1.0 + float(np.abs(a).max(initial=0.0)))


def _is_symmetric(a: NDArray) -> bool:
    return bool(np.allclose(a, a.T, rtol=0.0, atol=_symmetry_tol(a)))


def _compile(
    spec: TrigPolySpec,
) -> tuple[NDArray[np.float64], NDArray[np.complex128], NDArray[np.complex128]]:
    n, d = spec.n, spec.d
    harmonics = np.zeros((len(spec.terms), d))
    coeffs = np.zeros((len(spec.terms), n, n), dtype=np.complex128)
    for t, term in enumerate(spec.terms):
        if len(term.m) != d:
            raise FamilySpecError(f"Term {t}: harmonic {term.m} does not have length d={d}")
        c = term.coefficient(n)
        if spec.field is Field.real and not (_is_symmetric(c.real) and _is_symmetric(c.imag)):
            raise FamilySpecError(f"Term {t}: real families need symmetric re and im parts")
        harmonics[t] = term.m
        coeffs[t] = c
    const = np.zeros((n, n), dtype=np.complex128)
    if spec.constant is not None:
        const = spec.constant.to_array(n)
        if not np.allclose(const, const.conj().T, rtol=0.0, atol=_symmetry_tol(const)):
            raise FamilySpecError("Constant term is not self-adjoint")
        if spec.field is Field.real and np.any(const.imag):
            raise FamilySpecError("Constant term has imaginary entries but the field is real")
    return harmonics, coeffs, const


def _herm(s: NDArray) -> NDArray:
    return 0.5 * (s + np.conj(np.swapaxes(s, -1, -2)))


def from_spec(spec: TrigPolySpec) -> MatrixFamily:
    """
    Compile a spec into a family with a vectorized evaluator and an analytic differential.
    """
    harmonics, coeffs, const = _compile(spec)
    real = spec.field is Field.real

    def finish(a: NDArray) -> NDArray:
        return np.real(a) if real else a

    def batch(xs: NDArray[np.float64]) -> NDArray:
        phases = np.exp(1j * (xs @ harmonics.T))
        s = np.einsum("pt,tij->pij", phases, coeffs)
        return finish(_herm(s) + const)

    def evaluate(x: NDArray[np.float64]) -> NDArray:
        return batch(x[None, :])[0]

    def diff(x: NDArray[np.float64]) -> list[NDArray]:
        phases = np.exp(1j * (harmonics @ x))
        # d/dx_j of C e^{i m.x} is i m_j C e^{i m.x}
        s = np.einsum("tj,t,tab->jab", harmonics, 1j * phases, coeffs)
        return list(finish(_herm(s)))

    log.debug("Compiled family %s: %s terms", spec.name, len(spec.terms))
    return MatrixFamily(
        name=spec.name,
        d=spec.d,
        n=spec.n,
        field=spec.field,
        domain=spec.domain,
        evaluator=evaluate,
        analytic_diff=diff,
        batch_evaluator=batch,
        description=f"trigonometric polynomial with {len(spec.terms)} harmonics",
    )


def save_spec(spec: TrigPolySpec, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(spec.model_dump_json(indent=2, exclude_none=True) + "\n")
    log.info("Saved family spec: %s", fmt_path(path))


def load_spec(path: Path) -> TrigPolySpec:
    """Load a JSON spec. Malformed files raise pydantic's `ValidationError`."""
    return TrigPolySpec.model_validate_json(path.read_text())
