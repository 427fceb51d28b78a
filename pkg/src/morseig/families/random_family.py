from __future__ import annotations

import itertools

import numpy as np

from morseig.families.matrix_family import Domain, MatrixFamily
from morseig.families.trig_poly import MatrixEntries, TrigPolySpec, TrigTerm, from_spec
from morseig.polyalg.fields import Field


def one_sided_harmonics(d: int, max_harmonic: int) -> list[tuple[int, ...]]:
    """
    Nonzero harmonics in `[-H, H]^d` whose first nonzero entry is positive: one of each
    `{m, -m}` pair.
    """
    out = []
    for m in itertools.product(range(-max_harmonic, max_harmonic + 1), repeat=d):
        nonzero = [c for c in m if c != 0]
        if nonzero and nonzero[0] > 0:
            out.append(m)
    return out


def _random_coefficient(
    rng: np.random.Generator, n: int, f: Field, amplitude: float
) -> MatrixEntries:
    def draw() -> np.ndarray:
        a = rng.uniform(-amplitude, amplitude, size=(n, n))
        return np.triu(a) + np.triu(a, 1).T if f is Field.real else a

    re = draw()
    im = draw()
    return MatrixEntries(re=re.tolist(), im=im.tolist())


def random_spec(
    seed: int, d: int, n: int, f: Field, max_harmonic: int = 1, amplitude: float = 1.0
) -> TrigPolySpec:
    if max_harmonic < 1:
        raise ValueError(f"max_harmonic must be at least 1: {max_harmonic}")
    rng = np.random.default_rng(seed)
    terms = []
    for m in one_sided_harmonics(d, max_harmonic):
        c = _random_coefficient(rng, n, f, amplitude)
        terms.append(TrigTerm(m=list(m), re=c.re, im=c.im))
    const = _random_coefficient(rng, n, f, amplitude)
    const_re = np.asarray(const.re)
    const_im = np.asarray(const.im)
    if f is Field.real:
        constant = MatrixEntries(re=const_re.tolist())
    else:
        # Hermitian part of the draw.
        c = 0.5 * ((const_re + 1j * const_im) + (const_re + 1j * const_im).conj().T)
        constant = MatrixEntries.from_array(c)
    return TrigPolySpec(
        name=f"random-s{seed}-d{d}-n{n}-{f}",
        d=d,
        n=n,
        field=f,
        domain=Domain.torus,
        terms=terms,
        constant=constant,
    )


def random_family(
    seed: int, d: int, n: int, f: Field, max_harmonic: int = 1, amplitude: float = 1.0
) -> MatrixFamily:
    """
    Deterministic random trigonometric family on `T^d`: every coefficient entry is uniform in
    `[-amplitude, amplitude]`, conjugate harmonics implicit.
    """
    return from_spec(random_spec(seed, d, n, f, max_harmonic, amplitude))
