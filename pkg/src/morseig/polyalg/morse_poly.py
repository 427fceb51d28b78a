"""
Morse polynomial contributions of degenerate eigenvalue critical points and the Morse
inequality check.
"""

from __future__ import annotations

from dataclasses import dataclass

from morseig.polyalg.fields import Field, s_codim
from morseig.polyalg.grassmannian import poincare_grassmannian, twisted_poincare
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.qbinom import qbinom, qbinom_in


def _check_indices(nu: int, i: int) -> None:
    if nu < 1 or i < 1 or i > nu:
        raise ValueError(f"Need 1 <= i <= nu: nu={nu}, i={i}")


def nonsmooth_contribution(nu: int, i: int, f: Field) -> IntPoly:
    """
    The family-independent polynomial contributed by a non-degenerate critical point of
    multiplicity `nu` where the branch sits at relative index `i` (counted from the top).
    The Morse index factor `t^mu` is left to the caller.
    """
    _check_indices(nu, i)
    s = s_codim(i, f)
    if f is Field.complex:
        return qbinom_in(nu - 1, i - 1, 2).shift(s)
    if i % 2 == 1:
        return qbinom_in((nu - 1) // 2, (i - 1) // 2, 4).shift(s)
    if nu % 2 == 1:
        return IntPoly.zero()
    return qbinom_in(nu // 2 - 1, i // 2 - 1, 4).shift(s + nu - i)


def nonsmooth_contribution_via_grassmannians(nu: int, i: int, f: Field) -> IntPoly:
    """
    Same polynomial as `nonsmooth_contribution`, assembled from the homology of the
    Grassmannian of `(i-1)`-planes in `F^(nu-1)`: plain for odd `i`, twisted for even `i`,
    complex Grassmannian over the complex field.
    """
    _check_indices(nu, i)
    s = s_codim(i, f)
    if f is Field.complex:
        base = poincare_grassmannian(i - 1, nu - 1, Field.complex)
    elif i % 2 == 1:
        base = poincare_grassmannian(i - 1, nu - 1, Field.real)
    else:
        base = twisted_poincare(i - 1, nu - 1)
    return base.shift(s)


def z2_contribution(nu: int, i: int, mu: int, f: Field = Field.real) -> IntPoly:
    """
    Contribution with `Z_2` coefficients, `t^(mu + s(i)) [nu-1 choose i-1]_t` in the real case.
    Never zero, which is what makes every non-degenerate point topologically critical.
    Over the complex field the Grassmannian has no torsion and the integer polynomial is used.
    """
    _check_indices(nu, i)
    if mu < 0:
        raise ValueError(f"Negative Morse index: {mu}")
    if f is Field.complex:
        return nonsmooth_contribution(nu, i, f).shift(mu)
    return qbinom(nu - 1, i - 1).shift(mu + s_codim(i, f))


def torus_poincare(d: int) -> IntPoly:
    """Poincaré polynomial `(1+t)^d` of the torus `T^d`."""
    if d < 1:
        raise ValueError(f"Torus dimension must be positive: {d}")
    p = IntPoly.one()
    for _ in range(d):
        p = p * IntPoly((1, 1))
    return p


@dataclass(frozen=True)
class Satisfied:
    remainder: IntPoly

    @property
    def ok(self) -> bool:
        return True


@dataclass(frozen=True)
class Violated:
    index: int
    """Smallest degree where nonnegativity or divisibility by `1+t` fails."""

    @property
    def ok(self) -> bool:
        return False


MorseVerdict = Satisfied | Violated


def morse_division(p_morse: IntPoly, p_manifold: IntPoly) -> MorseVerdict:
    """
    Check the Morse inequalities: `p_morse - p_manifold = (1+t) R(t)` with `R` having
    nonnegative coefficients. Synthetic division from the bottom degree up, so the first
    failing degree is reported.
    """
    diff = (p_morse - p_manifold).coeffs
    if not diff:
        return Satisfied(IntPoly.zero())
    quot: list[int] = []
    prev = 0
    for j in range(len(diff) - 1):
        q = diff[j] - prev
        if q < 0:
            return Violated(j)
        quot.append(q)
        prev = q
    if diff[-1] != prev:
        return Violated(len(diff) - 1)
    return Satisfied(IntPoly(quot))


## Tests


def test_contributions():
    assert nonsmooth_contribution(2, 2, Field.real) == IntPoly.monomial(2)
    assert nonsmooth_contribution(5, 3, Field.real) == IntPoly.parse("t^5+t^9")
    assert nonsmooth_contribution(3, 2, Field.real).is_zero()
    assert nonsmooth_contribution(2, 2, Field.complex) == IntPoly.monomial(3)
    assert z2_contribution(3, 2, 0) == IntPoly.parse("t^2+t^3")
    assert z2_contribution(2, 1, 0) == IntPoly.one()
    assert z2_contribution(2, 2, 1) == IntPoly.monomial(3)


def test_morse_division():
    p = IntPoly.parse("1+2t+t^2")
    assert morse_division(p, p) == Satisfied(IntPoly.zero())
    assert morse_division(IntPoly.parse("4+8t+4t^2"), p) == Satisfied(IntPoly.parse("3+3t"))
    assert morse_division(IntPoly.one(), p) == Violated(1)
