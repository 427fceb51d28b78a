"""
Rational Poincaré polynomials of Grassmannians: complex, real, and oriented real, plus the
"twisted" polynomial (homology with the orientation local system) as oriented minus plain.
"""

from __future__ import annotations

from morseig.polyalg.fields import Field
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.qbinom import qbinom_in


def _check_range(k: int, n: int) -> None:
    if not 0 <= k <= n:
        raise ValueError(f"Grassmannian needs 0 <= k <= n: k={k}, n={n}")


def _one_plus_t(j: int) -> IntPoly:
    return IntPoly.one() + IntPoly.monomial(j)


def _real_plain(k: int, n: int) -> IntPoly:
    if (k * (n - k)) % 2 == 0:
        return qbinom_in(n // 2, k // 2, 4)
    # k and n - k both odd, so n is even.
    return _one_plus_t(n - 1) * qbinom_in(n // 2 - 1, (k - 1) // 2, 4)


def _real_oriented(k: int, n: int) -> IntPoly:
    if k == 0:
        # A point: oriented and plain agree.
        return IntPoly.one()
    if k % 2 == 1 and n % 2 == 1:
        return _one_plus_t(n - k) * qbinom_in((n - 1) // 2, (k - 1) // 2, 4)
    if k % 2 == 1:
        return _one_plus_t(n - 1) * qbinom_in(n // 2 - 1, (k - 1) // 2, 4)
    if n % 2 == 0:
        numerator = _one_plus_t(k) * _one_plus_t(n - k) * qbinom_in(n // 2, k // 2, 4)
        return numerator.exact_div(_one_plus_t(n))
    # k even, n odd: same space as the complementary Grassmannian.
    return _real_oriented(n - k, n)


def poincare_grassmannian(k: int, n: int, f: Field, oriented: bool = False) -> IntPoly:
    """
    Poincaré polynomial (rational coefficients) of the Grassmannian of `k`-planes in `F^n`.
    `oriented` selects oriented real planes and is rejected over the complex field.
    """
    _check_range(k, n)
    if f is Field.complex:
        if oriented:
            raise ValueError("Oriented Grassmannians are only defined over the reals")
        return qbinom_in(n, k, 2)
    return _real_oriented(k, n) if oriented else _real_plain(k, n)


def twisted_poincare(k: int, n: int) -> IntPoly:
    """
    Poincaré polynomial of the real Grassmannian homology with orientation-twisted
    coefficients, obtained as `P(oriented) - P(plain)`.
    """
    diff = poincare_grassmannian(k, n, Field.real, oriented=True) - poincare_grassmannian(
        k, n, Field.real
    )
    if not diff.is_nonnegative():
        raise AssertionError(f"Twisted Poincaré polynomial has a negative coefficient: {diff}")
    return diff


## Tests


def test_examples():
    assert poincare_grassmannian(1, 2, Field.complex) == IntPoly((1, 0, 1))
    assert poincare_grassmannian(2, 4, Field.real) == IntPoly((1, 0, 0, 0, 1))
    assert poincare_grassmannian(1, 3, Field.real, oriented=True) == IntPoly((1, 0, 1))
    assert poincare_grassmannian(2, 4, Field.real, oriented=True) == IntPoly((1, 0, 2, 0, 1))
    assert twisted_poincare(0, 5).is_zero()
    assert twisted_poincare(1, 2).is_zero()
    assert twisted_poincare(3, 3) == IntPoly.one()
