from __future__ import annotations

from functools import lru_cache

from morseig.polyalg.int_poly import IntPoly


@lru_cache(maxsize=None)
def qbinom(n: int, k: int) -> IntPoly:
    """
    Gaussian binomial coefficient `[n choose k]_q` as a polynomial in `q` (written `t`).

    Uses the Pascal-type recursion `[n,k] = [n-1,k-1] + q^k [n-1,k]` so everything stays in
    exact integers. Out of range `k` gives the zero polynomial.
    """
    if n < 0 or k < 0 or k > n:
        return IntPoly.zero()
    if k == 0 or k == n:
        return IntPoly.one()
    return qbinom(n - 1, k - 1) + qbinom(n - 1, k).shift(k)


def qbinom_in(n: int, k: int, m: int) -> IntPoly:
    """`[n choose k]` evaluated at `q = t^m`."""
    return qbinom(n, k).scale_exponent(m)


## Tests


def test_small_values():
    assert qbinom(5, 0) == IntPoly.one()
    assert qbinom(2, 1) == IntPoly((1, 1))
    assert qbinom(4, 2) == IntPoly((1, 1, 2, 1, 1))
    assert qbinom(3, 4).is_zero()
    assert qbinom_in(2, 1, 4) == IntPoly((1, 0, 0, 0, 1))
