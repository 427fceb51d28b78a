from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import zip_longest

from typing_extensions import override

ZERO_DEGREE = float("-inf")
"""Degree of the zero polynomial."""


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    out = [int(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True, init=False)
class IntPoly:
    """
    Polynomial in `t` with (arbitrary precision) integer coefficients, `coeffs[j]` being the
    coefficient of `t^j`. Always stored trimmed: the zero polynomial is the empty tuple.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def zero(cls) -> IntPoly:
        return cls(())

    @classmethod
    def one(cls) -> IntPoly:
        return cls((1,))

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> IntPoly:
        if degree < 0:
            raise ValueError(f"Negative degree: {degree}")
        return cls((0,) * degree + (coeff,))

    def degree(self) -> int | float:
        """Degree, or `ZERO_DEGREE` (-inf) for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> int:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def dominates(self, other: IntPoly) -> bool:
        """Coefficientwise `self ⪰ other`."""
        return (self - other).is_nonnegative()

    def evaluate(self, t: int | float) -> int | float:
        acc: int | float = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __call__(self, t: int | float) -> int | float:
        return self.evaluate(t)

    def __add__(self, other: IntPoly) -> IntPoly:
        return IntPoly(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    def __neg__(self) -> IntPoly:
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other: IntPoly) -> IntPoly:
        return self + (-other)

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return IntPoly.zero()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def shift(self, j: int) -> IntPoly:
        """Multiply by `t^j`."""
        if j < 0:
            raise ValueError(f"Negative shift: {j}")
        return IntPoly((0,) * j + self.coeffs) if self.coeffs else self

    def scale_exponent(self, m: int) -> IntPoly:
        """Substitute `t -> t^m`."""
        if m < 1:
            raise ValueError(f"scale_exponent needs m >= 1: {m}")
        out = [0] * (m * (len(self.coeffs) - 1) + 1) if self.coeffs else []
        for j, c in enumerate(self.coeffs):
            out[m * j] = c
        return IntPoly(out)

    def divmod(self, divisor: IntPoly) -> tuple[IntPoly, IntPoly]:
        """
        Long division by a divisor whose leading coefficient is +1 or -1, so quotient and
        remainder stay integral.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("Division by the zero polynomial")
        lead = divisor.coeffs[-1]
        if lead not in (1, -1):
            raise ValueError(f"Divisor must have unit leading coefficient: {divisor}")
        rem = list(self.coeffs)
        dd = len(divisor.coeffs) - 1
        quot = [0] * max(len(rem) - dd, 0)
        for j in range(len(rem) - 1, dd - 1, -1):
            c = rem[j] * lead
            if c:
                quot[j - dd] = c
                for i, b in enumerate(divisor.coeffs):
                    rem[j - dd + i] -= c * b
        return IntPoly(quot), IntPoly(rem)

    def exact_div(self, divisor: IntPoly) -> IntPoly:
        quot, rem = self.divmod(divisor)
        if not rem.is_zero():
            raise ArithmeticError(f"{self} is not divisible by {divisor} (remainder {rem})")
        return quot

    def betti_numbers(self) -> list[int]:
        return list(self.coeffs)

    def to_str(self, var: str = "t") -> str:
        """
        Caret notation, lowest degree first: `1+2t+t^2`, `t^5+t^9`, `0`.
        """
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                body = str(abs(c))
            else:
                mono = var if j == 1 else f"{var}^{j}"
                body = mono if abs(c) == 1 else f"{abs(c)}{mono}"
            sign = "-" if c < 0 else ("+" if parts else "")
            parts.append(f"{sign}{body}")
        return "".join(parts)

    @classmethod
    def parse(cls, text: str, var: str = "t") -> IntPoly:
        """
        Inverse of `to_str`. Also accepts a plain comma-separated coefficient list
        like `1,3,3,1`.
        """
        text = text.replace(" ", "")
        if not text:
            raise ValueError("Empty polynomial")
        if re.fullmatch(r"-?\d+(,-?\d+)*", text) and "," in text:
            return cls(int(c) for c in text.split(","))
        term_re = re.compile(rf"([+-]?)(\d*)({re.escape(var)}(?:\^(\d+))?)?")
        coeffs: dict[int, int] = {}
        pos = 0
        while pos < len(text):
            m = term_re.match(text, pos)
            if not m or m.end() == pos or not (m.group(2) or m.group(3)):
                raise ValueError(f"Cannot parse polynomial: {text!r}")
            sign = -1 if m.group(1) == "-" else 1
            c = int(m.group(2)) if m.group(2) else 1
            deg = (int(m.group(4)) if m.group(4) else 1) if m.group(3) else 0
            coeffs[deg] = coeffs.get(deg, 0) + sign * c
            pos = m.end()
        top = max(coeffs)
        return cls(coeffs.get(j, 0) for j in range(top + 1))

    @override
    def __str__(self) -> str:
        return self.to_str()

    @override
    def __repr__(self) -> str:
        return f"IntPoly({self.to_str()})"


def add(p: IntPoly, q: IntPoly) -> IntPoly:
    return p + q


def mul(p: IntPoly, q: IntPoly) -> IntPoly:
    return p * q


def scale_exponent(p: IntPoly, m: int) -> IntPoly:
    return p.scale_exponent(m)


def poly_sum(polys: Sequence[IntPoly] | Iterable[IntPoly]) -> IntPoly:
    acc = IntPoly.zero()
    for p in polys:
        acc = acc + p
    return acc


## Tests

T = IntPoly.monomial(1)


def test_ring_ops():
    one_plus_t = IntPoly((1, 1))
    assert one_plus_t * one_plus_t == IntPoly((1, 2, 1))
    assert scale_exponent(one_plus_t, 4) == IntPoly((1, 0, 0, 0, 1))
    assert add(IntPoly.zero(), one_plus_t) == one_plus_t
    assert (one_plus_t - one_plus_t).is_zero()
    assert IntPoly.zero().degree() == ZERO_DEGREE


def test_str_roundtrip():
    for text in ["0", "1", "t^5+t^9", "1+2t+t^2", "3+3t", "-1+t^3", "t"]:
        assert IntPoly.parse(text).to_str() == text
    assert IntPoly.parse("1,3,3,1") == IntPoly((1, 3, 3, 1))
