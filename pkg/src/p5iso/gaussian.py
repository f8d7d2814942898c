"""Exact arithmetic in Q(i), the field of Gaussian rationals.

A scalar is a pair of ``fractions.Fraction`` values (real and imaginary
part), so every number is kept in lowest terms with a positive denominator
and the canonical zero is ``0/1 + (0/1)*i``.  All operations are exact.

The text form is ``p/q`` for real values and ``p/q+r/s*i`` otherwise
(``/q`` omitted when the denominator is 1); :func:`parse_gaussian` inverts
:meth:`GaussianRational.__str__` exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import DivisionByZero

RationalLike = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # spec field accessors: the four arbitrary-precision integers
    @property
    def re_num(self) -> int:
        return self.re.numerator

    @property
    def re_den(self) -> int:
        return self.re.denominator

    @property
    def im_num(self) -> int:
        return self.im.numerator

    @property
    def im_den(self) -> int:
        return self.im.denominator

    @staticmethod
    def of(value: RationalLike) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(value)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def is_rational(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other: RationalLike) -> "GaussianRational":
        if not isinstance(other, (int, Fraction, GaussianRational)):
            return NotImplemented
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: RationalLike) -> "GaussianRational":
        if not isinstance(other, (int, Fraction, GaussianRational)):
            return NotImplemented
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: RationalLike) -> "GaussianRational":
        if not isinstance(other, (int, Fraction, GaussianRational)):
            return NotImplemented
        return GaussianRational.of(other) - self

    def __mul__(self, other: RationalLike) -> "GaussianRational":
        if not isinstance(other, (int, Fraction, GaussianRational)):
            return NotImplemented
        o = other if isinstance(other, GaussianRational) else GaussianRational(other)
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise DivisionByZero("inverse of zero in Q(i)")
        n = self.re * self.re + self.im * self.im
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other: RationalLike) -> "GaussianRational":
        return self * GaussianRational.of(other).inverse()

    def __rtruediv__(self, other: RationalLike) -> "GaussianRational":
        return GaussianRational.of(other) * self.inverse()

    def __pow__(self, n: int) -> "GaussianRational":
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2, a plain rational."""
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __str__(self) -> str:
        if not self.im:
            return _frac_str(self.re)
        re_part = _frac_str(self.re)
        im_part = _frac_str(self.im)
        sign = "+" if self.im >= 0 else ""
        return f"{re_part}{sign}{im_part}*i"

    def __repr__(self) -> str:
        return f"GaussianRational({self})"


def _frac_str(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gauss(re: int | Fraction | str = 0, im: int | Fraction = 0) -> GaussianRational:
    """Build a Gaussian rational; a string argument is parsed."""
    if isinstance(re, str):
        return parse_gaussian(re)
    return GaussianRational(re, im)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the canonical text form (``3/4``, ``-1/2+3*i``, ``2*i`` ...)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty Gaussian rational")
    if not s.endswith("i"):
        return GaussianRational(Fraction(s))
    body = s[:-1]
    if body.endswith("*"):
        body = body[:-1]
    # split real and imaginary part at the last top-level +/- sign
    split_at = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "+-*/":
            split_at = k
            break
    if split_at == -1:
        re_text, im_text = "0", body
    else:
        re_text, im_text = body[:split_at], body[split_at:]
    if im_text in ("", "+"):
        im_text = "1"
    elif im_text == "-":
        im_text = "-1"
    if im_text.startswith("+"):
        im_text = im_text[1:]
    return GaussianRational(Fraction(re_text), Fraction(im_text))


def gauss_rational_arith(a: GaussianRational, b: GaussianRational | None, op: str) -> GaussianRational:
    """Dispatch-style field arithmetic: op in {add, mul, inv, neg}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")
