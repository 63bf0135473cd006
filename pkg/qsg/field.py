# field.py

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Optional, Union

import sympy

from qsg.errors import InputError

RationalLike = Union[int, Fraction, str]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"not a rational: {x!r} ({e})") from e
    raise InputError(f"not a rational: {x!r}")


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class Scalar:
    """An element re + im*i of the Gaussian rationals. Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    @classmethod
    def of(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return cls(x)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.re, self.im))

    # --- predicates ---

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # --- arithmetic ---

    @staticmethod
    def _coerce(other) -> Optional["Scalar"]:
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Scalar._raw(Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return Scalar._raw(self.re * o.re, Fraction(0))
        return Scalar._raw(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise InputError("division by zero")
        if self.im == 0:
            return Scalar._raw(1 / self.re, Fraction(0))
        n = self.norm()
        return Scalar._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int) -> "Scalar":
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # --- comparison / hashing ---

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def sort_key(self):
        return (self.re, self.im)

    # --- rendering ---

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    # --- sympy bridge ---

    def to_sympy(self):
        re = sympy.Rational(self.re.numerator, self.re.denominator)
        im = sympy.Rational(self.im.numerator, self.im.denominator)
        return re + sympy.I * im

    @classmethod
    def from_sympy(cls, expr) -> "Scalar":
        expr = sympy.expand(expr)
        re, im = sympy.re(expr), sympy.im(expr)
        if not (re.is_Rational and im.is_Rational):
            raise InputError(f"not a Gaussian rational: {expr}")
        return cls(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _imag_str(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}i"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InputError(f"unknown scalar operation: {op}")


def is_square(a: Scalar) -> Optional[Scalar]:
    """Return r with r*r == a, or None when a is not a square in Q(i).

    The chosen root has positive real part, or is a non-negative multiple
    of i when the real part must vanish.
    """
    p, q = a.re, a.im
    if q == 0:
        if p >= 0:
            r = rational_sqrt(p)
            return None if r is None else Scalar._raw(r, Fraction(0))
        r = rational_sqrt(-p)
        return None if r is None else Scalar._raw(Fraction(0), r)
    s = rational_sqrt(p * p + q * q)
    if s is None:
        return None
    x = rational_sqrt((p + s) / 2)
    if x is None or x == 0:
        return None
    return Scalar._raw(x, q / (2 * x))


class ExtScalar:
    """a + b*sqrt(disc) with b != 0 and disc not a square in Q(i)."""

    __slots__ = ("a", "b", "disc")

    def __init__(self, a: Scalar, b: Scalar, disc: Scalar):
        if b.is_zero():
            raise InputError("ExtScalar needs a nonzero irrational part; use ExtScalar.make")
        if is_square(disc) is not None:
            raise InputError(f"{disc} is a square in Q(i)")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "disc", disc)

    @classmethod
    def _raw(cls, a: Scalar, b: Scalar, disc: Scalar) -> "ExtScalar":
        e = object.__new__(cls)
        object.__setattr__(e, "a", a)
        object.__setattr__(e, "b", b)
        object.__setattr__(e, "disc", disc)
        return e

    @staticmethod
    def make(a: Scalar, b: Scalar, disc: Scalar) -> "FieldElement":
        if b.is_zero():
            return a
        r = is_square(disc)
        if r is not None:
            return a + b * r
        return ExtScalar._raw(a, b, disc)

    def __setattr__(self, name, value):
        raise AttributeError("ExtScalar is immutable")

    def _parts(self, other):
        if isinstance(other, ExtScalar):
            if other.disc != self.disc:
                raise InputError(f"mixed extensions sqrt({self.disc}) and sqrt({other.disc})")
            return other.a, other.b
        o = Scalar._coerce(other)
        if o is None:
            return None
        return o, ZERO

    def __add__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return ExtScalar.make(self.a + parts[0], self.b + parts[1], self.disc)

    __radd__ = __add__

    def __neg__(self) -> "ExtScalar":
        return ExtScalar._raw(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return ExtScalar.make(self.a - parts[0], self.b - parts[1], self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        return ExtScalar.make(self.a * c + self.b * d * self.disc,
                              self.a * d + self.b * c, self.disc)

    __rmul__ = __mul__

    def conj(self) -> "ExtScalar":
        return ExtScalar._raw(self.a, -self.b, self.disc)

    def inverse(self) -> "ExtScalar":
        n = self.a * self.a - self.b * self.b * self.disc
        return ExtScalar._raw(self.a / n, -self.b / n, self.disc)

    def __truediv__(self, other):
        if isinstance(other, ExtScalar):
            return self * other.inverse()
        o = Scalar._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar.make(self.a / o, self.b / o, self.disc)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return False

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtScalar):
            return (self.a, self.b, self.disc) == (other.a, other.b, other.disc)
        if Scalar._coerce(other) is not None:
            return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.disc))

    def __str__(self) -> str:
        return f"({self.a})+({self.b})*sqrt({self.disc})"

    __repr__ = __str__


FieldElement = Union[Scalar, ExtScalar]


def sqrt_of(disc: Scalar) -> FieldElement:
    """sqrt(disc) inside Q(i) when possible, else as an ExtScalar."""
    r = is_square(disc)
    if r is not None:
        return r
    return ExtScalar._raw(ZERO, ONE, disc)


def is_zero(x) -> bool:
    if isinstance(x, (Scalar, ExtScalar)):
        return x.is_zero()
    return x == 0
