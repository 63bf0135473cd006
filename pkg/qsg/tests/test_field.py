# test_field.py

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qsg.errors import InputError
from qsg.field import I, ONE, ZERO, ExtScalar, Scalar, is_square, scalar_arith, sqrt_of

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(Scalar, rationals, rationals)
nonzero = scalars.filter(lambda s: not s.is_zero())


def test_scalar_arith_examples():
    a, b = Scalar(Fraction(1, 2), 1), Scalar(Fraction(1, 2), -1)
    assert scalar_arith(a, b, "mul") == Scalar(Fraction(5, 4)), "(x+iy)(x-iy) should be x^2+y^2"
    assert scalar_arith(a, ZERO, "add") == a
    assert Scalar("3/6") == Scalar(Fraction(1, 2)), "rationals are stored reduced"
    assert Scalar("3/6").re.denominator == 2


def test_division_by_zero_is_input_error():
    with pytest.raises(InputError):
        scalar_arith(ONE, ZERO, "div")
    with pytest.raises(InputError):
        scalar_arith(ONE, ONE, "pow")


def test_bad_literal_rejected():
    with pytest.raises(InputError):
        Scalar("one half")
    with pytest.raises(InputError):
        Scalar(True)


def test_is_square_examples():
    assert is_square(Scalar(4)) == Scalar(2)
    assert is_square(Scalar(-1)) == I
    assert is_square(Scalar(2)) is None
    assert is_square(Scalar(0, 2)) == Scalar(1, 1), "(1+i)^2 = 2i"


def test_ext_scalar_collapses_on_squares():
    assert ExtScalar.make(ONE, ONE, Scalar(4)) == Scalar(3)
    e = ExtScalar.make(ZERO, ONE, Scalar(2))
    assert isinstance(e, ExtScalar)
    assert e * e == Scalar(2), "sqrt(2)^2 should collapse to 2"
    assert (e + 1) * (e - 1) == ONE


def test_sqrt_of():
    assert sqrt_of(Scalar(9)) == Scalar(3)
    assert isinstance(sqrt_of(Scalar(3)), ExtScalar)


def test_sympy_bridge():
    s = Scalar(Fraction(-2, 3), Fraction(5, 7))
    assert Scalar.from_sympy(s.to_sympy()) == s
    assert Scalar.from_sympy(sympy.Rational(1, 2) + 2 * sympy.I) == Scalar(Fraction(1, 2), 2)


def test_rendering():
    assert str(Scalar(Fraction(-1, 2))) == "-1/2"
    assert str(I) == "i"
    assert str(Scalar(1, -2)) == "1-2i"


@settings(max_examples=200, deadline=None)
@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a


@settings(max_examples=200, deadline=None)
@given(nonzero)
def test_inverse(a):
    assert a * a.inverse() == ONE
    assert a / a == ONE


@settings(max_examples=200, deadline=None)
@given(scalars)
def test_square_of_square(a):
    r = is_square(a * a)
    assert r is not None
    assert r == a or r == -a


if __name__ == "__main__":
    pytest.main([__file__])
