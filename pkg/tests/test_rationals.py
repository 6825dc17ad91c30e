from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from sniep.rationals import rat, rat_str, rats

fractions = st.fractions(max_denominator=10**6)


@given(fractions)
def test_wire_round_trip(q: Fraction):
    assert rat(rat_str(q)) == q


@given(fractions, fractions)
def test_arithmetic_is_exact(a: Fraction, b: Fraction):
    s = a + b
    assert s - b == a
    assert rat(rat_str(s)) == s


@given(fractions)
def test_normalised_storage(q: Fraction):
    r = rat(rat_str(q))
    assert r.denominator > 0
    from math import gcd

    assert gcd(abs(r.numerator), r.denominator) in (1, abs(r.numerator) or 1)


def test_coercions():
    assert rat(3) == Fraction(3)
    assert rat("7/2") == Fraction(7, 2)
    assert rat("-4") == Fraction(-4)
    assert rats(["1/3", 2]) == (Fraction(1, 3), Fraction(2))
    assert rat_str(Fraction(-3, 4)) == "-3/4"
    assert rat_str(Fraction(5)) == "5"
