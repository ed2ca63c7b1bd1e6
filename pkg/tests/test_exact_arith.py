from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hessbasis.exact_arith import (CycloScalar, TruncSeries, UniPoly, cyclotomic_polynomial, demote, euler_phi,
                                   scalar_from_json, scalar_to_json, series_reciprocal)

Z5 = CycloScalar.zeta(5)


def test_cyclotomic_polynomials_small():
    assert cyclotomic_polynomial(1) == UniPoly([-1, 1])
    assert cyclotomic_polynomial(5) == UniPoly([1, 1, 1, 1, 1])
    assert cyclotomic_polynomial(12) == UniPoly([1, 0, -1, 0, 1])
    assert euler_phi(12) == 4 and euler_phi(20) == 8


def test_golden_ratio_square_root_of_five():
    s = 1 + 2 * Z5 + 2 * Z5 ** 4
    assert s * s == 5
    assert demote(s * s) == Fraction(5)
    assert not s.is_rational()


def test_roots_of_unity():
    assert Z5 * Z5 ** 4 == 1
    assert Z5 ** 5 == 1
    assert sum((Z5 ** k for k in range(5)), CycloScalar.rational(0, 5)) == 0
    i = CycloScalar.zeta(4)
    assert i * i == -1


def test_mixed_conductors_lift_to_lcm():
    i = CycloScalar.zeta(4)
    w = CycloScalar.zeta(3)
    x = i * w
    assert x.m == 12
    assert x ** 12 == 1 and x ** 6 != 1 and x ** 4 != 1


def test_inverse_and_division():
    x = 3 + Z5 - 2 * Z5 ** 2
    assert x * x.inverse() == 1
    assert (Fraction(7, 3) / x) * x == Fraction(7, 3)
    with pytest.raises(ZeroDivisionError):
        CycloScalar.rational(0, 5).inverse()


def test_hash_matches_fraction_for_rationals():
    x = Z5 + Z5 ** 4 - Z5 - Z5 ** 4 + Fraction(1, 2)
    assert x == Fraction(1, 2)
    assert hash(x) == hash(Fraction(1, 2))


def test_json_round_trip():
    x = Z5 ** 2 + Z5 ** 3
    assert scalar_from_json(scalar_to_json(x)) == x
    assert scalar_from_json(scalar_to_json(Fraction(-4, 9))) == Fraction(-4, 9)
    assert isinstance(scalar_from_json("3/4"), Fraction)


def test_unipoly_division():
    a = UniPoly([1, 0, 0, 0, 0, 0, -1])
    q, r = a.divmod(UniPoly([1, -1]))
    assert r == UniPoly([]) and q == UniPoly([1, 1, 1, 1, 1, 1])
    assert UniPoly([]).degree == -1
    with pytest.raises(ValueError):
        UniPoly([1, 0, 1]).exact_div(UniPoly([1, 1]))


def test_series_reciprocal():
    s = TruncSeries.from_poly(UniPoly([1, -1]) * UniPoly([1, 0, -1]), 4)
    assert series_reciprocal(s).as_rationals() == [1, 1, 2, 2, 3]
    with pytest.raises(ZeroDivisionError):
        series_reciprocal(TruncSeries(3, [0, 1]))


@pytest.mark.parametrize("m", range(1, 61))
def test_cyclotomic_divides_x_m_minus_1(m):
    xm1 = UniPoly([-1] + [0] * (m - 1) + [1])
    _, r = xm1.divmod(cyclotomic_polynomial(m))
    assert r.degree == -1
    assert cyclotomic_polynomial(m).degree == euler_phi(m)


small = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def element(m):
    return st.lists(small, min_size=euler_phi(m), max_size=euler_phi(m)).map(lambda c: CycloScalar(m, c))


triples = st.sampled_from([1, 4, 5, 12]).flatmap(lambda m: st.tuples(element(m), element(m), element(m)))


@given(triples)
def test_field_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == 0
    if not a.is_zero():
        assert a * a.inverse() == 1
