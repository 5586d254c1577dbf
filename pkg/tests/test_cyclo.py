from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from borel_cycles.cyclo import (
    FieldMismatchError, InvalidConductorError, ZeroDivisorError, cyclotomic_poly, format_element, from_json,
    make_field, parse_element, to_json,
)

CONDUCTORS = (3, 4, 5, 8, 12)
rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(n):
    F = make_field(n)
    return st.lists(rat, min_size=F.degree, max_size=F.degree).map(F.from_coeffs)


def test_cyclotomic_polys():
    assert cyclotomic_poly(3) == (1, 1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("n", CONDUCTORS)
def test_zeta_has_order_n(n):
    F = make_field(n)
    z = F.zeta(1)
    assert z ** n == F.one()
    assert all(z ** k != F.one() for k in range(1, n))


@pytest.mark.parametrize("n", CONDUCTORS)
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_field_axioms(n, data):
    a, b, c = (data.draw(elements(n)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == make_field(n).zero()
    if not a.is_zero():
        assert a * a.inverse() == make_field(n).one()


@settings(max_examples=40, deadline=None)
@given(elements(3), elements(3))
def test_embedding_is_a_homomorphism(a, b):
    assert abs(complex((a * b).embed(80)) - complex(a.embed(80)) * complex(b.embed(80))) < 1e-9 * (1 + abs(complex(a.embed()) * complex(b.embed())))
    assert abs(complex(a.conj().embed()) - complex(a.embed()).conjugate()) < 1e-9 * (1 + abs(complex(a.embed())))


@settings(max_examples=40, deadline=None)
@given(elements(5))
def test_text_and_json_round_trip(a):
    F = make_field(5)
    assert parse_element(F, format_element(a)) == a
    assert from_json(to_json(a)) == a


def test_parse_forms(F3):
    z = F3.zeta(1)
    assert parse_element(F3, "zeta") == z
    assert parse_element(F3, "z^2") == -1 - z
    assert parse_element(F3, "1/2*z + 3") == F3.from_coeffs([3, Fraction(1, 2)])
    assert parse_element(F3, "z^-1") == z * z


def test_errors(F3):
    with pytest.raises(InvalidConductorError):
        make_field(1)
    with pytest.raises(ZeroDivisorError):
        F3.zero().inverse()
    with pytest.raises(FieldMismatchError):
        F3.zeta(1) + make_field(4).zeta(1)
