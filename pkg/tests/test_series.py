"""Arithmetic and truncation contracts of the scalar series type."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novikov.errors import InsufficientPrecision, ParseError
from novikov.series import INF, NovikovSeries

F = Fraction


def S(*terms, trunc=INF):
    return NovikovSeries(terms, trunc)


# ---------------------------------------------------------------------------
# add / mul / d_q / invert examples
# ---------------------------------------------------------------------------


def test_add_cancellation():
    a = S((F(1, 2), 1), (1, 2))
    b = S((F(1, 2), -1))
    assert a + b == S((1, 2))


def test_add_identity():
    a = S((0, 1), (1, 5), trunc=7)
    assert a + NovikovSeries.zero() == a


def test_add_truncation_drops_unknown_orders():
    # (1 + q | T=2) + (q^2 | T=3): the q^2 term lies beyond the result's
    # truncation min(2, 3) = 2 and must not be kept.
    a = S((0, 1), (1, 1), trunc=2)
    b = S((2, 1), trunc=3)
    out = a + b
    assert out == S((0, 1), (1, 1), trunc=2)


def test_mul_telescoping():
    a = S((0, 1), (1, 1))
    b = S((0, 1), (1, -1), (2, 1), (3, -1), trunc=4)
    out = a * b
    # (1+q)(1-q+q^2-q^3) = 1 - q^4, truncated at min(inf+0, 4+0) = 4
    assert out == S((0, 1), trunc=4)


def test_mul_monomials_add_exponents():
    a = NovikovSeries.monomial(1, F(3, 2))
    b = NovikovSeries.monomial(1, F(-1, 2))
    assert a * b == S((1, 1))


def test_mul_by_exact_zero_is_exact_zero():
    a = S((0, 2), (1, 1), trunc=5)
    out = a * NovikovSeries.zero()
    assert out.is_zero()
    assert out.truncation == INF


def test_invert_binomial_matches_geometric_expansion():
    a = S((0, 2), (1, 1))
    inv = a.invert(order=4)
    assert inv == S((0, F(1, 2)), (1, F(-1, 4)), (2, F(1, 8)), (3, F(-1, 16)),
                    trunc=4)
    # independent check: multiply back
    assert (a * inv).equal_up_to(NovikovSeries.one(), 4)


def test_invert_monomial():
    assert NovikovSeries.monomial(1, 3).invert() == S((-3, 1))


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        NovikovSeries.zero().invert()
    with pytest.raises(ZeroDivisionError):
        NovikovSeries.zero(truncation=2).invert()


def test_invert_exact_multiterm_requires_order():
    with pytest.raises(ValueError):
        S((0, 1), (1, 1)).invert()


def test_invert_truncation_propagation():
    # val 1, T = 5: inverse is exact below 5 - 2 = 3
    a = S((1, 1), (2, 1), trunc=5)
    assert a.invert().truncation == 3


def test_d_q_power_rule():
    assert S((F(5, 2), 3)).d_q() == S((F(3, 2), F(15, 2)))


def test_d_q_constant():
    assert NovikovSeries.one().d_q().is_zero()


def test_d_q_negative_exponent():
    assert S((-1, 1)).d_q() == S((-2, -1))


def test_d_q_truncation():
    assert S((0, 1), trunc=3).d_q().truncation == 2


# ---------------------------------------------------------------------------
# equal_up_to
# ---------------------------------------------------------------------------


def test_equal_up_to_ignores_high_terms():
    a = S((0, 1), (1, 1), trunc=4)
    b = S((0, 1), (1, 1), (F(7, 2), 1), trunc=4)
    assert a.equal_up_to(b, 3)


def test_equal_up_to_detects_difference():
    assert not NovikovSeries.one().equal_up_to(S((0, 1), (1, 1)), 3)


def test_equal_up_to_insufficient_precision():
    a = S((0, 1), trunc=1)
    b = S((0, 1), trunc=1)
    with pytest.raises(InsufficientPrecision):
        a.equal_up_to(b, 2)


# ---------------------------------------------------------------------------
# field axioms on random lattice series (exponents in (1/2)Z)
# ---------------------------------------------------------------------------

coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=6)
exponents = st.integers(min_value=-4, max_value=7).map(lambda n: F(n, 2))


@st.composite
def lattice_series(draw, min_terms=0):
    n = draw(st.integers(min_value=min_terms, max_value=4))
    terms = [(draw(exponents), draw(coeffs)) for _ in range(n)]
    return NovikovSeries(terms, truncation=6)


@settings(max_examples=60)
@given(lattice_series(), lattice_series(), lattice_series())
def test_add_associative_and_distributive(a, b, c):
    lhs = (a + b) + c
    assert lhs.equal_up_to(a + (b + c), lhs.truncation)
    d = a * (b + c)
    assert d.equal_up_to(a * b + a * c, d.truncation)


@settings(max_examples=60)
@given(lattice_series(min_terms=1).filter(lambda s: not s.is_zero()))
def test_mul_by_inverse_is_one(a):
    inv = a.invert()
    prod = a * inv
    if prod.truncation > 0:
        assert prod.equal_up_to(NovikovSeries.one(), prod.truncation)


@settings(max_examples=60)
@given(lattice_series(), lattice_series())
def test_leibniz_rule(a, b):
    lhs = (a * b).d_q()
    rhs = a.d_q() * b + a * b.d_q()
    order = min(lhs.truncation, rhs.truncation)
    assert lhs.equal_up_to(rhs, order)


@settings(max_examples=60)
@given(lattice_series(), lattice_series())
def test_truncation_monotonic(a, b):
    assert (a + b).truncation <= min(a.truncation, b.truncation)
    assert (a * b).truncation <= min(a.truncation + b.valuation(),
                                     b.truncation + a.valuation())
    assert a.d_q().truncation <= a.truncation - 1


# ---------------------------------------------------------------------------
# rendering and JSON round-trip
# ---------------------------------------------------------------------------


def test_render_canonical():
    s = S((-1, F(1, 2)), (2, 3), trunc=5)
    assert s.render() == "1/2*q^-1 + 3*q^2 + O(q^5)"


def test_render_zero_and_signs():
    assert NovikovSeries.zero().render() == "0"
    assert S((0, 1), (1, -1)).render() == "1 - q^1"
    assert S((F(1, 2), 1)).render() == "q^(1/2)"


def test_json_round_trip():
    s = S((F(-1, 2), F(2, 3)), (2, -5), trunc=F(17, 2))
    again = NovikovSeries.from_json(s.to_json())
    assert again == s


def test_json_malformed_exponent():
    with pytest.raises(ParseError):
        NovikovSeries.from_json({"terms": [{"exp": "1/0", "coeff": "1"}]})
