from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pcadyn.series import INF, PowerSeries1, rational_root

N = 8
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=3)


@st.composite
def series(draw, order=N, unit=False, lead_zero=False):
    cs = draw(st.lists(coeff, min_size=order + 1, max_size=order + 1))
    if unit and cs[0] == 0:
        cs[0] = Fraction(1)
    if lead_zero:
        cs[0] = Fraction(0)
        if cs[1] == 0:
            cs[1] = Fraction(2)
    return PowerSeries1(cs, order)


def one(order=N):
    return PowerSeries1([1], order)


@given(series(unit=True))
def test_inverse(u):
    assert u * u.inverse() == one()


@given(series(unit=True))
def test_square_root_squares_back(u):
    if rational_root(u.coeff(0), 2) is None:
        u = PowerSeries1([Fraction(4)] + list(u.coefficients()[1:]), N)
    r = u.power_real(Fraction(1, 2))
    assert r * r == u
    assert r.exact


@settings(max_examples=25)
@given(series(lead_zero=True))
def test_reversion_is_two_sided(s):
    r = s.reversion()
    t = PowerSeries1.variable(N)
    assert s.compose(r) == t
    assert r.compose(s) == t


@settings(max_examples=25)
@given(series(), series(), series(lead_zero=True))
def test_compose_is_a_ring_map(a, b, c):
    assert (a * b).compose(c) == a.compose(c) * b.compose(c)
    assert (a + b).compose(c) == a.compose(c) + b.compose(c)


def test_precision_propagates():
    a = PowerSeries1([1, 2, 3], 5)
    b = PowerSeries1([0, 1], 3)
    assert (a + b).order == 3
    assert (a * PowerSeries1.monomial(2, 1)).order == 7
    assert (b * b).order == 4  # valuation 1 + precision 3
    assert a.compose(PowerSeries1.monomial(2, 1)).order == 11
    assert PowerSeries1([1, 1]).compose(b).order == 3


def test_exact_polynomials_stay_exact():
    p = PowerSeries1([1, 1]) ** 3
    assert p.order >= INF and p.coeffs == (1, 3, 3, 1)
    with pytest.raises(ValueError):
        p.inverse()


def test_coefficient_beyond_precision_is_an_error():
    with pytest.raises(IndexError):
        PowerSeries1([1, 2], 3).coeff(4)


def test_non_units_are_rejected():
    with pytest.raises(ZeroDivisionError):
        PowerSeries1([0, 1], 4).inverse()
    with pytest.raises(ValueError):
        PowerSeries1([1, 1], 4).reversion()


@pytest.mark.parametrize("c, k, r", [(Fraction(27, 8), 3, Fraction(3, 2)), (Fraction(-8), 3, Fraction(-2)),
                                     (Fraction(2), 2, None), (Fraction(-4), 2, None)])
def test_rational_root(c, k, r):
    assert rational_root(c, k) == r


def test_complex_power_matches_binomial_series():
    u = PowerSeries1([complex(2, 1), 1], 8)
    r = u.power_real(Fraction(1, 3))
    assert (r ** 3 - u).max_abs() < 1e-12
