from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from pcadyn import poly
from pcadyn.errors import ArityError, DegreeCapExceeded, SpecParseError, ZeroDivisorError
from pcadyn.poly import MultiPoly, degree_caps, exact_divide, sylvester_resultant
from pcadyn.polytext import format_poly, parse_poly

from conftest import P

coeff = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def polys(draw, arity=3, max_deg=3, max_terms=5):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        mono = tuple(draw(st.integers(0, max_deg)) for _ in range(arity))
        terms[mono] = draw(coeff)
    return MultiPoly(arity, terms)


def to_sympy(p, names="x y z"):
    syms = sympy.symbols(names)[: p.arity]
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** e for s, e in zip(syms, m)])
                for m, c in p.terms.items()), sympy.Integer(0)), syms


# -- ring axioms ---------------------------------------------------------

@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    zero, one = MultiPoly.zero(3), MultiPoly.constant(3, 1)
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + zero == a and a * one == a and (a * zero).is_zero
    assert (a - a).is_zero


@given(polys(max_deg=2), st.integers(0, 3))
def test_power_matches_repeated_product(a, k):
    acc = MultiPoly.constant(3, 1)
    for _ in range(k):
        acc = acc * a
    assert a ** k == acc


@given(polys(), polys())
def test_exact_division_round_trip(a, b):
    if b.is_zero:
        return
    assert exact_divide(a * b, b) == a


@given(polys(max_terms=4), polys(max_terms=3))
def test_exact_division_refuses_non_multiples(a, b):
    if b.is_zero or b.is_constant():
        return
    q = exact_divide(a * b + MultiPoly.constant(3, 1), b)
    assert q is None


def test_divide_by_zero_raises():
    with pytest.raises(ZeroDivisorError):
        exact_divide(P("x"), MultiPoly.zero(3))


def test_arity_is_checked():
    with pytest.raises(ArityError):
        P("x") + MultiPoly.variable(2, 0)


def test_degree_caps_are_enforced():
    with degree_caps(max_degree=5):
        with pytest.raises(DegreeCapExceeded):
            P("x^3") * P("y^3")
    assert (P("x^3") * P("y^3")).degree == 6


# -- derivatives, substitution -----------------------------------------

@given(polys(), polys())
def test_leibniz_rule(a, b):
    for v in range(3):
        lhs = poly.partial_derivative(a * b, v)
        rhs = poly.partial_derivative(a, v) * b + a * poly.partial_derivative(b, v)
        assert lhs == rhs


def test_jacobian_determinant_against_sympy():
    f = [P("x^2 + y*z"), P("y^2 - 2*x*z"), P("z^2 + x*y")]
    ours = poly.jacobian_det(f)
    exprs = [to_sympy(p)[0] for p in f]
    syms = sympy.symbols("x y z")
    ref = sympy.Matrix(3, 3, lambda i, j: sympy.diff(exprs[i], syms[j])).det()
    assert sympy.expand(to_sympy(ours)[0] - ref) == 0


@given(polys(max_deg=2), polys(max_deg=2, max_terms=3), polys(max_deg=2, max_terms=3), polys(max_deg=2, max_terms=3))
def test_substitution_is_evaluation_compatible(q, a, b, c):
    s = poly.substitute(q, [a, b, c])
    pt = (Fraction(1, 2), Fraction(-2), Fraction(3))
    inner = [poly.evaluate_exact(p, pt) for p in (a, b, c)]
    assert poly.evaluate_exact(s, pt) == poly.evaluate_exact(q, inner)


# -- resultants and gcd ---------------------------------------------------

def _univ(coeffs):
    return poly.from_univariate(coeffs, 1, 0)


def _res_by_roots(p, q):
    """lc(p)^deg q * prod q(roots of p), numerically."""
    pc, qc = poly.univariate_coeffs(p, 0), poly.univariate_coeffs(q, 0)
    roots = np.roots([float(c) for c in reversed(pc)])
    val = float(pc[-1]) ** (len(qc) - 1)
    for r in roots:
        val *= np.polyval([float(c) for c in reversed(qc)], r)
    return val


small = st.lists(st.integers(-4, 4), min_size=2, max_size=5).filter(lambda c: c[-1] != 0)


@given(small, small, small)
def test_resultant_multiplicative_and_matches_root_product(a, b, c):
    p1, p2, q = _univ(a), _univ(b), _univ(c)
    r12 = sylvester_resultant(p1 * p2, q, 0).constant_term()
    r1 = sylvester_resultant(p1, q, 0).constant_term()
    r2 = sylvester_resultant(p2, q, 0).constant_term()
    assert r12 == r1 * r2
    approx = _res_by_roots(p1, q)
    assert abs(complex(approx) - float(r1)) <= 1e-6 * max(1.0, abs(float(r1)))


def test_resultant_against_sympy_bivariate():
    p, q = P("x^2*y + 3*x - y^2 + 1"), P("x^3 - 2*x*y + y - 4")
    for var, name in ((0, "x"), (1, "y")):
        ours = to_sympy(sylvester_resultant(p, q, var))[0]
        ref = sympy.resultant(to_sympy(p)[0], to_sympy(q)[0], sympy.Symbol(name))
        assert sympy.expand(ours - ref) == 0


def test_resultant_of_common_root_vanishes():
    # a shared factor involving x kills the resultant in x
    assert sylvester_resultant(P("(x - 1)*(x + y)"), P("(x - 1)*(y^2 + 3)"), 0).is_zero
    assert sylvester_resultant(P("x^2 - 1"), P("x^3 - 1"), 0).is_zero
    assert not sylvester_resultant(P("x^2 - 2"), P("x^3 - 1"), 0).is_zero


def test_gcd_and_squarefree_against_sympy():
    a = P("(x + y)^2*(x - z)*(y^2 + x*z)")
    b = P("(x + y)*(y^2 + x*z)^2*(z + 3*y)")
    g = poly.gcd(a, b)
    ref = sympy.gcd(to_sympy(a)[0], to_sympy(b)[0])
    assert sympy.simplify(to_sympy(g)[0] / ref).is_number
    sq = poly.squarefree_part(a)
    assert poly.normalize(sq) == poly.normalize(P("(x + y)*(x - z)*(y^2 + x*z)"))


def test_normalize_is_primitive_with_positive_lead():
    p = poly.normalize(P("-2/3*x^2 + 4/9*y*z"))
    assert p == P("3*x^2 - 2*y*z")


# -- text round trip -----------------------------------------------------

@given(polys())
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), ("x", "y", "z")) == p


@pytest.mark.parametrize("text, col", [("x^2 + 3y", 8), ("x + w", 5), ("x^2 +", 6), ("(x + y", 7)])
def test_parse_errors_carry_columns(text, col):
    with pytest.raises(SpecParseError) as exc:
        parse_poly(text, ("x", "y", "z"), line=4)
    assert exc.value.line == 4 and exc.value.column == col


def test_parse_rational_coefficients():
    assert parse_poly("1/9*t^2 - 3/2", ("t",)) == poly.from_univariate([Fraction(-3, 2), 0, Fraction(1, 9)], 1, 0)
