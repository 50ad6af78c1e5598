import cmath
import random
from fractions import Fraction

import pytest

from pcadyn.errors import DegenerateMapError, LiftError
from pcadyn.normalization import (
    Finite,
    RationalCurveMap,
    RationalMap1D,
    Undecided,
    audit_1d_dichotomy,
    critical_points_1d,
    degree_1d,
    fixed_points_1d,
    functoriality_defect,
    lift_over_normalization,
    lift_scalar,
    multiplier_1d,
    postcritical_orbit_1d,
)

from conftest import P, endo


def S(text):
    return P(text, ("s", "t"))


def curve(*texts):
    return RationalCurveMap(tuple(S(t) for t in texts))


def g1(a, b):
    return RationalMap1D(S(a), S(b))


POWER2 = ("x^2", "y^2", "z^2")


def _multipliers(g):
    return sorted((str(p), multiplier_1d(g, p)) for p in fixed_points_1d(g))


@pytest.mark.parametrize("forms", [("s", "s", "t"), ("s^2", "t^2", "s*t")])
def test_power_map_lifts_to_squaring(forms):
    f, n = endo(*POWER2), curve(*forms)
    g = lift_over_normalization(f, n)
    assert (g.A, g.B) == (S("s^2"), S("t^2"))
    assert lift_scalar(f, n, g) == 1
    assert degree_1d(g, as_lift=True).audit == "PASS"
    assert _multipliers(g) == [("0", 0), ("1", 2), ("inf", 0)]
    aud = audit_1d_dichotomy(g)
    assert aud.passed and aud.pcf.verdict == "PCF" and not aud.notes


def test_cubic_power_map_over_the_conic():
    g = lift_over_normalization(endo("x^3", "y^3", "z^3"), curve("s^2", "t^2", "s*t"))
    assert (g.A, g.B) == (S("s^3"), S("t^3"))
    assert g.wronskian() == S("9*s^2*t^2")


def test_non_invariant_line_is_refused():
    with pytest.raises(LiftError):
        lift_over_normalization(endo(*POWER2), curve("2*s", "s", "t"))


def test_non_birational_parametrization_is_refused():
    # [s^2 : s^2 : t^2] covers the line x = y twice
    with pytest.raises(LiftError):
        lift_over_normalization(endo(*POWER2), curve("s^2", "s^2", "t^2"))


def test_invalid_parametrizations():
    with pytest.raises(ValueError):
        curve("s", "s", "s")
    with pytest.raises(ValueError):
        curve("s^2", "s*t", "s")
    with pytest.raises(ValueError):
        curve("s^2", "s*t", "0")


@pytest.mark.parametrize("forms", [("s", "s", "t"), ("s^2", "t^2", "s*t"), ("s", "t", "s")])
def test_functoriality_at_random_points(forms):
    f, n = endo(*POWER2), curve(*forms)
    g = lift_over_normalization(f, n)
    rng = random.Random(3)
    for _ in range(20):
        tau = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), 1 + 0j)
        assert functoriality_defect(f, n, g, tau) < 1e-10


# -- one-variable maps ---------------------------------------------------

def test_critical_points_are_wronskian_roots():
    pts = critical_points_1d(g1("s^3", "t^3"))
    assert sorted((str(p), p.multiplicity) for p in pts) == [("0", 2), ("inf", 2)]


def _numeric_derivative(g, u, h=1e-6):
    def F(z):
        a, b = g.apply((z, 1))
        return a / b
    return (F(u + h) - F(u - h)) / (2 * h)


@pytest.mark.parametrize("a, b", [("s^2 + s*t", "t^2"), ("s^3 - 2*s*t^2", "t^3 + s^2*t"), ("s^2 + 2*t^2", "2*s*t")])
def test_multipliers_match_finite_differences(a, b):
    g = g1(a, b)
    fps = fixed_points_1d(g)
    assert sum(p.multiplicity for p in fps) == g.degree + 1
    for p in fps:
        if p.is_infinity:
            continue
        lam = complex(multiplier_1d(g, p))
        assert cmath.isclose(lam, _numeric_derivative(g, complex(p.u)), rel_tol=1e-6, abs_tol=1e-6)


def test_parabolic_map_fails_the_dichotomy():
    aud = audit_1d_dichotomy(g1("s^2 + s*t", "t^2"))
    assert aud.verdict == "FAIL-DICHOTOMY"
    zero = next(fp for fp in aud.fixed_points if str(fp.point) == "0")
    assert zero.multiplier == 1 and zero.eigen_class.tag == "Parabolic"


def test_chebyshev_is_pcf():
    v = postcritical_orbit_1d(g1("s^2 - 2*t^2", "t^2"))
    assert v.verdict == "PCF"
    orbits = dict(zip((str(c) for c in v.critical_points), v.orbits))
    assert orbits["0"] == Finite(2, 1)
    assert orbits["inf"] == Finite(0, 1)


def test_newton_map_with_irrational_critical_points_is_pcf():
    g = g1("s^2 + 2*t^2", "2*s*t")
    v = postcritical_orbit_1d(g)
    assert sum(not c.exact for c in v.critical_points) == 2
    assert v.verdict == "PCF"
    assert audit_1d_dichotomy(g).passed


@pytest.mark.parametrize("a, b", [("s^2 + t^2", "t^2"), ("s^3 + s*t^2 + t^3", "t^3")])
def test_escaping_orbits_are_undecided(a, b):
    v = postcritical_orbit_1d(g1(a, b), max_iter=64)
    assert v.verdict == "Undecided"
    assert any(isinstance(o, Undecided) for o in v.orbits)
    aud = audit_1d_dichotomy(g1(a, b))
    assert aud.notes


def test_rational_map_validation():
    with pytest.raises(DegenerateMapError):
        g1("s^2", "s*t")
    with pytest.raises(ValueError):
        g1("s^2", "t")
    with pytest.raises(DegenerateMapError):
        g1("0", "0")
    assert degree_1d(g1("s", "t"), as_lift=True).audit == "FAIL"


def test_exact_iteration_keeps_rationals():
    g = g1("s^2 - 2*t^2", "t^2")
    assert g.apply_exact((Fraction(1, 2), Fraction(1))) == (Fraction(-7, 4), Fraction(1))
