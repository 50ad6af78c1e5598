import random
from fractions import Fraction

import numpy as np
import pytest

from pcadyn.errors import BranchError
from pcadyn.local_analysis import branch_from_parametrization, newton_puiseux
from pcadyn.polytext import parse_poly
from pcadyn.series import PowerSeries1

ORDER = 16


def Q(text):
    return parse_poly(text, ("x", "y"))


def residual_valuation(q, b, tol=1e-10):
    """Valuation of q(gamma(t)) from plain truncated convolutions.

    A coefficient counts as zero when it is within ``tol`` of the same sum
    taken over absolute values, which bounds its rounding error.
    """
    X, Y = (np.array([complex(s.coeff(k)) for k in range(ORDER + 1)]) for s in b.point_series())

    def power(s, e):
        out = np.zeros(ORDER + 1, dtype=s.dtype)
        out[0] = 1
        for _ in range(e):
            out = np.convolve(out, s)[: ORDER + 1]
        return out

    total = np.zeros(ORDER + 1, dtype=complex)
    bound = np.zeros(ORDER + 1)
    for (i, j), c in q.terms.items():
        total += complex(c) * np.convolve(power(X, i), power(Y, j))[: ORDER + 1]
        bound += abs(float(c)) * np.convolve(power(np.abs(X), i), power(np.abs(Y), j))[: ORDER + 1]
    nz = np.nonzero(np.abs(total) > tol * np.maximum(bound, 1.0))[0]
    return int(nz[0]) if len(nz) else ORDER + 1


def test_cusp_characteristic():
    (b,) = newton_puiseux(Q("y^2 - x^3"), ORDER)
    assert (b.m, b.n, b.alpha) == (2, 3, 1)
    assert b.exact and b.is_singular


def test_node_gives_two_smooth_branches():
    bs = newton_puiseux(Q("y^2 - x^2"), ORDER)
    assert len(bs) == 2 and all(b.is_smooth for b in bs)
    assert sorted(b.y_series.coeff(1) for b in bs) == [-1, 1]


def test_coordinate_axes():
    bs = newton_puiseux(Q("x*y"), ORDER)
    assert len(bs) == 2
    assert {b.swapped for b in bs} == {True, False}


def test_vertical_parabola():
    (b,) = newton_puiseux(Q("x - y^2"), ORDER)
    assert b.m == 2 and b.y_series.coeff(1) in (1, -1)
    assert not b.is_singular


def test_repeated_factors_are_dropped():
    bs = newton_puiseux(Q("(y^2 - x^3)^2*(y + x)"), ORDER)
    assert sorted(b.m for b in bs) == [1, 2]


def test_irrational_coefficients_go_numeric():
    (b,) = newton_puiseux(Q("y^2 - 2*x^3"), ORDER)
    assert not b.exact and abs(abs(b.alpha) - 2 ** 0.5) < 1e-12


@pytest.mark.parametrize("text", ["0", "x + y + 1", "x^2 + 3"])
def test_curves_missing_the_origin_are_rejected(text):
    with pytest.raises(BranchError):
        newton_puiseux(Q(text), ORDER)


def test_parametrization_normal_form():
    t = PowerSeries1.variable()
    X = (t ** 2 + t ** 3).truncate(ORDER)
    Y = (t ** 3).truncate(ORDER)
    b = branch_from_parametrization(X, Y, ORDER)
    assert (b.m, b.n) == (2, 3)
    assert residual_valuation(Q("y^2 - x^3 + x*y*0"), b) >= 3  # sanity of the oracle
    with pytest.raises(BranchError):
        branch_from_parametrization(PowerSeries1([1, 1], ORDER), t, ORDER)


# -- randomized products -------------------------------------------------

def _nz(rng):
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2]))


def _factor(rng):
    kind = rng.choice(["cusp", "node", "smooth", "vertical"])
    if kind == "cusp":
        m, n = rng.choice([(2, 3), (2, 5), (3, 4), (3, 5)])
        return f"(y^{m} - ({_nz(rng)})*x^{n} + ({rng.randint(-2, 2)})*x^{n + 1})", 1
    if kind == "node":
        return f"(y^2 - ({_nz(rng) ** 2 * rng.choice([1, 2])})*x^2 + ({rng.randint(-2, 2)})*x^3)", 2
    if kind == "smooth":
        return f"(y - ({_nz(rng)})*x - ({rng.randint(-2, 2)})*x^2)", 1
    return f"(x - ({_nz(rng)})*y^2)", 1


def random_products(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        fs = [_factor(rng) for _ in range(rng.randint(1, 3))]
        if len({f for f, _ in fs}) < len(fs):
            continue
        out.append(("*".join(f for f, _ in fs), sum(k for _, k in fs)))
    return out


@pytest.mark.parametrize("text, expected", random_products(7, 50))
def test_random_products_are_annihilated(text, expected):
    q = Q(text)
    bs = newton_puiseux(q, ORDER)
    assert len(bs) == expected
    for b in bs:
        assert b.order >= ORDER
        assert residual_valuation(q, b) > ORDER
