import math
import random

import numpy as np
import pytest

from pcadyn.endo import (check_nondegenerate, chart_representation, compose, euler_identity_holds, iterate,
                         new_endo, potential, verify_radial_eigenvalue)
from pcadyn.errors import ArityError, MixedDegreeError, NotHomogeneousError
from pcadyn.poly import evaluate_exact

from conftest import P, endo, random_form


def test_new_endo_validates_components():
    with pytest.raises(NotHomogeneousError):
        endo("x^2 + y", "y^2", "z^2")
    with pytest.raises(MixedDegreeError):
        endo("x^2", "y^3", "z^2")
    with pytest.raises(ArityError):
        new_endo([P("x"), P("y"), P("z"), P("x")])


def test_euler_identity_on_random_forms():
    rng = random.Random(11)
    for _ in range(200):
        d = rng.randint(1, 4)
        f = new_endo([random_form(rng, 3, d) for _ in range(3)])
        assert euler_identity_holds(f)


def test_compose_and_iterate():
    f = endo("x^2", "y^2", "z^2")
    g = endo("y", "z", "x")
    h = compose(f, g)  # f o g
    assert h.components == (P("y^2"), P("z^2"), P("x^2"))
    f3 = iterate(f, 3)
    assert f3.degree == 8 and f3.components[0] == P("x^8")


def test_degenerate_map_has_verified_witness():
    f = endo("x^2", "x*y", "y^2")
    res = check_nondegenerate(f)
    assert not res
    assert res.witness_exact
    assert all(evaluate_exact(p, res.witness) == 0 for p in f.components)
    assert check_nondegenerate(endo("x^2", "y^2", "z^2"))


def test_degenerate_map_with_irrational_witness():
    # common zeros [sqrt(2) : 1 : sqrt(2)] are irrational
    f = endo("x^2 - 2*y^2", "x*z - 2*y^2", "z^2 - x*z")
    res = check_nondegenerate(f)
    assert not res
    w = np.array([complex(c) for c in res.witness])
    assert max(abs(v) for v in f(w / np.max(np.abs(w)))) < 1e-9


def test_chart_map_matches_projective_image():
    f = endo("x^2 + y*z", "y^2 - x*z", "z^2 + 2*x*y")
    cm = chart_representation(f, 2)
    u = np.array([0.3 + 0.1j, -0.7j])
    img = np.array(f([u[0], u[1], 1.0]))
    assert np.allclose(cm(u), img[:2] / img[2])


def test_radial_eigenvalue_is_degree():
    f = endo("x^2", "y^2", "z^2")
    assert verify_radial_eigenvalue(f, (1, 1, 1))
    with pytest.raises(ValueError):
        verify_radial_eigenvalue(f, (2, 1, 1))


def test_potential_of_power_map():
    est = potential(endo("x^2", "y^2", "z^2"), (2, 1, 1), 40)
    assert est.converged
    assert abs(est.extrapolated - math.log(2)) < 1e-10


def test_potential_functional_equation():
    rng = np.random.default_rng(3)
    f = endo("x^2 + y*z", "y^2 - x*z", "z^2 + 2*x*y")
    assert check_nondegenerate(f)
    for _ in range(20):
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        h = potential(f, w, 60).extrapolated
        hf = potential(f, f(w), 60).extrapolated
        assert abs(hf - 2 * h) < 1e-8


def test_potential_rejects_origin():
    with pytest.raises(ValueError):
        potential(endo("x^2", "y^2", "z^2"), (0, 0, 0))
