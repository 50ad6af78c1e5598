import random

import numpy as np
import pytest

from pcadyn.critical import CurveComponent
from pcadyn.errors import DegenerateMapError, NotFixedError, TangentSplitError
from pcadyn.fixed_points import (ProjPoint, audit_theorem, classify_eigenvalue, eigenvalues_at,
                                 fixed_point_residual, solve_fixed_points, tangent_split)

from conftest import P, endo, random_endo


def _newton_oracle(f, seeds, rng):
    """Fixed points reached by plain Newton in the chart z = 1 (finite-difference Jacobian)."""
    def G(u):
        w = np.array([u[0], u[1], 1.0], dtype=complex)
        fw = np.array(f(w))
        return np.array([fw[0] / fw[2] - u[0], fw[1] / fw[2] - u[1]])

    found = []
    for _ in range(seeds):
        u = np.array([complex(rng.gauss(0, 2), rng.gauss(0, 2)) for _ in range(2)])
        for _ in range(60):
            g = G(u)
            h = 1e-7
            J = np.column_stack([(G(u + h * e) - g) / h for e in np.eye(2)])
            try:
                step = np.linalg.solve(J, g)
            except np.linalg.LinAlgError:
                break
            u = u - step
            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > 1e8:
                break
            if np.max(np.abs(step)) < 1e-13 * max(1.0, np.max(np.abs(u))):
                break
        if np.all(np.isfinite(u)) and np.max(np.abs(G(u))) < 1e-9:
            found.append(ProjPoint([u[0], u[1], 1.0]))
    return found


def _multiset_close(a, b, tol):
    b = list(b)
    for z in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - z))
        if abs(b[k] - z) > tol:
            return False
        b.pop(k)
    return True


@pytest.mark.parametrize("d, count", [(2, 7), (3, 13)])
def test_power_map_fixed_point_counts(d, count):
    f = endo(f"x^{d}", f"y^{d}", f"z^{d}")
    pts = solve_fixed_points(f)
    assert len(pts) == count
    for p in pts:
        assert fixed_point_residual(f, p) < 1e-12
        for lam in eigenvalues_at(f, p):
            assert min(abs(abs(lam) - 0), abs(abs(lam) - d)) < 1e-9


def test_solver_completeness_against_newton_oracle():
    rng = random.Random(99)
    for d in (2, 3):
        f = random_endo(rng, d)
        pts = solve_fixed_points(f)
        assert len(pts) <= d * d + d + 1
        oracle = _newton_oracle(f, 100, rng)
        assert oracle, "oracle found nothing"
        for q in oracle:
            assert min(q.distance(p) for p in pts) < 1e-6


def test_generic_maps_have_full_count():
    rng = random.Random(5)
    for d in (2, 3):
        for _ in range(3):
            f = random_endo(rng, d)
            assert len(solve_fixed_points(f)) == d * d + d + 1


def test_eigenvalues_are_chart_independent():
    rng = random.Random(17)
    for d in (2, 3):
        f = random_endo(rng, d)
        for p in solve_fixed_points(f):
            charts = [c for c in range(3) if abs(p[c]) > 1e-3]
            ref = eigenvalues_at(f, p)
            for c in charts:
                assert _multiset_close(eigenvalues_at(f, p, c), ref, 1e-8 * max(1.0, max(abs(l) for l in ref)))


def test_not_fixed_point_is_rejected():
    with pytest.raises(NotFixedError):
        eigenvalues_at(endo("x^2", "y^2", "z^2"), (2, 1, 1))


def test_canonical_points():
    p = ProjPoint([2, -4, 1])
    assert p.coords == (-0.5 + 0j, 1 + 0j, -0.25 + 0j)
    assert ProjPoint([0, -0.0, 3]).coords == (0j, 0j, 1 + 0j)
    assert str(ProjPoint([1j, 1, 0]).coords[0]) == "(1+0j)"


@pytest.mark.parametrize("lam, tag", [
    (0, "Superattracting"), (1e-8, "Superattracting"), (0.5, "Attracting"), (2, "Repelling"),
    (1, "Parabolic"), (-1, "Parabolic"), (np.exp(2j * np.pi / 7), "Parabolic"),
    (np.exp(2j * np.pi * 0.5 ** 0.5), "Elliptic"),
])
def test_classify_eigenvalue(lam, tag):
    assert classify_eigenvalue(lam).tag == tag


def test_tangent_split_on_invariant_line():
    f = endo("x^2", "y^2", "z^2")
    s = tangent_split(f, (0, 1, 1), CurveComponent("x", P("x")))
    assert abs(s.tangent - 2) < 1e-12 and abs(s.transversal) < 1e-12
    with pytest.raises(TangentSplitError):
        tangent_split(f, (1, 1, 1), CurveComponent("x", P("x")))
    with pytest.raises(TangentSplitError):
        tangent_split(f, (0, 0, 1), CurveComponent("xy", P("x*y")))


def test_audit_power_and_cyclic():
    comps = [CurveComponent(v, P(v)) for v in "xyz"]
    for maps in (("x^2", "y^2", "z^2"), ("x^3", "y^3", "z^3"), ("y^2", "z^2", "x^2")):
        res = audit_theorem(endo(*maps), comps)
        assert res.verdict == "PASS"
        for r in res.reports:
            assert {c.tag for c in r.classes} <= {"Superattracting", "Repelling"}


def test_audit_flags_non_pca_map():
    # on the line y = 0 the map is u -> u^2 + u/4, whose fixed point 0 has multiplier 1/4
    f = endo("x^2 + 1/4*x*z", "y^2", "z^2")
    res = audit_theorem(f)
    assert res.verdict == "FAIL-DICHOTOMY"
    assert res.notes


def test_degenerate_map_raises():
    with pytest.raises(DegenerateMapError):
        solve_fixed_points(endo("x^2", "x*y", "y^2"))
