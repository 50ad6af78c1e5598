import pytest
import sympy

from pcadyn import poly
from pcadyn.critical import (CurveComponent, Periodic, Preperiodic, critical_locus, image_eliminant, maps_into,
                             recheck_certificate, verify_pca)
from pcadyn.errors import DegenerateMapError, PcaRefused

from conftest import P, endo


def comps(**kw):
    return [CurveComponent(k, P(v)) for k, v in kw.items()]


@pytest.mark.parametrize("d", [2, 3])
def test_power_map_critical_locus(d):
    raw, sqf = critical_locus(endo(f"x^{d}", f"y^{d}", f"z^{d}"))
    assert raw == P(f"{d ** 3}*x^{d - 1}*y^{d - 1}*z^{d - 1}")
    assert sqf == P("x*y*z")


def test_power_map_certificate():
    f = endo("x^2", "y^2", "z^2")
    cert = verify_pca(f, comps(x="x", y="y", z="z"))
    assert cert.forward_map == (0, 1, 2)
    assert all(c == Periodic(1) for c in cert.orbit_classes)
    assert recheck_certificate(f, cert)


def test_cyclic_map_certificate():
    f = endo("y^2", "z^2", "x^2")
    cert = verify_pca(f, comps(x="x", y="y", z="z"))
    assert cert.label_map() == {"x": "z", "y": "x", "z": "y"}
    assert all(c == Periodic(3) for c in cert.orbit_classes)


def test_preperiodic_component():
    # x + y = 0 is not invariant: it lands on the invariant line x = y
    f = endo("x^2", "y^2", "z^2")
    cert = verify_pca(f, comps(x="x", y="y", z="z", m="x + y", l="x - y"))
    assert cert.label_map()["m"] == "l"
    assert cert.orbit_classes[3] == Preperiodic(1, 1)
    assert cert.orbit_classes[4] == Periodic(1)
    assert cert.critical_cover == (0, 1, 2)


def test_missing_component_is_refused_with_subject():
    with pytest.raises(PcaRefused) as exc:
        verify_pca(endo("x^2", "y^2", "z^2"), comps(x="x", y="y"))
    assert exc.value.reason == "uncovered-critical"
    assert exc.value.subject == P("z")


def test_unmapped_component_is_refused():
    # the extra line x - y maps to x^2 - y^2 = 0, which is not in the list
    with pytest.raises(PcaRefused) as exc:
        verify_pca(endo("x^2", "y^2", "z^2"), comps(x="x", y="y", z="z", l="x - 2*y"))
    assert exc.value.reason == "unmapped-component"


def test_invalid_components_are_refused():
    with pytest.raises(PcaRefused):
        CurveComponent("bad", P("x^2"))
    with pytest.raises(PcaRefused):
        CurveComponent("bad", P("x + 1"))
    with pytest.raises(PcaRefused):
        verify_pca(endo("x^2", "y^2", "z^2"), comps(x="x", y="y", z="z", w="2*x"))


def test_degenerate_jacobian():
    with pytest.raises(DegenerateMapError):
        critical_locus(endo("x^2", "x^2", "z^2"))


def test_image_eliminant_of_line():
    f = endo("x^2", "y^2", "z^2")
    elim = image_eliminant(f, CurveComponent("l", P("x - y")))
    assert poly.exact_divide(elim, P("x - y")) is not None
    assert maps_into(f, CurveComponent("l", P("x - y")), CurveComponent("l", P("x - y")))


@pytest.mark.parametrize("maps, src, param", [
    (("x^2 + y*z", "y^2", "z^2"), "y", ("s", "0", "t")),
    (("y^2", "z^2", "x^2"), "x", ("0", "s", "t")),
    (("x^2 - y*z", "y^2 + x*z", "z^2"), "x - y", ("s", "s", "t")),
    (("x^2", "y^2", "z^2"), "x^2 - y*z", ("s*t", "s^2", "t^2")),
])
def test_image_eliminant_vanishes_on_image_points(maps, src, param):
    f = endo(*maps)
    elim = image_eliminant(f, CurveComponent("c", P(src)))
    forms = [P(p, ("s", "t")) for p in param]
    assert poly.substitute(P(src), forms).is_zero
    on_image = poly.substitute(elim, [poly.substitute(c, forms) for c in f.components])
    assert on_image.is_zero
    # independent check: the image is contained in the zero set sympy finds by elimination
    s, t, u0, u1, u2 = sympy.symbols("s t u0 u1 u2")
    img = [sympy.sympify(str(poly.substitute(c, forms)).replace("^", "**"), locals={"x": s, "y": t}) for c in f.components]
    expr = sympy.sympify(str(elim).replace("^", "**"), locals={"x": u0, "y": u1, "z": u2})
    assert sympy.expand(expr.subs({u0: img[0], u1: img[1], u2: img[2]}, simultaneous=True)) == 0
