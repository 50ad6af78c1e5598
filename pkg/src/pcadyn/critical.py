"""Critical locus and post-critical invariance certificates on CP^2."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import poly
from .endo import HomogeneousEndo
from .errors import ArityError, DegenerateMapError, EliminationError, PcaRefused
from .poly import MultiPoly, exact_divide, specialize, substitute

__all__ = [
    "CurveComponent",
    "Periodic",
    "Preperiodic",
    "PcaCertificate",
    "critical_locus",
    "maps_into",
    "image_eliminant",
    "verify_pca",
    "recheck_certificate",
]


@dataclass(frozen=True)
class CurveComponent:
    """Irreducible (user-asserted) homogeneous curve ``poly = 0``."""

    label: str
    poly: MultiPoly

    def __post_init__(self):
        h = poly.is_homogeneous(self.poly)
        if h is None or h == poly.ZERO_FLAG or h < 1:
            raise PcaRefused("invalid-component", f"component {self.label!r} must be homogeneous of positive degree", self.label)
        if poly.squarefree_part(self.poly) != poly.normalize(self.poly):
            raise PcaRefused("invalid-component", f"component {self.label!r} is not squarefree", self.label)


@dataclass(frozen=True)
class Periodic:
    period: int

    tail = 0


@dataclass(frozen=True)
class Preperiodic:
    tail: int
    period: int


@dataclass(frozen=True)
class PcaCertificate:
    components: tuple[CurveComponent, ...]
    critical_cover: tuple[int, ...]
    forward_map: tuple[int, ...]
    orbit_classes: tuple[Periodic | Preperiodic, ...]
    critical_raw: MultiPoly
    critical_squarefree: MultiPoly

    def label_map(self):
        return {c.label: self.components[j].label for c, j in zip(self.components, self.forward_map)}


def critical_locus(f: HomogeneousEndo) -> tuple[MultiPoly, MultiPoly]:
    """Jacobian determinant of the lift and its squarefree part."""
    if f.arity != 3:
        raise ArityError("critical_locus needs a map of CP^2")
    raw = poly.jacobian_det(list(f.components))
    if raw.is_zero:
        raise DegenerateMapError("Jacobian determinant vanishes identically")
    return raw, poly.squarefree_part(raw)


def maps_into(f: HomogeneousEndo, src: CurveComponent, dst: CurveComponent) -> bool:
    """``f(V(src)) subset V(dst)``, decided by ``src | dst o F``."""
    pulled = substitute(dst.poly, f.components)
    if pulled.is_zero:
        return True
    return exact_divide(pulled, src.poly) is not None


def image_eliminant(f: HomogeneousEndo, src: CurveComponent) -> MultiPoly:
    """Squarefree polynomial in the image coordinates vanishing on ``f(V(src))``.

    The graph system ``src(x) = 0, u_i P_j(x) - u_j P_i(x) = 0`` is restricted
    to an affine chart of the source and the two remaining source variables
    are eliminated in index order by Sylvester resultants.  The result may
    carry extraneous factors; each true image factor passes :func:`maps_into`.
    """
    if f.arity != 3:
        raise ArityError("image_eliminant needs a map of CP^2")
    failures = []
    for chart in (2, 1, 0):
        q = specialize(src.poly, chart, 1)
        if q.is_constant():
            failures.append(f"chart {chart}: source curve lies at infinity")
            continue
        free = [v for v in range(3) if v != chart]
        # 5 variables: two source coordinates, then u0, u1, u2
        idx = {free[0]: 0, free[1]: 1}
        qs = poly.remap(q, idx, 5)
        P = [poly.remap(specialize(p, chart, 1), idx, 5) for p in f.components]
        u = [MultiPoly.variable(5, 2 + i) for i in range(3)]
        eqs = {
            (i, j): u[i] * P[j] - u[j] * P[i]
            for i, j in ((0, 1), (0, 2), (1, 2))
        }
        for (a, b) in (((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))):
            r1 = _eliminate(qs, eqs[a], 0)
            r2 = _eliminate(qs, eqs[b], 0)
            if r1.is_zero or r2.is_zero:
                failures.append(f"chart {chart}, minors {a}/{b}: first resultant vanished")
                continue
            r = poly.sylvester_resultant(r1, r2, 1)
            if r.is_zero:
                failures.append(f"chart {chart}, minors {a}/{b}: second resultant vanished")
                continue
            out = poly.remap(r, {2: 0, 3: 1, 4: 2}, 3)
            if out.is_constant():
                failures.append(f"chart {chart}, minors {a}/{b}: constant eliminant")
                continue
            return poly.squarefree_part(out)
    raise EliminationError("elimination degenerated: " + "; ".join(failures))


def _eliminate(p, q, var):
    if p.degree_in(var) <= 0 and q.degree_in(var) <= 0:
        # nothing to eliminate in this variable
        return poly.gcd(p, q) if not (p.is_zero and q.is_zero) else p
    return poly.sylvester_resultant(p, q, var)


def _orbit_class(sigma, i):
    seen = {}
    k = i
    step = 0
    while k not in seen:
        seen[k] = step
        k = sigma[k]
        step += 1
    tail = seen[k]
    period = step - tail
    return Periodic(period) if tail == 0 else Preperiodic(tail, period)


def verify_pca(f: HomogeneousEndo, components: Sequence[CurveComponent]) -> PcaCertificate:
    """Certify that ``components`` cover the critical locus and are closed under ``f``.

    Raises :class:`PcaRefused` when the list does not certify PCA-ness.  A
    refusal is not a claim that ``f`` is not PCA.
    """
    comps = tuple(components)
    labels = [c.label for c in comps]
    if len(set(labels)) != len(labels):
        raise PcaRefused("invalid-component", "duplicate component labels")
    normals = [poly.normalize(c.poly) for c in comps]
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if normals[i] == normals[j]:
                raise PcaRefused("invalid-component", f"components {labels[i]!r} and {labels[j]!r} are associate", labels[j])
    raw, sqf = critical_locus(f)
    remaining = sqf
    cover = []
    for i, c in enumerate(comps):
        q = exact_divide(remaining, c.poly)
        if q is not None:
            remaining = q
            cover.append(i)
    if not remaining.is_constant():
        remaining = poly.normalize(remaining)
        raise PcaRefused(
            "uncovered-critical",
            f"critical factor {remaining} is not covered by the supplied components",
            remaining,
        )
    sigma = []
    for i, src in enumerate(comps):
        hits = [j for j, dst in enumerate(comps) if maps_into(f, src, dst)]
        if not hits:
            raise PcaRefused("unmapped-component", f"image of {src.label!r} is not among the supplied components", src.label)
        if len(hits) > 1:
            names = ", ".join(repr(labels[j]) for j in hits)
            raise PcaRefused("ambiguous-image", f"image of {src.label!r} lies in several components ({names})", src.label)
        sigma.append(hits[0])
    classes = tuple(_orbit_class(sigma, i) for i in range(len(comps)))
    return PcaCertificate(comps, tuple(cover), tuple(sigma), classes, raw, sqf)


def recheck_certificate(f: HomogeneousEndo, cert: PcaCertificate) -> bool:
    """Independent re-verification of a certificate's divisibility claims."""
    prod = MultiPoly.constant(3, 1)
    for i in cert.critical_cover:
        prod = prod * cert.components[i].poly
    if poly.normalize(prod) != poly.normalize(cert.critical_squarefree):
        return False
    for i, j in enumerate(cert.forward_map):
        pulled = substitute(cert.components[j].poly, f.components)
        if exact_divide(pulled, cert.components[i].poly) is None:
            return False
    return True
