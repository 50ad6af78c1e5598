"""Fixed points of endomorphisms of CP^2, their eigenvalues and the dichotomy audit."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import poly
from .critical import CurveComponent, PcaCertificate, verify_pca
from .endo import HomogeneousEndo, best_chart, chart_representation, check_nondegenerate
from .errors import (
    ArityError,
    DegenerateMapError,
    EliminationError,
    NotFixedError,
    SolverError,
    TangentSplitError,
)
from .poly import MultiPoly, evaluate, partial_derivative, specialize
from .roots import rational_univariate_roots, ugcd, _trim

RESIDUAL_TOL = 1e-9
CLASS_TOL = 1e-6
DEDUP_TOL = 1e-8
ROOT_PROBE = 24

SUPERATTRACTING = "Superattracting"
ATTRACTING = "Attracting"
PARABOLIC = "Parabolic"
ELLIPTIC = "Elliptic"
REPELLING = "Repelling"
DICHOTOMY_OK = (SUPERATTRACTING, REPELLING)


# ---------------------------------------------------------------------
# points
# ---------------------------------------------------------------------

def _canonical(coords):
    v = [complex(c) for c in coords]
    i = best_chart(v)
    if v[i] == 0:
        raise ValueError("the zero vector is not a projective point")
    pivot = v[i]
    out = [_clean(c / pivot) for c in v]
    out[i] = 1.0 + 0j
    return tuple(out)


def _clean(c: complex) -> complex:
    # drop signed zeros so that equal points print and sort identically
    return complex(c.real + 0.0, c.imag + 0.0)


@dataclass(frozen=True)
class ProjPoint:
    """Projective point in canonical form: the first coordinate of maximal
    modulus is exactly 1, so the sup-norm is 1."""

    coords: tuple[complex, ...]

    def __init__(self, coords):
        object.__setattr__(self, "coords", _canonical(coords))

    @property
    def chart(self) -> int:
        return best_chart(self.coords)

    def affine(self, chart=None):
        c = self.chart if chart is None else chart
        pivot = self.coords[c]
        return [self.coords[i] / pivot for i in range(len(self.coords)) if i != c]

    def distance(self, other: "ProjPoint") -> float:
        return max(abs(a - b) for a, b in zip(self.coords, other.coords))

    def sort_key(self):
        return tuple(x for c in self.coords for x in (round(c.real, 9) + 0.0, round(c.imag, 9) + 0.0))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


# ---------------------------------------------------------------------
# the fixed-point system
# ---------------------------------------------------------------------

def fixed_point_system(f: HomogeneousEndo) -> list[MultiPoly]:
    """Minors ``m_ij = x_i P_j - x_j P_i`` for ``(i, j) = (0,1), (0,2), (1,2)``."""
    if f.arity != 3:
        raise ArityError("fixed_point_system needs a map of CP^2")
    x = MultiPoly.gens(3)
    P = f.components
    return [x[i] * P[j] - x[j] * P[i] for i, j in ((0, 1), (0, 2), (1, 2))]


def fixed_point_residual(f: HomogeneousEndo, point) -> float:
    """``max |m_ij(z)| / max |P(z)|`` at the sup-normalized point."""
    z = np.array(_canonical(point))
    fz = np.array(f(z))
    scale = np.max(np.abs(fz))
    if scale == 0:
        return math.inf
    m = max(abs(z[i] * fz[j] - z[j] * fz[i]) for i in range(len(z)) for j in range(i + 1, len(z)))
    return float(m / scale)


def _exact_common_roots(polys):
    """Roots of the gcd of exact univariate coefficient lists (low -> high)."""
    nonzero = [_trim(p) for p in polys if _trim(p)]
    if not nonzero:
        return None
    g = nonzero[0]
    for p in nonzero[1:]:
        g = ugcd(g, p)
    return rational_univariate_roots(g) if len(g) > 1 else []


def _newton2(A, B, u, v, steps=8):
    """Damped-free Newton on ``A = B = 0``; keeps the best iterate."""
    dA = (partial_derivative(A, 0), partial_derivative(A, 1))
    dB = (partial_derivative(B, 0), partial_derivative(B, 1))

    def res(a, b):
        pt = (a, b)
        return abs(evaluate(A, pt)) + abs(evaluate(B, pt))

    best = (res(u, v), u, v)
    for _ in range(steps):
        pt = (u, v)
        F = np.array([evaluate(A, pt), evaluate(B, pt)])
        J = np.array([[evaluate(dA[0], pt), evaluate(dA[1], pt)],
                      [evaluate(dB[0], pt), evaluate(dB[1], pt)]])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        u, v = u - step[0], v - step[1]
        r = res(u, v)
        if r < best[0]:
            best = (r, u, v)
        if np.max(np.abs(step)) < 1e-16 * max(1.0, abs(u), abs(v)):
            break
    return best[1], best[2]


def _chart_points(f: HomogeneousEndo):
    """Fixed points in the affine chart ``x_2 = 1`` (coordinates ``u = x_0, v = x_1``)."""
    P = [poly.remap(specialize(p, 2, 1), {0: 0, 1: 1}, 2) for p in f.components]
    u, v = MultiPoly.gens(2)
    A = u * P[2] - P[0]
    B = v * P[2] - P[1]
    if A.is_zero and B.is_zero:
        raise DegenerateMapError("every point of the chart is fixed")
    if A.is_zero or B.is_zero or not poly.gcd(A, B).is_constant():
        raise EliminationError("fixed-point minors share a factor: the map has a curve of fixed points")
    Ru = poly.sylvester_resultant(A, B, 1)
    Rv = poly.sylvester_resultant(A, B, 0)
    if Ru.is_zero or Rv.is_zero:
        raise EliminationError("fixed-point eliminant vanishes identically")
    us = [r for r in rational_univariate_roots(poly.univariate_coeffs(Ru, 0))] if not Ru.is_constant() else []
    vs_all = [complex(r.value) for r in rational_univariate_roots(poly.univariate_coeffs(Rv, 1))] if not Rv.is_constant() else []
    found = []
    for ru in us:
        if ru.exact:
            a = poly.univariate_coeffs(poly.specialize(A, 0, ru.value), 1)
            b = poly.univariate_coeffs(poly.specialize(B, 0, ru.value), 1)
            roots = _exact_common_roots([a, b])
            for rv in roots or []:
                found.append((complex(ru.value), complex(rv.value)))
            continue
        uu = complex(ru.value)
        for vv in vs_all:
            if _scaled_residual(A, B, uu, vv) <= 1e-6:
                found.append(_newton2(A, B, uu, vv))
    return [(a, b, 1.0) for a, b in found]


def _scaled_residual(A, B, u, v):
    m = max(1.0, abs(u), abs(v))
    out = 0.0
    for p in (A, B):
        size = sum(abs(float(c)) * m ** sum(e) for e, c in p.terms.items())
        out = max(out, abs(evaluate(p, (u, v))) / max(size, 1e-300))
    return out


def _line_points(f: HomogeneousEndo):
    """Fixed points on ``x_2 = 0``: first ``x_1 = 1``, then ``[1:0:0]``."""
    P = f.components
    out = []
    p2 = poly.remap(specialize(specialize(P[2], 2, 0), 1, 1), {0: 0}, 1)
    m01 = poly.remap(
        specialize(specialize(MultiPoly.variable(3, 0) * P[1] - P[0], 2, 0), 1, 1), {0: 0}, 1
    )
    roots = _exact_common_roots([poly.univariate_coeffs(p2, 0), poly.univariate_coeffs(m01, 0)])
    if roots is None:
        raise EliminationError("the line x_2 = 0 consists of fixed points")
    for r in roots:
        out.append((complex(r.value), 1.0, 0.0))
    if poly.evaluate_exact(P[1], (1, 0, 0)) == 0 and poly.evaluate_exact(P[2], (1, 0, 0)) == 0:
        out.append((1.0, 0.0, 0.0))
    return out


def solve_fixed_points(
    f: HomogeneousEndo, tol: float = RESIDUAL_TOL, dedup_tol: float = DEDUP_TOL
) -> list[ProjPoint]:
    """All fixed points of ``f`` (geometric points, multiplicities dropped).

    CP^2 is split into the chart ``x_2 = 1``, the affine line ``x_2 = 0, x_1 = 1``
    and the point ``[1:0:0]``.  In the chart both coordinates are projected out
    by resultants; rational roots are back-substituted exactly, the rest are
    paired numerically and Newton-polished.  Every returned point passes the
    residual check at ``tol``.
    """
    if f.arity != 3:
        raise ArityError("solve_fixed_points needs a map of CP^2")
    if all(m.is_zero for m in fixed_point_system(f)):
        raise DegenerateMapError("all fixed-point minors vanish: every point is fixed")
    try:
        raw = _chart_points(f) + _line_points(f)
    except EliminationError:
        nd = check_nondegenerate(f)
        if not nd:
            raise DegenerateMapError(f"components share the zero {nd.witness}", witness=nd.witness) from None
        raise
    pts: list[ProjPoint] = []
    for c in raw:
        p = ProjPoint(c)
        r = fixed_point_residual(f, p)
        if r == math.inf:
            raise DegenerateMapError(f"all components vanish at {p.coords}", witness=p.coords)
        if r > tol:
            # one more polish in the point's own chart before giving up
            p = _polish_projective(f, p)
            r = fixed_point_residual(f, p)
            if r > tol:
                raise SolverError(f"candidate fixed point {p.coords} has residual {r:.3g} > {tol:g}")
        if all(p.distance(q) >= dedup_tol for q in pts):
            pts.append(p)
    pts.sort(key=ProjPoint.sort_key)
    bound = f.degree ** 2 + f.degree + 1
    if len(pts) > bound:
        raise SolverError(f"found {len(pts)} fixed points, more than the bound {bound}")
    return pts


def _polish_projective(f, p: ProjPoint) -> ProjPoint:
    c = p.chart
    cm = chart_representation(f, c)
    u = np.array(p.affine(c))
    for _ in range(8):
        F = cm(u) - u
        J = cm.jacobian(u) - np.eye(2)
        try:
            u = u - np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
    full = list(u)
    full.insert(c, 1.0)
    return ProjPoint(full)


# ---------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------

def _quadratic_roots(tr, det):
    disc = cmath.sqrt(tr * tr - 4 * det)
    # pick the sign that avoids cancellation
    q = (tr + disc) / 2 if abs(tr + disc) >= abs(tr - disc) else (tr - disc) / 2
    if q == 0:
        return 0j, 0j
    return q, det / q


def _eig_key(lam):
    return (round(abs(lam), 12), round(cmath.phase(lam), 12) if abs(lam) > 1e-14 else 0.0)


def eigenvalues_at(
    f: HomogeneousEndo, z, chart: int | None = None, tol: float = RESIDUAL_TOL
) -> tuple[complex, complex]:
    """The two eigenvalues of ``D_z f`` in an affine chart, sorted by (modulus, argument)."""
    z = z if isinstance(z, ProjPoint) else ProjPoint(z)
    r = fixed_point_residual(f, z)
    if r > tol:
        raise NotFixedError(f"point {z.coords} is not fixed (residual {r:.3g})")
    J = chart_jacobian(f, z, chart)
    lam = _quadratic_roots(J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    return tuple(sorted((_clean(complex(l)) for l in lam), key=_eig_key))


def chart_jacobian(f: HomogeneousEndo, z: ProjPoint, chart: int | None = None) -> np.ndarray:
    c = z.chart if chart is None else chart
    if abs(z.coords[c]) < 1e-12:
        raise ValueError(f"point lies outside chart {c}")
    cm = chart_representation(f, c)
    u = z.affine(c)
    den = evaluate(cm.denominator, cm._full(u))
    if abs(den) < 1e-12:
        raise ValueError(f"chart denominator vanishes at the point in chart {c}")
    return cm.jacobian(u)


@dataclass(frozen=True)
class EigenClass:
    tag: str
    modulus: float


def classify_eigenvalue(lam, tol: float = CLASS_TOL, root_probe: int = ROOT_PROBE) -> EigenClass:
    lam = complex(lam)
    r = abs(lam)
    if r <= tol:
        return EigenClass(SUPERATTRACTING, r)
    if r <= 1 - tol:
        return EigenClass(ATTRACTING, r)
    if r >= 1 + tol:
        return EigenClass(REPELLING, r)
    for q in range(1, root_probe + 1):
        if abs(lam ** q - 1) <= tol:
            return EigenClass(PARABOLIC, r)
    return EigenClass(ELLIPTIC, r)


# ---------------------------------------------------------------------
# tangent / transversal split
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class TangentSplit:
    tangent: complex
    transversal: complex
    label: str
    degenerate: bool = False


def _unit_max(q: MultiPoly) -> MultiPoly:
    m = max(abs(c) for c in q.terms.values())
    return q.scale(Fraction(1) / m)


def component_value(q: MultiPoly, z) -> float:
    return abs(evaluate(_unit_max(q), list(z)))


def tangent_split(f: HomogeneousEndo, z, q: CurveComponent, tol: float = CLASS_TOL) -> TangentSplit:
    """Eigenvalue along the tangent line of ``V(q)`` at ``z`` and the transversal one."""
    z = z if isinstance(z, ProjPoint) else ProjPoint(z)
    if component_value(q.poly, z) > tol:
        raise TangentSplitError(f"point {z.coords} is not on component {q.label!r}")
    c = z.chart
    u = z.affine(c)
    qc = _unit_max(specialize(q.poly, c, 1))
    full = list(u)
    full.insert(c, 1.0)
    free = [v for v in range(3) if v != c]
    grad = np.array([evaluate(partial_derivative(qc, v), full) for v in free])
    if np.max(np.abs(grad)) <= tol:
        raise TangentSplitError(f"point {z.coords} is a singular point of {q.label!r}")
    t = np.array([-grad[1], grad[0]])
    t = t / np.linalg.norm(t)
    J = chart_jacobian(f, z, c)
    Jt = J @ t
    mu = np.vdot(t, Jt)  # Rayleigh quotient, |t| = 1
    scale = max(1.0, np.max(np.abs(J)))
    if np.linalg.norm(Jt - mu * t) > tol * scale * 10:
        raise TangentSplitError(
            f"no eigenvector of the Jacobian is tangent to {q.label!r}: the component is not invariant at this point"
        )
    trans = (J[0, 0] + J[1, 1]) - mu
    degenerate = bool(np.max(np.abs(J - mu * np.eye(2))) <= tol * scale)
    return TangentSplit(complex(mu), complex(trans), q.label, degenerate)


# ---------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointReport:
    point: ProjPoint
    residual: float
    eigenvalues: tuple[complex, complex]
    classes: tuple[EigenClass, EigenClass]
    on_pc: bool | None = None
    split: TangentSplit | None = None
    split_classes: tuple[EigenClass, EigenClass] | None = None
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class AuditResult:
    reports: tuple[FixedPointReport, ...]
    verdict: str
    certificate: PcaCertificate | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


def audit_theorem(
    f: HomogeneousEndo,
    components: Sequence[CurveComponent] | None = None,
    tol_class: float = CLASS_TOL,
    tol_residual: float = RESIDUAL_TOL,
    root_probe: int = ROOT_PROBE,
) -> AuditResult:
    """Classify both eigenvalues at every fixed point; PASS iff each is 0 or of modulus > 1.

    With components, a PCA certificate is built first (refusals propagate) and
    regular post-critical fixed points get tangent and transversal sub-audits.
    """
    cert = verify_pca(f, components) if components is not None else None
    reports = []
    notes = []
    for z in solve_fixed_points(f, tol_residual):
        eig = eigenvalues_at(f, z, tol=tol_residual)
        classes = tuple(classify_eigenvalue(l, tol_class, root_probe) for l in eig)
        bad = [f"eigenvalue {_fmt(l)} is {c.tag}" for l, c in zip(eig, classes) if c.tag not in DICHOTOMY_OK]
        on_pc = split = split_classes = None
        if cert is not None:
            through = [c for c in cert.components if component_value(c.poly, z) <= tol_class]
            on_pc = bool(through)
            if len(through) == 1:
                try:
                    split = tangent_split(f, z, through[0], tol_class)
                except TangentSplitError as exc:
                    if "singular point" not in str(exc):
                        bad.append(f"tangent split failed: {exc}")
                if split is not None:
                    split_classes = (
                        classify_eigenvalue(split.tangent, tol_class, root_probe),
                        classify_eigenvalue(split.transversal, tol_class, root_probe),
                    )
                    if split_classes[0].tag != REPELLING:
                        bad.append(f"tangent eigenvalue {_fmt(split.tangent)} is {split_classes[0].tag}, expected Repelling")
                    if split_classes[1].tag not in DICHOTOMY_OK:
                        bad.append(f"transversal eigenvalue {_fmt(split.transversal)} is {split_classes[1].tag}")
        reports.append(FixedPointReport(
            z, fixed_point_residual(f, z), eig, classes, on_pc, split, split_classes, tuple(bad)
        ))
    verdict = "PASS" if all(r.ok for r in reports) else "FAIL-DICHOTOMY"
    if cert is None and verdict != "PASS":
        notes.append("no post-critical components supplied; the map may simply not be PCA")
    return AuditResult(tuple(reports), verdict, cert, tuple(notes))


def _fmt(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"
