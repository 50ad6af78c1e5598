"""Dynamics on invariant rational curves.

An invariant curve with a rational parametrization ``n: CP^1 -> CP^2`` pulls
the ambient map back to a rational map ``[A:B]`` of CP^1 with
``n o [A:B] = f o n``.  On that map critical orbits are followed exactly
(rational points) or numerically, and fixed-point multipliers are classified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import poly
from .endo import HomogeneousEndo
from .errors import DegenerateMapError, LiftError
from .fixed_points import CLASS_TOL, DICHOTOMY_OK, ROOT_PROBE, EigenClass, classify_eigenvalue
from .poly import MultiPoly, partial_derivative, substitute
from .roots import rational_univariate_roots

MAX_PARAM_DEGREE = 3
HEIGHT_CAP_BITS = 4096
CYCLE_TOL = 1e-9


def _binary_degree(p: MultiPoly, what: str) -> int:
    if p.arity != 2:
        raise ValueError(f"{what} must be a binary form in s, t")
    h = poly.is_homogeneous(p)
    if h is None:
        raise ValueError(f"{what} is not homogeneous")
    return -1 if h == poly.ZERO_FLAG else h


@dataclass(frozen=True)
class RationalCurveMap:
    """Parametrization ``[s:t] -> [n_0 : n_1 : n_2]`` by binary forms of degree ``k``."""

    forms: tuple[MultiPoly, MultiPoly, MultiPoly]

    def __post_init__(self):
        if len(self.forms) != 3:
            raise ValueError("a plane curve parametrization has three forms")
        degs = {_binary_degree(p, "parametrization form") for p in self.forms} - {-1}
        if len(degs) != 1:
            raise ValueError("parametrization forms must share one degree")
        if min(degs) < 1:
            raise ValueError("parametrization degree must be at least 1")
        if not poly.gcd_many(self.forms).is_constant():
            raise ValueError("parametrization forms share a common factor")
        nz = [p for p in self.forms if not p.is_zero]
        if all(_proportional(nz[0], p) for p in nz[1:]):
            raise ValueError("parametrization is constant: its image is a point")

    @property
    def degree(self) -> int:
        return max(p.degree for p in self.forms)

    def __call__(self, st):
        return tuple(poly.evaluate(p, st) for p in self.forms)

    def implicit_linear(self):
        """For a line, the linear form vanishing on the image (else None)."""
        if self.degree != 1:
            return None
        rows = [[p.terms.get((1, 0), Fraction(0)), p.terms.get((0, 1), Fraction(0))] for p in self.forms]
        # cross product of the two columns
        (a0, b0), (a1, b1), (a2, b2) = rows
        x = MultiPoly.gens(3)
        return x[0] * (a1 * b2 - a2 * b1) + x[1] * (a2 * b0 - a0 * b2) + x[2] * (a0 * b1 - a1 * b0)


def _proportional(p, q):
    return (p * q.leading_term()[1] - q * p.leading_term()[1]).is_zero if not p.is_zero and not q.is_zero else True


@dataclass(frozen=True)
class RationalMap1D:
    """``[s:t] -> [A(s,t) : B(s,t)]``."""

    A: MultiPoly
    B: MultiPoly

    def __post_init__(self):
        da, db = _binary_degree(self.A, "numerator"), _binary_degree(self.B, "denominator")
        if self.A.is_zero and self.B.is_zero:
            raise DegenerateMapError("both forms vanish")
        d = max(da, db)
        if (not self.A.is_zero and da != d) or (not self.B.is_zero and db != d):
            raise ValueError("numerator and denominator must have the same degree")
        if d < 1:
            raise ValueError("a rational map needs degree at least 1")
        if not poly.gcd(self.A, self.B).is_constant():
            raise DegenerateMapError("numerator and denominator share a factor")

    @property
    def degree(self) -> int:
        return max(self.A.degree, self.B.degree)

    def __str__(self):
        from .polytext import format_poly
        v = ("s", "t")
        return f"[{format_poly(self.A, v)} : {format_poly(self.B, v)}]"

    def apply_exact(self, pt):
        s, t = pt
        return _normalize_exact((poly.evaluate_exact(self.A, (s, t)), poly.evaluate_exact(self.B, (s, t))))

    def apply(self, pt):
        s, t = pt
        return (poly.evaluate(self.A, (s, t)), poly.evaluate(self.B, (s, t)))

    def wronskian(self) -> MultiPoly:
        A, B = self.A, self.B
        return partial_derivative(A, 0) * partial_derivative(B, 1) - partial_derivative(A, 1) * partial_derivative(B, 0)


def _normalize_exact(pt):
    s, t = pt
    if t != 0:
        return (Fraction(s) / t, Fraction(1))
    if s == 0:
        raise DegenerateMapError("map sends a point to [0:0]")
    return (Fraction(1), Fraction(0))


# ---------------------------------------------------------------------
# lifting
# ---------------------------------------------------------------------

def lift_over_normalization(f: HomogeneousEndo, n: RationalCurveMap) -> RationalMap1D:
    """The map ``[A:B]`` with ``n o [A:B] = f o n`` as exact polynomial identities.

    For a point ``[s:t]`` the parameter ``a = A/B`` of its image satisfies
    ``n_i(a,1) R_j(s,t) = n_j(a,1) R_i(s,t)`` with ``R = f o n``.  The gcd of
    these equations over ``Q[s,t,a]`` is ``B a - A`` when the curve is
    invariant and ``n`` is birational onto it.
    """
    if f.arity != 3:
        raise LiftError("lifting needs a map of CP^2")
    k = n.degree
    if k > MAX_PARAM_DEGREE:
        raise LiftError(f"parametrization degree {k} is above the supported maximum {MAX_PARAM_DEGREE}")
    R = [substitute(p, n.forms) for p in f.components]
    if all(r.is_zero for r in R):
        raise LiftError("the map collapses the curve")
    g = poly.gcd_many([r for r in R if not r.is_zero])
    if not g.is_constant():
        R = [poly.exact_divide(r, g) if not r.is_zero else r for r in R]
    Rs = [poly.remap(r, {0: 0, 1: 1}, 3) for r in R]
    Na = [poly.remap(poly.specialize(p, 1, 1), {0: 2}, 3) for p in n.forms]
    eqs = []
    for i in range(3):
        for j in range(i + 1, 3):
            e = Na[i] * Rs[j] - Na[j] * Rs[i]
            if not e.is_zero:
                eqs.append(e)
    if not eqs:
        raise LiftError("lift equations vanish identically")
    G = poly.gcd_many(eqs)
    # strip the part of the gcd free of a
    G = poly.exact_divide(G, poly.content(G, 2)) if G.degree_in(2) > 0 else G
    da = G.degree_in(2)
    if da <= 0:
        raise LiftError("curve is not invariant under the map (no consistent lift)")
    if da > 1:
        raise LiftError(f"lift equations have degree {da} in the parameter: the parametrization is not birational")
    cf = G.coeffs_in(2)
    c1 = poly.remap(cf.get(1, MultiPoly.zero(3)), {0: 0, 1: 1}, 2)
    c0 = poly.remap(cf.get(0, MultiPoly.zero(3)), {0: 0, 1: 1}, 2)
    A, B = -c0, c1
    h = poly.gcd(A, B) if not (A.is_zero or B.is_zero) else None
    if h is not None and not h.is_constant():
        A, B = poly.exact_divide(A, h), poly.exact_divide(B, h)
    try:
        lift = RationalMap1D(A, B)
    except (ValueError, DegenerateMapError) as exc:
        raise LiftError(f"gcd extraction failed: {exc}") from exc
    if lift_scalar(f, n, lift) is None:
        raise LiftError("lift candidate fails the exact identity check")
    return lift


def lift_scalar(f: HomogeneousEndo, n: RationalCurveMap, g: RationalMap1D):
    """``c`` with ``n_i(A,B) = c (f o n)_i`` for all ``i``, or None if no constant works."""
    lhs = [substitute(p, (g.A, g.B)) for p in n.forms]
    rhs = [substitute(p, n.forms) for p in f.components]
    c = None
    for l, r in zip(lhs, rhs):
        if r.is_zero:
            if not l.is_zero:
                return None
            continue
        q = poly.exact_divide(l, r)
        if q is None:
            # common factors of f o n were stripped: compare as a ratio
            return _ratio_scalar(lhs, rhs)
        if not q.is_constant():
            return _ratio_scalar(lhs, rhs)
        cq = q.constant_term()
        if c is None:
            c = cq
        elif c != cq:
            return None
    return c


def _ratio_scalar(lhs, rhs):
    """Common ratio ``lhs_i / rhs_i`` as a rational function, checked by cross-multiplication."""
    for i in range(3):
        for j in range(i + 1, 3):
            if not (lhs[i] * rhs[j] - lhs[j] * rhs[i]).is_zero:
                return None
    i = next(k for k in range(3) if not rhs[k].is_zero)
    g = poly.gcd(lhs[i], rhs[i])
    num, den = poly.exact_divide(lhs[i], g), poly.exact_divide(rhs[i], g)
    return (num, den)


# ---------------------------------------------------------------------
# critical points and orbits
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class CP1Point:
    """``[u:1]`` for finite ``u`` or ``[1:0]`` when ``u`` is None."""

    u: object
    multiplicity: int = 1
    exact: bool = True

    @property
    def is_infinity(self):
        return self.u is None

    def homogeneous(self):
        if self.u is None:
            return (Fraction(1), Fraction(0)) if self.exact else (1 + 0j, 0j)
        return (self.u, Fraction(1)) if self.exact else (complex(self.u), 1 + 0j)

    def __str__(self):
        if self.u is None:
            return "inf"
        if isinstance(self.u, Fraction):
            return str(self.u.numerator) if self.u.denominator == 1 else f"{self.u.numerator}/{self.u.denominator}"
        z = complex(self.u)
        return f"{z.real:.12g}" if abs(z.imag) < 1e-12 * max(1, abs(z)) else f"{z.real:.12g}{z.imag:+.12g}i"


def _binary_roots(F: MultiPoly) -> list[CP1Point]:
    """Roots of a binary form with multiplicity; ``t``-power gives infinity."""
    e = 0
    G = F
    t = MultiPoly.variable(2, 1)
    while True:
        q = poly.exact_divide(G, t)
        if q is None or G.is_zero:
            break
        G, e = q, e + 1
    out = []
    if e:
        out.append(CP1Point(None, e, True))
    coeffs = poly.univariate_coeffs(poly.specialize(G, 1, 1), 0)
    for r in rational_univariate_roots(coeffs):
        out.append(CP1Point(r.value if r.exact else complex(r.value), r.multiplicity, r.exact))
    return out


def critical_points_1d(g: RationalMap1D) -> list[CP1Point]:
    """Roots of the Wronskian ``A_s B_t - A_t B_s`` (degree ``2d' - 2``), with multiplicity."""
    W = g.wronskian()
    if W.is_zero:
        raise DegenerateMapError("Wronskian vanishes identically")
    return _binary_roots(W)


@dataclass(frozen=True)
class Degree1D:
    degree: int
    audit: str | None


def degree_1d(g: RationalMap1D, as_lift: bool = False) -> Degree1D:
    """Degree ``d'``; as a lift of a PCA map of degree >= 2 anything below 2 is flagged."""
    d = g.degree
    audit = None
    if as_lift:
        audit = "PASS" if d >= 2 else "FAIL"
    return Degree1D(d, audit)


@dataclass(frozen=True)
class Finite:
    tail: int
    period: int


@dataclass(frozen=True)
class Undecided:
    max_iter: int
    reason: str = ""


@dataclass(frozen=True)
class PcfVerdict:
    critical_points: tuple[CP1Point, ...]
    orbits: tuple[Finite | Undecided, ...]
    verdict: str  # PCF | Undecided


def _chordal(p, q):
    (a, b), (c, d) = p, q
    num = abs(a * d - b * c)
    den = (abs(a) ** 2 + abs(b) ** 2) ** 0.5 * (abs(c) ** 2 + abs(d) ** 2) ** 0.5
    return num / den


def _unit(pt):
    a, b = pt
    n = max(abs(a), abs(b))
    return (a / n, b / n)


def _height(pt):
    return max(max(abs(c.numerator).bit_length(), c.denominator.bit_length()) for c in pt)


def _orbit_exact(g: RationalMap1D, start, max_iter):
    seen = {start: 0}
    pt = start
    for k in range(1, max_iter + 1):
        pt = g.apply_exact(pt)
        if pt in seen:
            return Finite(seen[pt], k - seen[pt])
        if _height(pt) > HEIGHT_CAP_BITS:
            return Undecided(max_iter, f"height of the orbit exceeds {HEIGHT_CAP_BITS} bits after {k} steps")
        seen[pt] = k
    return Undecided(max_iter, "no repetition within max_iter")


def _orbit_numeric(g: RationalMap1D, start, max_iter, tol):
    hist = [_unit(start)]
    pt = hist[0]
    for k in range(1, max_iter + 1):
        pt = _unit(g.apply(pt))
        hist.append(pt)
        for i in range(k):
            if _chordal(pt, hist[i]) < tol:
                p = k - i
                # re-entry must hold for one more full period
                q = pt
                ok = True
                extra = [q]
                for _ in range(p):
                    q = _unit(g.apply(q))
                    extra.append(q)
                for j in range(1, p + 1):
                    if _chordal(extra[j], hist[i + j] if i + j <= k else extra[j - p]) >= tol:
                        ok = False
                        break
                if not ok:
                    continue
                return Finite(i, p)
    return Undecided(max_iter, "no numeric re-entry within max_iter")


def _image_form(g: RationalMap1D, P: MultiPoly) -> MultiPoly:
    """Squarefree binary form whose roots are the images of the roots of ``P``."""
    t = MultiPoly.variable(2, 1)
    e, rest = 0, P
    while True:
        q = poly.exact_divide(rest, t)
        if q is None:
            break
        rest, e = q, e + 1
    out = MultiPoly.constant(2, 1)
    if e:
        a, b = poly.evaluate_exact(g.A, (1, 0)), poly.evaluate_exact(g.B, (1, 0))
        s_, t_ = MultiPoly.gens(2)
        out = out * (s_ * b - t_ * a)
    if rest.degree > 0:
        # roots [u:1] of rest go to [v:w] with v B(u,1) - w A(u,1) = 0
        u = poly.remap(poly.specialize(rest, 1, 1), {0: 0}, 3)
        Au = poly.remap(poly.specialize(g.A, 1, 1), {0: 0}, 3)
        Bu = poly.remap(poly.specialize(g.B, 1, 1), {0: 0}, 3)
        v, w = MultiPoly.variable(3, 1), MultiPoly.variable(3, 2)
        r = poly.sylvester_resultant(u, v * Bu - w * Au, 0)
        out = out * poly.remap(r, {1: 0, 2: 1}, 2)
    return poly.squarefree_part(out)


def _irrational_part(W: MultiPoly) -> MultiPoly:
    """Squarefree part of ``W`` with its rational linear factors removed."""
    P = poly.squarefree_part(W)
    s_, t_ = MultiPoly.gens(2)
    for r in _binary_roots(P):
        if r.exact:
            lin = t_ if r.is_infinity else s_ - t_ * r.u
            P = poly.exact_divide(P, lin)
    return P


def _factor_orbit_finite(g: RationalMap1D, P: MultiPoly, max_iter: int):
    """Exact test that every root of ``P`` has a finite orbit.

    Roots of ``P`` are followed as a set through the forms of their images;
    the set sequence repeats exactly when all orbits are finite.
    """
    seen = {poly.normalize(P): 0}
    cur = poly.normalize(P)
    for k in range(1, max_iter + 1):
        cur = poly.normalize(_image_form(g, cur))
        if cur in seen:
            return True, ""
        if any(c.numerator.bit_length() > HEIGHT_CAP_BITS for c in cur.terms.values()):
            return False, f"height of the image forms exceeds {HEIGHT_CAP_BITS} bits after {k} steps"
        seen[cur] = k
    return False, "image forms do not repeat within max_iter"


def postcritical_orbit_1d(g: RationalMap1D, max_iter: int = 64, tol: float = CYCLE_TOL) -> PcfVerdict:
    """Follow every critical orbit; PCF when all are finite, otherwise Undecided (never "not PCF")."""
    crit = critical_points_1d(g)
    orbits = []
    checked = {}
    W = g.wronskian()
    for c in crit:
        if c.exact:
            orbits.append(_orbit_exact(g, c.homogeneous(), max_iter))
            continue
        # the irrational roots of W, as one exact set
        if not checked:
            checked["irr"] = _factor_orbit_finite(g, _irrational_part(W), max_iter)
        finite, why = checked["irr"]
        if not finite:
            orbits.append(Undecided(max_iter, why))
            continue
        o = _orbit_numeric(g, c.homogeneous(), max_iter, tol)
        orbits.append(o)
    verdict = "PCF" if all(isinstance(o, Finite) for o in orbits) else "Undecided"
    return PcfVerdict(tuple(crit), tuple(orbits), verdict)


# ---------------------------------------------------------------------
# fixed points and the dichotomy
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint1D:
    point: CP1Point
    multiplier: object
    eigen_class: EigenClass


@dataclass(frozen=True)
class Audit1D:
    fixed_points: tuple[FixedPoint1D, ...]
    verdict: str
    pcf: PcfVerdict
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self):
        return self.verdict == "PASS"


def fixed_points_1d(g: RationalMap1D) -> list[CP1Point]:
    """Roots of ``s B - t A`` (degree ``d' + 1``)."""
    s, t = MultiPoly.gens(2)
    F = s * g.B - t * g.A
    if F.is_zero:
        raise DegenerateMapError("every point is fixed")
    return _binary_roots(F)


def multiplier_1d(g: RationalMap1D, p: CP1Point):
    """Derivative at a fixed point in the affine chart containing it (exact when rational)."""
    if p.is_infinity:
        # w = t/s: w -> B(1,w)/A(1,w)
        num, den, var = poly.specialize(g.B, 0, 1), poly.specialize(g.A, 0, 1), 1
        at = Fraction(0) if p.exact else 0j
    else:
        num, den, var = poly.specialize(g.A, 1, 1), poly.specialize(g.B, 1, 1), 0
        at = p.u
    pt = [at, at]
    if p.exact:
        N, D = poly.evaluate_exact(num, pt), poly.evaluate_exact(den, pt)
        dN = poly.evaluate_exact(partial_derivative(num, var), pt)
        dD = poly.evaluate_exact(partial_derivative(den, var), pt)
    else:
        N, D = poly.evaluate(num, pt), poly.evaluate(den, pt)
        dN = poly.evaluate(partial_derivative(num, var), pt)
        dD = poly.evaluate(partial_derivative(den, var), pt)
    if D == 0:
        raise DegenerateMapError("fixed point maps to the other chart")
    return (dN * D - N * dD) / (D * D)


def audit_1d_dichotomy(g: RationalMap1D, tol: float = CLASS_TOL, root_probe: int = ROOT_PROBE,
                       max_iter: int = 64) -> Audit1D:
    """Classify every fixed-point multiplier; PASS iff each is 0 or of modulus > 1.

    The audit runs even when the PCF check is Undecided; a note records that
    the dichotomy is then not predicted.
    """
    pcf = postcritical_orbit_1d(g, max_iter)
    pts = []
    for p in fixed_points_1d(g):
        lam = multiplier_1d(g, p)
        pts.append(FixedPoint1D(p, lam, classify_eigenvalue(complex(lam), tol, root_probe)))
    ok = all(fp.eigen_class.tag in DICHOTOMY_OK for fp in pts)
    notes = []
    if pcf.verdict != "PCF":
        notes.append("critical orbits are not certified finite; the map may not be PCF, so the dichotomy is not predicted")
    return Audit1D(tuple(pts), "PASS" if ok else "FAIL-DICHOTOMY", pcf, tuple(notes))


def functoriality_defect(f: HomogeneousEndo, n: RationalCurveMap, g: RationalMap1D, tau) -> float:
    """Chordal distance between ``n(g(tau))`` and ``f(n(tau))`` in CP^2."""
    import numpy as np
    a = np.array(n(g.apply(tau)), dtype=complex)
    b = np.array(f(n(tau)), dtype=complex)
    # |a ^ b| / (|a| |b|): the sine of the angle, without the cancellation in 1 - cos^2
    wedge = np.outer(a, b) - np.outer(b, a)
    return float(np.linalg.norm(wedge) / (np.sqrt(2) * np.linalg.norm(a) * np.linalg.norm(b)))
