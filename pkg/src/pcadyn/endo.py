"""Homogeneous polynomial endomorphisms of CP^1 and CP^2.

A map is stored as its homogeneous lift ``F = (P_0, ..., P_n)``; the lift is
taken as given (no quotient by the scalar ambiguity of lifts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import poly
from .errors import (
    ArityError,
    DegenerateMapError,
    MixedDegreeError,
    NotHomogeneousError,
)
from .poly import MultiPoly, evaluate, partial_derivative, specialize, substitute
from .roots import aberth, rational_univariate_roots

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class HomogeneousEndo:
    components: tuple[MultiPoly, ...]
    degree: int

    @property
    def arity(self) -> int:
        return len(self.components)

    def __call__(self, point):
        return tuple(evaluate(p, point) for p in self.components)

    def evaluate_exact(self, point):
        return tuple(poly.evaluate_exact(p, point) for p in self.components)

    def jacobian(self):
        """Symbolic matrix ``[[dP_i/dx_j]]`` of the lift."""
        n = self.arity
        return [[partial_derivative(p, j) for j in range(n)] for p in self.components]

    def numeric_jacobian(self, point) -> np.ndarray:
        return np.array([[evaluate(e, point) for e in row] for row in self.jacobian()], dtype=complex)


def new_endo(components: Sequence[MultiPoly]) -> HomogeneousEndo:
    """Validate ``components`` as the lift of an endomorphism."""
    comps = tuple(components)
    if not comps:
        raise ArityError("no components")
    n = len(comps)
    if n not in (2, 3):
        raise ArityError(f"only CP^1 and CP^2 are supported (got {n} components)")
    for p in comps:
        if p.arity != n:
            raise ArityError(f"component arity {p.arity} does not match map arity {n}")
    degrees = set()
    for i, p in enumerate(comps):
        h = poly.is_homogeneous(p)
        if h is None:
            raise NotHomogeneousError(f"component {i} is not homogeneous: {p}")
        if h != poly.ZERO_FLAG:
            degrees.add(h)
    if not degrees:
        raise DegenerateMapError("all components are zero")
    if len(degrees) > 1:
        raise MixedDegreeError(f"components have mixed degrees {sorted(degrees)}")
    d = degrees.pop()
    if d < 1:
        raise NotHomogeneousError("components must have positive degree")
    return HomogeneousEndo(comps, d)


def compose(f: HomogeneousEndo, g: HomogeneousEndo) -> HomogeneousEndo:
    """``f o g``."""
    if f.arity != g.arity:
        raise ArityError("arity mismatch")
    return HomogeneousEndo(tuple(substitute(p, g.components) for p in f.components), f.degree * g.degree)


def iterate(f: HomogeneousEndo, j: int) -> HomogeneousEndo:
    if j < 1:
        raise ValueError("iteration count must be positive")
    poly._check_degree(f.degree ** j)
    result = f
    for _ in range(j - 1):
        result = compose(f, result)
    return result


# ---------------------------------------------------------------------
# non-degeneracy
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class NondegeneracyResult:
    nondegenerate: bool
    witness: tuple | None = None
    witness_exact: bool = False
    residual: float = 0.0

    def __bool__(self):
        return self.nondegenerate


def _max_residual(f, point):
    pt = np.array([complex(v) for v in point])
    pt = pt / np.max(np.abs(pt))
    return max(abs(v) for v in f(pt))


def _numeric_degree(p):
    return max((k for k, c in enumerate(p) if c), default=-1)


def _univariate_common_roots(polys, rel_tol):
    """Common roots of numeric univariate polynomials (coefficients low -> high).

    Returns ``None`` when every polynomial vanishes identically.
    """
    nonzero = [p for p in polys if _numeric_degree(p) >= 0]
    if not nonzero:
        return None
    base = min(nonzero, key=_numeric_degree)
    deg = _numeric_degree(base)
    if deg == 0:
        return []
    out = []
    for r in aberth(base[: deg + 1]):
        r = complex(r)
        ok = True
        for p in nonzero:
            scale = sum(abs(c) * max(1.0, abs(r)) ** k for k, c in enumerate(p))
            val = sum(c * r ** k for k, c in enumerate(p))
            if abs(val) > rel_tol * scale:
                ok = False
                break
        if ok:
            out.append(r)
    return out


def check_nondegenerate(f: HomogeneousEndo, tol: float = RESIDUAL_TOL) -> NondegeneracyResult:
    """Decide whether the components have a common projective zero.

    Chart-wise elimination: in the chart ``x_c = 1`` the pairwise resultants
    in the last free variable are combined by gcd into one univariate
    polynomial; each of its roots is back-substituted and confirmed exactly
    (rational case) or with residual ``tol``.
    """
    n = f.arity
    if n not in (2, 3):
        raise ArityError("unsupported arity")
    comps = f.components
    common = poly.gcd_many(comps)
    if not common.is_constant():
        pt, exact = _point_on_curve(common)
        return NondegeneracyResult(False, pt, exact, _max_residual(f, pt))
    for c in reversed(range(n)):
        free = [v for v in range(n) if v != c]
        # points of this chart not seen by charts with larger index
        later = [v for v in range(c + 1, n)]
        local = [specialize(p, c, 1) for p in comps]
        for v in later:
            local = [specialize(p, v, 0) for p in local]
        free = [v for v in free if v not in later]
        w = _chart_common_zero(local, free, n, c, later, tol)
        if w is not None:
            pt, exact = w
            return NondegeneracyResult(False, pt, exact, _max_residual(f, pt))
    return NondegeneracyResult(True)


def _chart_common_zero(local, free, n, chart, zeroed, tol):
    if not free:
        if all(p.is_zero for p in local):
            pt = tuple(Fraction(1) if i == chart else Fraction(0) for i in range(n))
            return pt, True
        return None
    if len(free) == 1:
        (a,) = free
        g = poly.gcd_many(local) if any(not p.is_zero for p in local) else None
        if g is None:
            return _embed(n, chart, {a: Fraction(0)}), True
        if g.is_constant():
            return None
        for r in rational_univariate_roots(poly.univariate_coeffs(g, a)):
            return _embed(n, chart, {a: r.value}), r.exact
        return None
    a, b = free
    nonzero = [p for p in local if not p.is_zero]
    if not nonzero:
        return _embed(n, chart, {}), True
    if len(nonzero) == 1:
        return _affine_curve_point(nonzero[0], a, b, n, chart)
    res = []
    for i in range(len(nonzero)):
        for j in range(i + 1, len(nonzero)):
            r = poly.sylvester_resultant(nonzero[i], nonzero[j], b)
            if not r.is_zero:
                res.append(r)
    if not res:
        return None
    g = poly.gcd_many(res)
    if g.is_constant():
        return None
    for r in rational_univariate_roots(poly.univariate_coeffs(g, a)):
        if r.exact:
            sub = [specialize(p, a, r.value) for p in local]
            h = poly.gcd_many(sub) if any(not p.is_zero for p in sub) else None
            if h is None:
                return _embed(n, chart, {a: r.value, b: Fraction(0)}), True
            if h.is_constant():
                continue
            for rb in rational_univariate_roots(poly.univariate_coeffs(h, b)):
                return _embed(n, chart, {a: r.value, b: rb.value}), rb.exact
        else:
            av = r.as_complex()
            sub = []
            for p in local:
                cs = [0j] * (p.degree_in(b) + 1 if not p.is_zero else 1)
                for m, c in p.terms.items():
                    cs[m[b]] += complex(float(c)) * av ** m[a]
                sub.append(cs)
            roots = _univariate_common_roots(sub, tol)
            if roots is None:
                return _embed(n, chart, {a: av, b: 0j}), False
            if roots:
                return _embed(n, chart, {a: av, b: roots[0]}), False
    return None


def _affine_curve_point(p, a, b, n, chart):
    if p.is_constant():
        return None
    if p.degree_in(b) <= 0:
        r = rational_univariate_roots(poly.univariate_coeffs(p, a))[0]
        return _embed(n, chart, {a: r.value, b: Fraction(0)}), r.exact
    for a0 in range(0, 64):
        sp = specialize(p, a, a0)
        if sp.degree_in(b) > 0:
            r = rational_univariate_roots(poly.univariate_coeffs(sp, b))[0]
            return _embed(n, chart, {a: Fraction(a0), b: r.value}), r.exact
    return None


def _embed(n, chart, values):
    return tuple(Fraction(1) if i == chart else values.get(i, Fraction(0)) for i in range(n))


def _point_on_curve(q: MultiPoly):
    """Some point on the projective hypersurface ``q = 0`` (numeric)."""
    n = q.arity
    # intersect with the line through two fixed generic points
    p0 = [Fraction(k + 2, 3) for k in range(n)]
    p1 = [Fraction((-1) ** k * (k + 1), 5) for k in range(n)]
    line = [MultiPoly.constant(1, a) + MultiPoly.variable(1, 0) * b for a, b in zip(p0, p1)]
    u = substitute(q, line)
    roots = rational_univariate_roots(poly.univariate_coeffs(u, 0))
    if not roots:
        return tuple(p1), True
    r = roots[0]
    if r.exact:
        return tuple(a + r.value * b for a, b in zip(p0, p1)), True
    return tuple(complex(a) + r.as_complex() * complex(b) for a, b in zip(p0, p1)), False


# ---------------------------------------------------------------------
# affine charts
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class ChartMap:
    """Affine representation of ``f`` from chart ``x_chart = 1`` to chart ``x_target = 1``.

    ``numerators[k]`` and ``denominator`` are polynomials in the full arity
    with the chart variable already set to 1.  Affine coordinates are the
    projective coordinates other than the chart one, in index order.
    """

    chart: int
    target: int
    numerators: tuple[MultiPoly, ...]
    denominator: MultiPoly
    arity: int
    _jac: tuple = field(default=(), repr=False, compare=False)

    @property
    def free(self):
        return [v for v in range(self.arity) if v != self.chart]

    def _full(self, u):
        it = iter(u)
        return [1.0 if v == self.chart else complex(next(it)) for v in range(self.arity)]

    def __call__(self, u):
        pt = self._full(u)
        den = evaluate(self.denominator, pt)
        return np.array([evaluate(p, pt) / den for p in self.numerators])

    def jacobian(self, u) -> np.ndarray:
        """Jacobian of the affine map at ``u`` (quotient rule on exact partials)."""
        pt = self._full(u)
        den = evaluate(self.denominator, pt)
        dden = [evaluate(partial_derivative(self.denominator, v), pt) for v in self.free]
        rows = []
        for p in self.numerators:
            num = evaluate(p, pt)
            rows.append([
                (evaluate(partial_derivative(p, v), pt) * den - num * dd) / den ** 2
                for v, dd in zip(self.free, dden)
            ])
        return np.array(rows, dtype=complex)


def chart_representation(f: HomogeneousEndo, chart: int, target: int | None = None) -> ChartMap:
    if not 0 <= chart < f.arity:
        raise ArityError(f"chart {chart} out of range")
    target = chart if target is None else target
    if not 0 <= target < f.arity:
        raise ArityError(f"target chart {target} out of range")
    den = specialize(f.components[target], chart, 1)
    if den.is_zero:
        raise DegenerateMapError(f"denominator vanishes identically in chart {chart}")
    nums = tuple(specialize(f.components[k], chart, 1) for k in range(f.arity) if k != target)
    return ChartMap(chart, target, nums, den, f.arity)


def best_chart(point) -> int:
    """Index of the first coordinate of (near-)maximal modulus."""
    mags = [abs(complex(v)) for v in point]
    top = max(mags)
    for i, m in enumerate(mags):
        if m >= top * (1 - 1e-9):
            return i
    return int(np.argmax(mags))


# ---------------------------------------------------------------------
# radial eigenvalue and potential
# ---------------------------------------------------------------------

def verify_radial_eigenvalue(f: HomogeneousEndo, w, tol: float = RESIDUAL_TOL) -> bool:
    """Check that ``DF(w) w = d w`` at a fixed point ``w`` of the lift."""
    w = np.array([complex(v) for v in w])
    norm = np.linalg.norm(w)
    if norm < 1e-300:
        raise ValueError("w must be nonzero")
    fw = np.array(f(w))
    if np.linalg.norm(fw - w) > tol * norm:
        raise ValueError("w is not a fixed point of the lift")
    jw = f.numeric_jacobian(w) @ w
    return bool(np.linalg.norm(jw - f.degree * w) <= tol * norm)


def euler_identity_holds(f: HomogeneousEndo) -> bool:
    """Exact check of ``sum_i x_i dP/dx_i = d P`` for every component."""
    gens = MultiPoly.gens(f.arity)
    for p in f.components:
        lhs = MultiPoly.zero(f.arity)
        for i, x in enumerate(gens):
            lhs = lhs + x * partial_derivative(p, i)
        if lhs != p.scale(f.degree):
            return False
    return True


@dataclass(frozen=True)
class PotentialEstimate:
    samples: tuple[tuple[int, float], ...]
    extrapolated: float
    converged: bool
    tolerance: float


def potential(f: HomogeneousEndo, w, j_max: int = 40, tol: float = 1e-10) -> PotentialEstimate:
    """Escape-rate (Green) function ``lim d^-j log ||F^j(w)||`` with sup norms.

    Each step divides the iterate by its sup-norm and adds the log of that
    norm, weighted by ``d^-j``, to a running sum, so nothing overflows.
    """
    u = np.array([complex(v) for v in w])
    nrm = np.max(np.abs(u))
    if nrm == 0:
        raise ValueError("potential is undefined at w = 0")
    h = math.log(nrm)
    u = u / nrm
    d = f.degree
    samples = [(0, h)]
    weight = 1.0
    for j in range(1, j_max + 1):
        v = np.array(f(u))
        s = np.max(np.abs(v))
        if s == 0 or not np.isfinite(s):
            raise DegenerateMapError("iterate hit the origin; map is degenerate", witness=tuple(u))
        weight /= d
        h = h + weight * math.log(s)
        u = v / s
        samples.append((j, h))
    converged = len(samples) >= 2 and abs(samples[-1][1] - samples[-2][1]) <= tol
    return PotentialEstimate(tuple(samples), samples[-1][1], converged, tol)
