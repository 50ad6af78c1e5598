"""Local analysis of plane germs at a fixed point.

Newton-Puiseux expansion of curve branches through the origin, the
one-variable map a germ induces on an invariant branch, and checks of the
eigenvalue relations at singular and tangential fixed points.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath

from . import poly
from .errors import BranchError, NotInvariantError, RelationPreconditionError
from .poly import MultiPoly
from .roots import aberth, rational_univariate_roots
from .series import INF, PowerSeries1, evaluate_poly_series, rational_root

__all__ = [
    "PowerSeries1",
    "GermMap2",
    "PuiseuxBranch",
    "TangentType",
    "InducedMap",
    "RelationReport",
    "newton_puiseux",
    "branch_from_parametrization",
    "branch_residual",
    "branch_tangent_type",
    "induced_circle_map",
    "induced_map",
    "verify_cusp_relation",
    "verify_preperiodic_relation",
    "verify_tangent_relation",
]

DEFAULT_ORDER = 16
COMPLEX_TOL = 1e-10
_MP_DPS = 60
_MP_TOL = mpmath.mpf(10) ** -45


# ---------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------

def truncate_degree(p: MultiPoly, n: int) -> MultiPoly:
    return MultiPoly(p.arity, {e: c for e, c in p.terms.items() if sum(e) <= n})


def _mul_trunc(a: dict, b: dict, n: int) -> dict:
    """Product of integer bivariate polynomials, dropping total degree ``> n``.

    Kronecker substitution: both factors are packed into big integers with
    one fixed-width slot per monomial, so the product is a single bigint
    multiplication.
    """
    if not a or not b:
        return {}
    W = 2 * n + 1
    bound = max(abs(c) for c in a.values()) * max(abs(c) for c in b.values()) * min(len(a), len(b))
    B = 8 * ((bound.bit_length() + 9) // 8)  # whole bytes, with a sign bit to spare
    pa = sum(c << (B * (e[0] * W + e[1])) for e, c in a.items() if e[0] + e[1] <= n)
    pb = sum(c << (B * (e[0] * W + e[1])) for e, c in b.items() if e[0] + e[1] <= n)
    slots = 2 * n * W + 2 * n + 1
    half = 1 << (B - 1)
    # biasing every slot by half makes all slots nonnegative, so bytes can be sliced
    bias = half * (((1 << (B * slots)) - 1) // ((1 << B) - 1))
    raw = (pa * pb + bias).to_bytes(B // 8 * slots + 1, "little")
    step = B // 8
    out = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            idx = i * W + j
            v = int.from_bytes(raw[idx * step:(idx + 1) * step], "little") - half
            if v:
                out[(i, j)] = v
    return out


def _substitute_trunc(p: MultiPoly, args: Sequence[MultiPoly], n: int) -> MultiPoly:
    """``p(args)`` keeping only total degree ``<= n`` (args without constant term)."""
    # clear denominators so the inner products run on ints
    base, dens = [], []
    for a in args:
        den = math.lcm(*(Fraction(c).denominator for c in a.terms.values())) if a.terms else 1
        base.append({e: int(c * den) for e, c in a.terms.items()})
        dens.append(den)
    cache = [[{(0, 0): 1}], [{(0, 0): 1}]]

    def power(i, e):
        lst = cache[i]
        while len(lst) <= e:
            lst.append(_mul_trunc(lst[-1], base[i], n))
        return lst[e]

    # group by the power of the first argument: one big product per group
    groups = defaultdict(dict)
    for (i, j), c in p.terms.items():
        if i + j <= n:
            groups[i][j] = Fraction(c) / (dens[0] ** i * dens[1] ** j)
    out = defaultdict(Fraction)
    for i, row in groups.items():
        lcm = math.lcm(*(c.denominator for c in row.values()))
        inner = defaultdict(int)
        for j, c in row.items():
            k = int(c * lcm)
            for e, v in power(1, j).items():
                if e[0] + e[1] + i <= n:
                    inner[e] += k * v
        for e, v in _mul_trunc(power(0, i), inner, n).items():
            out[e] += Fraction(v, lcm)
    return MultiPoly(2, {e: c for e, c in out.items() if c})


@dataclass(frozen=True)
class GermMap2:
    """Polynomial germ ``(C^2, 0) -> (C^2, 0)``, optionally truncated at total degree ``order``.

    Properness (``g^-1(0) = 0``) is the caller's hypothesis and is not checked.
    """

    g1: MultiPoly
    g2: MultiPoly
    order: int | None = None

    def __post_init__(self):
        for p in (self.g1, self.g2):
            if p.arity != 2:
                raise ValueError("germ components must be polynomials in two variables")
            if p.constant_term() != 0:
                raise ValueError("germ must fix the origin (zero constant terms)")

    @classmethod
    def from_strings(cls, s1: str, s2: str, order=None):
        from .polytext import parse_poly
        return cls(parse_poly(s1, ("x", "y")), parse_poly(s2, ("x", "y")), order)

    @classmethod
    def diagonal(cls, a, b):
        x, y = MultiPoly.gens(2)
        return cls(x.scale(Fraction(a)), y.scale(Fraction(b)))

    @property
    def components(self):
        return (self.g1, self.g2)

    @property
    def linear(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        def c(p, e):
            return p.terms.get(e, Fraction(0))
        return ((c(self.g1, (1, 0)), c(self.g1, (0, 1))),
                (c(self.g2, (1, 0)), c(self.g2, (0, 1))))

    def spectrum(self) -> tuple[complex, complex]:
        (a, b), (c, d) = self.linear
        return _eig2(complex(a + d), complex(a * d - b * c))

    def compose(self, other: "GermMap2", order: int) -> "GermMap2":
        """``self o other`` truncated at total degree ``order``."""
        args = other.components
        return GermMap2(_substitute_trunc(self.g1, args, order), _substitute_trunc(self.g2, args, order), order)

    def inverse(self, order: int) -> "GermMap2":
        """Compositional inverse to total degree ``order`` (invertible linear part)."""
        (a, b), (c, d) = self.linear
        det = a * d - b * c
        if det == 0:
            raise ValueError("germ is not invertible: singular linear part")
        ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
        x, y = MultiPoly.gens(2)
        h1 = self.g1 - (x.scale(a) + y.scale(b))
        h2 = self.g2 - (x.scale(c) + y.scale(d))
        z1 = x.scale(ia) + y.scale(ib)
        z2 = x.scale(ic) + y.scale(id_)
        # after step k the inverse is right through degree k + 1
        for k in range(1, order):
            n = min(order, k + 1)
            r1 = x - _substitute_trunc(h1, (z1, z2), n)
            r2 = y - _substitute_trunc(h2, (z1, z2), n)
            z1, z2 = r1.scale(ia) + r2.scale(ib), r1.scale(ic) + r2.scale(id_)
        return GermMap2(z1, z2, order)

    def apply_series(self, X: PowerSeries1, Y: PowerSeries1, order: int):
        return (evaluate_poly_series(self.g1, (X, Y), order),
                evaluate_poly_series(self.g2, (X, Y), order))


def _eig2(tr: complex, det: complex):
    disc = cmath.sqrt(tr * tr - 4 * det)
    q = (tr + disc) / 2 if abs(tr + disc) >= abs(tr - disc) else (tr - disc) / 2
    if q == 0:
        return (0j, 0j)
    pair = (q, det / q)
    return tuple(sorted(pair, key=lambda z: (round(abs(z), 12), round(cmath.phase(z), 12))))


# ---------------------------------------------------------------------
# branches
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class PuiseuxBranch:
    """Branch ``t -> (t^m, y(t))``, or ``(y(t), t^m)`` when ``swapped``.

    ``n`` is the first exponent of ``y`` not divisible by ``m`` and ``alpha``
    its coefficient; both are None when no such exponent occurs up to the
    series' precision.
    """

    m: int
    y_series: PowerSeries1
    exact: bool = True
    swapped: bool = False

    @property
    def order(self) -> int:
        return self.y_series.order

    @property
    def n(self):
        return self._char()[0]

    @property
    def alpha(self):
        return self._char()[1]

    def _char(self):
        tol = 0.0 if self.exact else COMPLEX_TOL * max(1.0, self.y_series.max_abs())
        for k, c in enumerate(self.y_series.coeffs):
            if k % self.m and abs(c) > tol:
                return k, c
        return None, None

    @property
    def is_singular(self) -> bool:
        n = self.n
        return self.m > 1 and n is not None and self.m < n and n % self.m != 0

    @property
    def is_smooth(self) -> bool:
        return self.m == 1

    def lead_index(self) -> int:
        return 1 if self.swapped else 0

    def point_series(self) -> tuple[PowerSeries1, PowerSeries1]:
        lead = PowerSeries1.monomial(self.m, 1)
        return (self.y_series, lead) if self.swapped else (lead, self.y_series)

    def truncate(self, order):
        return PuiseuxBranch(self.m, self.y_series.truncate(order), self.exact, self.swapped)

    def describe(self, var="t") -> str:
        xs = f"{var}^{self.m}" if self.m > 1 else var
        ys = _format_series(self.y_series, var)
        return f"({ys}, {xs})" if self.swapped else f"({xs}, {ys})"


def _format_coeff(c):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    c = complex(c)
    if abs(c.imag) <= 1e-12 * max(1.0, abs(c)):
        return f"{c.real:.12g}"
    return f"({c.real:.12g}{c.imag:+.12g}i)"


def _format_series(s: PowerSeries1, var="t") -> str:
    parts = []
    for k, c in enumerate(s.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        cs = _format_coeff(c)
        if mono and cs == "1":
            body = mono
        elif mono and cs == "-1":
            body = "-" + mono
        else:
            body = cs + ("*" + mono if mono else "")
        parts.append(body)
    text = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    if s.order < INF:
        text += f" + O({var}^{s.order + 1})"
    return text


def branch_from_parametrization(X, Y, order: int = DEFAULT_ORDER, lead: int | None = None) -> PuiseuxBranch:
    """Normal form ``(s^m, ...)`` of an arbitrary parametrization ``(X(t), Y(t))``.

    The lead coordinate is the one of smaller valuation (``x`` on ties) unless
    given.  ``X = t^m U(t)`` is rewritten as ``s^m`` with ``s = t U^(1/m)``.
    """
    X, Y = _as_series(X, order), _as_series(Y, order)
    vx, vy = X._val(), Y._val()
    if vx >= INF and vy >= INF:
        raise BranchError("parametrization is constant to the working order")
    if min(vx, vy) == 0:
        raise BranchError("parametrization does not pass through the origin")
    if lead is None:
        lead = 0 if vx <= vy else 1
    L, O = (X, Y) if lead == 0 else (Y, X)
    m = L._val()
    if m >= INF:
        raise BranchError("lead coordinate vanishes to the working order")
    U = L.shift(-m)
    if U.coeffs == (1,) and U.order >= INF:
        ys = O.truncate(order)
    else:
        U = U.truncate(order - m)
        u0 = U.coeff(0)
        root0 = rational_root(u0, m) if isinstance(u0, Fraction) else None
        if root0 is None:
            root0 = cmath.exp(cmath.log(complex(u0)) / m)
        s_of_t = U.power_real(Fraction(1, m), root0).shift(1)
        t_of_s = s_of_t.reversion()
        ys = O.truncate(order).compose(t_of_s)
    exact = ys.exact
    return PuiseuxBranch(m, ys, exact, swapped=(lead == 1))


def _as_series(s, order):
    if isinstance(s, PowerSeries1):
        return s.truncate(order) if s.order < INF else s
    if isinstance(s, MultiPoly):
        if s.arity != 1:
            raise ValueError("branch components must be univariate in t")
        top = s.degree
        coeffs = [s.terms.get((k,), Fraction(0)) for k in range(max(top, 0) + 1)]
        return PowerSeries1(coeffs, INF)
    if isinstance(s, str):
        from .polytext import parse_poly
        return _as_series(parse_poly(s, ("t",)), order)
    return PowerSeries1(list(s), order)


def branch_residual(q: MultiPoly, b: PuiseuxBranch) -> PowerSeries1:
    """``q(gamma(t))`` to the branch's precision."""
    X, Y = b.point_series()
    n = b.order
    return evaluate_poly_series(q, (X, Y), n)


def _residual_ok(q: MultiPoly, b: PuiseuxBranch, r: PowerSeries1) -> bool:
    if b.exact and r.exact:
        return r.is_zero()
    # rounding in coefficient k is bounded by the same sum taken over absolute values
    X, Y = (PowerSeries1([abs(complex(c)) for c in s.coeffs], s.order) for s in b.point_series())
    qa = MultiPoly(2, {e: abs(c) for e, c in q.terms.items()})
    bound = evaluate_poly_series(qa, (X, Y), r.order)
    return all(abs(r.coeff(k)) <= COMPLEX_TOL * max(1.0, abs(bound.coeff(k))) for k in range(r.order + 1))


# ---------------------------------------------------------------------
# Newton-Puiseux
# ---------------------------------------------------------------------

def _clean(Q: dict, exact: bool) -> dict:
    if exact:
        return {e: c for e, c in Q.items() if c != 0}
    scale = max((abs(c) for c in Q.values()), default=0)
    return {e: c for e, c in Q.items() if abs(c) > _MP_TOL * scale}


def _lower_hull(points):
    """Lower-left convex chain from the point on the ``j`` axis to the one on the ``i`` axis."""
    pts = sorted(set(points))
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    # keep the strictly decreasing-j part
    chain = [hull[0]]
    for p in hull[1:]:
        if p[1] < chain[-1][1]:
            chain.append(p)
        else:
            break
    return chain


def _edge_roots(coeffs, exact):
    """Nonzero roots of the edge polynomial with multiplicities."""
    if exact:
        out = []
        for r in rational_univariate_roots(coeffs):
            if r.value == 0:
                continue
            if r.exact:
                out.append((r.value, r.multiplicity, True))
            else:
                out.append((_polish(coeffs, complex(r.value), r.multiplicity), r.multiplicity, False))
        return out
    roots = list(aberth([complex(c) for c in coeffs]))
    groups = []
    for r in roots:
        for g in groups:
            if abs(g[0] - r) <= 1e-5 * max(1.0, abs(r)):
                g[1].append(r)
                break
        else:
            groups.append([r, [r]])
    return [(_polish(coeffs, sum(g[1]) / len(g[1]), len(g[1])), len(g[1]), False) for g in groups]


def _polish(coeffs, z0, mult):
    """Newton-refine a root in working precision on the (mult-1)-th derivative."""
    cs = [_to_mp(c) for c in coeffs]
    for _ in range(mult - 1):
        cs = [k * c for k, c in enumerate(cs)][1:]
    dcs = [k * c for k, c in enumerate(cs)][1:]
    z = mpmath.mpc(z0)
    for _ in range(200):
        f = mpmath.polyval(cs[::-1], z)
        df = mpmath.polyval(dcs[::-1], z)
        if df == 0:
            break
        step = f / df
        z -= step
        if abs(step) <= _MP_TOL * max(1, abs(z)):
            break
    return z


def _to_mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator)
    return mpmath.mpc(c)


def _to_py(c):
    """Working-precision value back to a plain ``complex`` (exact values pass through)."""
    if isinstance(c, (Fraction, int)):
        return c
    z = complex(c)
    tiny = 1e-30 * max(1.0, abs(z))
    return complex(0.0 if abs(z.real) <= tiny else z.real, 0.0 if abs(z.imag) <= tiny else z.imag)


def _qth_root(xi, q, exact):
    if exact and isinstance(xi, Fraction):
        r = rational_root(xi, q)
        if r is not None:
            return r, True
    r = mpmath.root(_to_mp(xi), q)
    return _snap(r), False


def _snap(z):
    # principal roots of negative reals pick up rounding-level real parts
    tiny = _MP_TOL * abs(z)
    return mpmath.mpc(0 if abs(z.real) <= tiny else z.real, 0 if abs(z.imag) <= tiny else z.imag)


def _substitute_edge(Q: dict, p: int, q: int, c, exact: bool, shift: int) -> dict:
    out = defaultdict(lambda: Fraction(0) if exact else mpmath.mpc(0))
    cpow = [1]
    top = max(j for _, j in Q)
    for _ in range(top):
        cpow.append(cpow[-1] * c)
    for (i, j), a in Q.items():
        base = q * i + p * j - shift
        for k in range(j + 1):
            out[(base, k)] += a * comb(j, k) * cpow[j - k]
    return _clean(dict(out), exact)


def _ift_solve(Q: dict, K: int, exact: bool) -> PowerSeries1:
    """Unique ``y(t)`` with ``y(0) = 0`` and ``Q(t, y(t)) = O(t^(K+1))``."""
    if not exact:
        return PowerSeries1([_to_py(c) for c in _mp_ift_solve(Q, K)], K)
    a = Q[(0, 1)]
    y = PowerSeries1.zero(K)
    for _ in range(K + 1):
        val = _eval_dict(Q, y, K)
        if val.is_zero():
            break
        y = y - val.scale(1 / a)
    return y


def _eval_dict(Q: dict, y: PowerSeries1, K: int) -> PowerSeries1:
    acc = PowerSeries1.zero(K)
    powers = [PowerSeries1([1], INF)]
    for (i, j), c in Q.items():
        if i > K:
            continue
        while len(powers) <= j:
            powers.append((powers[-1] * y).truncate(K))
        acc = acc + powers[j].shift(i).scale(c).truncate(K)
    return acc


# Numeric branches are solved in extended precision: the tail solve divides by
# the other factors of q along the branch, which can amplify rounding by
# |root ratio|^K, far beyond what doubles survive at K = 16.

def _mp_mul(a, b, K):
    out = [mpmath.mpc(0)] * (K + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(min(len(b), K + 1 - i)):
            out[i + j] += x * b[j]
    return out


def _mp_ift_solve(Q: dict, K: int):
    """Newton iteration on coefficient lists, doubling the correct prefix each pass."""
    zero = mpmath.mpc(0)
    top = max(j for _, j in Q)
    y = [zero] * (K + 1)
    n = 1
    while True:
        powers = [[mpmath.mpc(1)] + [zero] * K]
        for _ in range(top):
            powers.append(_mp_mul(powers[-1], y, K))
        val = [zero] * (K + 1)
        der = [zero] * (K + 1)
        for (i, j), c in Q.items():
            for k in range(i, K + 1):
                val[k] += c * powers[j][k - i]
                if j:
                    der[k] += c * j * powers[j - 1][k - i]
        inv = [1 / der[0]]
        for k in range(1, K + 1):
            inv.append(-sum(der[j] * inv[k - j] for j in range(1, k + 1)) / der[0])
        step = _mp_mul(val, inv, K)
        y = [u - v for u, v in zip(y, step)]
        if n > K:
            return y
        n *= 2


@dataclass
class _State:
    Q: dict
    M: int
    E: int
    prefix: dict
    exact: bool


def newton_puiseux(q: MultiPoly, order: int = DEFAULT_ORDER) -> list[PuiseuxBranch]:
    """Branches of ``q = 0`` through the origin, each expanded to ``t^order``.

    A factor ``x`` of ``q`` is reported as the swapped branch ``(0, t)``; every
    other branch comes as ``(t^m, y(t))`` with one representative per
    conjugacy class.  Repeated factors are dropped first.
    """
    if q.arity != 2:
        raise ValueError("newton_puiseux expects a polynomial in x, y")
    if q.is_zero:
        raise BranchError("the zero polynomial has no branches")
    if q.constant_term() != 0:
        raise BranchError("curve does not pass through the origin (q(0,0) != 0)")
    if order < 1:
        raise ValueError("order must be positive")
    q0 = q
    q = poly.squarefree_part(q)
    branches: list[PuiseuxBranch] = []
    x = MultiPoly.variable(2, 0)
    if q.degree_in(1) <= 0 or poly.exact_divide(q, x) is not None:
        if poly.exact_divide(q, x) is not None:
            branches.append(PuiseuxBranch(1, PowerSeries1.zero(order), True, swapped=True))
            q = poly.exact_divide(q, x)
    if q.constant_term() == 0 and not q.is_constant():
        state = _State(dict(q.terms), 1, 0, {}, True)
        with mpmath.workdps(_MP_DPS):
            _expand(state, order, branches)
    for b in branches:
        r = branch_residual(q0, b)
        if not _residual_ok(q0, b, r):
            raise BranchError(f"internal check failed: branch {b.describe()} leaves residual {r}")
    return branches


def _emit(state: _State, tail: PowerSeries1 | None, N: int, out: list):
    coeffs = defaultdict(lambda: Fraction(0))
    for e, c in state.prefix.items():
        if e <= N:
            coeffs[e] += _to_py(c)
    ys = PowerSeries1([coeffs[k] for k in range(N + 1)], N)
    if tail is not None:
        ys = ys + tail.shift(state.E).truncate(N)
    out.append(PuiseuxBranch(state.M, ys, state.exact and ys.exact, False))


def _expand(state: _State, N: int, out: list):
    Q = state.Q
    if not Q:
        return
    K = N - state.E
    a01 = Q.get((0, 1), 0)
    if Q.get((0, 0), 0) == 0 and a01 != 0:
        tail = _ift_solve(Q, K, state.exact) if K >= 1 else None
        _emit(state, tail, N, out)
        return
    jmin = min(j for _, j in Q)
    if jmin > 0:
        _emit(state, None, N, out)
        Q = {(i, j - jmin): c for (i, j), c in Q.items()}
        if Q.get((0, 0), 0) != 0:
            return
    if Q.get((0, 0), 0) != 0:
        return
    if state.E > N:
        raise BranchError(
            f"truncation order {N} is too small to separate branches with prefix "
            f"{_format_series(PowerSeries1([state.prefix.get(k, 0) for k in range(max(state.prefix) + 1)]))}",
            prefix=dict(state.prefix),
        )
    chain = _lower_hull(list(Q))
    for (ia, ja), (ib, jb) in zip(chain, chain[1:]):
        mu = Fraction(ib - ia, ja - jb)
        p, qd = mu.numerator, mu.denominator
        value = qd * ia + p * ja
        edge = {j: c for (i, j), c in Q.items() if qd * i + p * j == value}
        psi = [edge.get(jb + qd * k, 0) for k in range((ja - jb) // qd + 1)]
        for xi, mult, xi_exact in _edge_roots(psi, state.exact):
            c, c_exact = _qth_root(xi, qd, state.exact and xi_exact)
            exact = state.exact and c_exact
            Qw, prefix = Q, state.prefix
            if state.exact and not exact:
                Qw = {e: _to_mp(v) for e, v in Q.items()}
                prefix = {e: _to_mp(v) for e, v in prefix.items()}
            Q1 = _substitute_edge(Qw, p, qd, c, exact, value)
            E1 = state.E * qd + p
            prefix = {e * qd: v for e, v in prefix.items()}
            prefix[E1] = prefix.get(E1, 0) + c
            _expand(_State(Q1, state.M * qd, E1, prefix, exact), N, out)


# ---------------------------------------------------------------------
# tangency
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class TangentType:
    kind: str  # Transversal | Tangential | Indistinguishable
    order: int
    contact: int | None = None

    def __str__(self):
        if self.kind == "Indistinguishable":
            return f"Indistinguishable({self.order})"
        if self.kind == "Tangential" and self.contact is not None:
            return f"Tangential(contact {self.contact})"
        return self.kind


def _direction(b: PuiseuxBranch):
    """Tangent direction as a pair (dx, dy) in original coordinates."""
    X, Y = b.point_series()
    vx, vy = X._val(), Y._val()
    if vx < vy:
        return (Fraction(1), Fraction(0))
    if vy < vx:
        return (Fraction(0), Fraction(1))
    return (X.coeff(vx), Y.coeff(vy))


def _parallel(d1, d2, exact):
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if exact:
        return cross == 0
    n = max(abs(d1[0]), abs(d1[1])) * max(abs(d2[0]), abs(d2[1]))
    return abs(cross) <= 1e-9 * n


def branch_tangent_type(b1: PuiseuxBranch, b2: PuiseuxBranch, order: int | None = None) -> TangentType:
    N = min(b1.order, b2.order) if order is None else min(order, b1.order, b2.order)
    exact = b1.exact and b2.exact
    d1, d2 = _direction(b1), _direction(b2)
    if not _parallel(d1, d2, exact):
        return TangentType("Transversal", N)
    lead = 1 if d1[0] == 0 else 0
    g1 = branch_from_parametrization(*b1.point_series(), order=N, lead=lead)
    g2 = branch_from_parametrization(*b2.point_series(), order=N, lead=lead)
    N = min(N, g1.order, g2.order)
    if g1.m != g2.m:
        return TangentType("Tangential", N, None)
    m = g1.m
    tol = 0.0 if exact else 1e-9
    best = None
    for j in range(m):
        zeta = 1 if j == 0 else cmath.exp(2j * math.pi * j / m)
        diff = None
        for k in range(N + 1):
            a = g1.y_series.coeff(k)
            bk = g2.y_series.coeff(k) * (zeta ** k if j else 1)
            if abs(a - bk) > tol:
                diff = k
                break
        if diff is None:
            return TangentType("Indistinguishable", N)
        best = diff if best is None else max(best, diff)
    contact = Fraction(best, m)
    return TangentType("Tangential", N, int(contact) if contact.denominator == 1 else None)


# ---------------------------------------------------------------------
# induced one-variable map
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class InducedMap:
    series: PowerSeries1
    lam: object
    root_index: int
    consistent_roots: int
    residual: float
    exact: bool


def _swap_germ(g: GermMap2) -> GermMap2:
    sw = {0: 1, 1: 0}
    return GermMap2(poly.remap(g.g2, sw, 2), poly.remap(g.g1, sw, 2), g.order)


def _series_close(a: PowerSeries1, b: PowerSeries1, upto: int, exact: bool):
    d = (a - b).truncate(upto)
    if exact and d.exact:
        return d.is_zero(), 0.0
    r = float(d.max_abs())
    scale = max(1.0, float(a.truncate(upto).max_abs()), float(b.truncate(upto).max_abs()))
    return r <= COMPLEX_TOL * scale, r / scale


def induced_map(g: GermMap2, b: PuiseuxBranch, order: int | None = None) -> InducedMap:
    """``g_hat`` with ``g o gamma = gamma o g_hat``, plus the root choice made."""
    N = b.order if order is None else min(order, b.order)
    if b.swapped:
        g = _swap_germ(g)
    m = b.m
    X = PowerSeries1.monomial(m, 1)
    Y = b.y_series.truncate(N)
    GL, GO = g.apply_series(X, Y, N)
    exact = b.exact
    tol = 0.0 if exact else COMPLEX_TOL * max(1.0, GL.max_abs())
    v = GL.valuation(tol)
    if v >= INF or v > GL.order:
        ok, res = _series_close(GO, PowerSeries1.zero(N), N, exact)
        if ok:
            return InducedMap(PowerSeries1.zero(N), Fraction(0) if exact else 0j, 0, 1, res, exact)
        raise NotInvariantError("branch is not invariant: the germ collapses its lead coordinate but not the other")
    if v % m:
        raise NotInvariantError(
            f"branch is not invariant: lead coordinate of g(gamma) has valuation {v}, not a multiple of m={m}"
        )
    k = v // m
    U = GL.shift(-v)
    u0 = U.coeff(0)
    base = rational_root(u0, m) if exact and isinstance(u0, Fraction) else None
    base_exact = base is not None
    if base is None:
        base = cmath.exp(cmath.log(complex(u0)) / m)
    found = []
    for j in range(m):
        r0 = base if j == 0 else base * cmath.exp(2j * math.pi * j / m)
        if j and base_exact and m == 2:
            r0 = -base  # keep the second square root rational
        ghat = U.power_real(Fraction(1, m), r0).shift(k)
        other = Y.compose(ghat)
        upto = min(N, other.order, GO.order)
        ok, res = _series_close(other, GO, upto, exact and ghat.exact)
        if ok:
            found.append((j, ghat, res))
    if not found:
        raise NotInvariantError("branch is not invariant under the germ (no consistent induced map)")
    j, ghat, res = found[0]
    lam = ghat.coeff(1) if ghat.order >= 1 else 0
    return InducedMap(ghat, lam, j, len(found), res, ghat.exact)


def induced_circle_map(g: GermMap2, b: PuiseuxBranch, order: int | None = None) -> PowerSeries1:
    """The induced one-variable germ ``g_hat(t) = lambda t + ...`` on the branch."""
    return induced_map(g, b, order).series


# ---------------------------------------------------------------------
# eigenvalue relations
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class RelationReport:
    kind: str
    passed: bool
    lam: object
    exponents: tuple[int, int]
    expected: tuple
    eigenvalues: tuple[complex, complex]
    exact: bool
    residual: float
    root_index: int = 0
    consistent_roots: int = 1
    note: str = ""

    def summary(self) -> str:
        def sym(e):
            return "0" if e == 0 else ("λ" if e == 1 else f"λ^{e}")
        ev = ", ".join(_format_coeff(c) for c in self.expected)
        rel = ", ".join(sym(e) for e in self.exponents)
        status = "PASS" if self.passed else "FAIL"
        return f"{self.kind}: eigenvalues {ev} = {rel} (λ={_format_coeff(self.lam)}) {status}"


def _lam_power(lam, e):
    if e == 0:
        return Fraction(0) if isinstance(lam, Fraction) else 0j
    return lam ** e


def _compare_spectrum(g: GermMap2, lam, exps, exact, tol):
    (a, b), (c, d) = g.linear
    tr, det = a + d, a * d - b * c
    e1, e2 = (_lam_power(lam, e) for e in exps)
    if exact and isinstance(lam, Fraction):
        ok = (tr == e1 + e2) and (det == e1 * e2)
        res = 0.0 if ok else float(max(abs(tr - e1 - e2), abs(det - e1 * e2)))
        return ok, res, (e1, e2)
    r = max(abs(complex(tr) - complex(e1 + e2)), abs(complex(det) - complex(e1 * e2)))
    scale = max(1.0, abs(complex(tr)), abs(complex(det)))
    return r <= tol * scale, r / scale, (e1, e2)


def verify_cusp_relation(g: GermMap2, b: PuiseuxBranch, tol: float = 1e-10, order: int | None = None) -> RelationReport:
    """Spectrum of ``D_0 g`` against ``{lambda^m, lambda^n}`` on an invariant singular branch."""
    m, n = b.m, b.n
    if not (m > 1 and n is not None and m < n):
        raise RelationPreconditionError(f"branch {b.describe()} is not singular (need 1 < m < n)")
    if n % m == 0:
        raise RelationPreconditionError(f"m={m} divides n={n}; the relation is not checked in that case")
    N = b.order if order is None else min(order, b.order)
    if N < m + n:
        raise RelationPreconditionError(f"truncation order {N} is below m + n = {m + n}")
    ind = induced_map(g, b, N)
    exact = ind.exact and b.exact
    ok, res, expected = _compare_spectrum(g, ind.lam, (m, n), exact, tol)
    return RelationReport("cusp", ok, ind.lam, (m, n), expected, g.spectrum(), exact, res,
                          ind.root_index, ind.consistent_roots)


def _maps_into(g: GermMap2, src: PuiseuxBranch, dst: PuiseuxBranch, N: int):
    X, Y = src.point_series()
    G = g.apply_series(X.truncate(N) if X.order < INF else X, Y, N)
    exact = src.exact and dst.exact
    zero = PowerSeries1.zero(N)
    if all(_series_close(s, zero, min(N, s.order), exact)[0] for s in G):
        return True
    L = dst.lead_index()
    GL, GO = G[L], G[1 - L]
    sigma = GL
    if sigma._val() == 0:
        return False
    other = dst.y_series.truncate(N).compose(sigma)
    return _series_close(other, GO, min(N, other.order, GO.order), exact)[0]


def verify_preperiodic_relation(g: GermMap2, b_src: PuiseuxBranch, b_dst: PuiseuxBranch,
                                tol: float = 1e-10, order: int | None = None) -> RelationReport:
    """Spectrum ``{0, lambda}`` when ``g`` maps ``b_src`` into the invariant smooth branch ``b_dst``."""
    if not b_dst.is_smooth:
        raise RelationPreconditionError("target branch must be smooth")
    N = min(b_src.order, b_dst.order) if order is None else min(order, b_src.order, b_dst.order)
    if branch_tangent_type(b_src, b_dst, N).kind == "Indistinguishable":
        raise RelationPreconditionError("source and target branches coincide to the working order")
    ind = induced_map(g, b_dst, N)
    if not _maps_into(g, b_src, b_dst, N):
        raise NotInvariantError("the germ does not map the source branch into the target branch")
    exact = ind.exact and b_src.exact
    ok, res, expected = _compare_spectrum(g, ind.lam, (0, 1), exact, tol)
    return RelationReport("preperiodic", ok, ind.lam, (0, 1), expected, g.spectrum(), exact, res,
                          ind.root_index, ind.consistent_roots)


def verify_tangent_relation(g: GermMap2, b1: PuiseuxBranch, b2: PuiseuxBranch,
                            tol: float = 1e-10, order: int | None = None) -> RelationReport:
    """Spectrum ``{lambda, lambda^m}`` for two invariant smooth branches with contact order ``m``."""
    if not (b1.is_smooth and b2.is_smooth):
        raise RelationPreconditionError("both branches must be smooth")
    N = min(b1.order, b2.order) if order is None else min(order, b1.order, b2.order)
    tt = branch_tangent_type(b1, b2, N)
    if tt.kind == "Transversal":
        raise RelationPreconditionError("branches are transversal, not tangential")
    if tt.kind == "Indistinguishable" or tt.contact is None:
        raise RelationPreconditionError(f"contact order undetermined at truncation {N}")
    ind = induced_map(g, b1, N)
    induced_map(g, b2, N)
    m = tt.contact
    exact = ind.exact and b2.exact
    ok, res, expected = _compare_spectrum(g, ind.lam, (1, m), exact, tol)
    return RelationReport("tangent", ok, ind.lam, (1, m), expected, g.spectrum(), exact, res,
                          ind.root_index, ind.consistent_roots)
