"""Exact multivariate polynomials over the rationals.

A :class:`MultiPoly` is an immutable map from exponent tuples to
:class:`fractions.Fraction` coefficients.  Zero coefficients are never
stored, so structural equality is polynomial equality.  The canonical term
order is graded lexicographic with ``x0 > x1 > ...``.

Besides ring arithmetic the module provides the elimination toolkit used by
the rest of the package: substitution, partial derivatives, Jacobian
determinants, exact division, Sylvester resultants and gcds computed with
subresultant remainder sequences, and squarefree parts.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import ArityError, DegreeCapExceeded, PcaError, ZeroDivisorError

__all__ = [
    "MultiPoly",
    "DegreeCaps",
    "degree_caps",
    "ZERO_FLAG",
    "add",
    "mul",
    "pow_",
    "substitute",
    "partial_derivative",
    "jacobian_det",
    "is_homogeneous",
    "exact_divide",
    "sylvester_resultant",
    "gcd",
    "content",
    "normalize",
    "squarefree_part",
    "evaluate",
    "evaluate_exact",
    "specialize",
    "remap",
]


@dataclass(frozen=True)
class DegreeCaps:
    max_degree: int = 64
    max_terms: int = 200_000


_CAPS: contextvars.ContextVar[DegreeCaps] = contextvars.ContextVar(
    "pcadyn_degree_caps", default=DegreeCaps()
)


@contextlib.contextmanager
def degree_caps(max_degree=None, max_terms=None):
    """Temporarily change the degree and term-count caps.

    >>> with degree_caps(max_degree=8):
    ...     pass
    """
    cur = _CAPS.get()
    new = DegreeCaps(
        cur.max_degree if max_degree is None else max_degree,
        cur.max_terms if max_terms is None else max_terms,
    )
    token = _CAPS.set(new)
    try:
        yield new
    finally:
        _CAPS.reset(token)


def _check_degree(deg):
    cap = _CAPS.get().max_degree
    if deg > cap:
        raise DegreeCapExceeded(f"total degree {deg} exceeds cap {cap}")


def _elimination_caps(p: "MultiPoly", q: "MultiPoly"):
    # subresultant coefficients reach degree about deg p * deg q even when
    # inputs and result are small, so the guard is widened to that bound
    need = 2 * p.degree * q.degree + p.degree + q.degree
    return degree_caps(max_degree=max(_CAPS.get().max_degree, need))


def _check_terms(n):
    cap = _CAPS.get().max_terms
    if n > cap:
        raise DegreeCapExceeded(f"term count {n} exceeds cap {cap}")


def _grlex_key(mono):
    return (sum(mono), mono)


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not rational")


class MultiPoly:
    """Polynomial in ``arity`` variables with rational coefficients."""

    __slots__ = ("arity", "_terms", "_hash", "_numeric")

    def __init__(self, arity: int, terms: Mapping[tuple, object] | None = None):
        if arity < 0:
            raise ArityError("arity must be non-negative")
        clean = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != arity:
                    raise ArityError(f"monomial {mono} does not have arity {arity}")
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in {mono}")
                c = _as_fraction(c)
                if c:
                    clean[mono] = clean.get(mono, 0) + c
                    if not clean[mono]:
                        del clean[mono]
        self.arity = arity
        self._terms = clean
        self._hash = None
        self._numeric = None

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, arity, terms):
        obj = cls.__new__(cls)
        obj.arity = arity
        obj._terms = terms
        obj._hash = None
        obj._numeric = None
        return obj

    @classmethod
    def zero(cls, arity):
        return cls._raw(arity, {})

    @classmethod
    def constant(cls, arity, c):
        c = _as_fraction(c)
        return cls._raw(arity, {(0,) * arity: c} if c else {})

    @classmethod
    def variable(cls, arity, i):
        if not 0 <= i < arity:
            raise ArityError(f"variable index {i} out of range for arity {arity}")
        mono = tuple(1 if k == i else 0 for k in range(arity))
        return cls._raw(arity, {mono: Fraction(1)})

    @classmethod
    def monomial(cls, exps, c=1):
        exps = tuple(exps)
        c = _as_fraction(c)
        return cls._raw(len(exps), {exps: c} if c else {})

    @classmethod
    def gens(cls, arity):
        return tuple(cls.variable(arity, i) for i in range(arity))

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return not self._terms or (len(self._terms) == 1 and (0,) * self.arity in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self.arity, Fraction(0))

    @property
    def degree(self):
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def degree_in(self, var):
        if not self._terms:
            return -1
        return max(m[var] for m in self._terms)

    def variables(self):
        """Indices of variables that actually occur."""
        used = set()
        for m in self._terms:
            used.update(i for i, e in enumerate(m) if e)
        return sorted(used)

    def sorted_terms(self):
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading_term(self):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        mono = max(self._terms, key=_grlex_key)
        return mono, self._terms[mono]

    def coeffs_in(self, var) -> dict[int, "MultiPoly"]:
        """Split into ``{k: c_k}`` with ``self = sum c_k * x_var^k``.

        The coefficient polynomials keep the full arity (``x_var`` absent).
        """
        out: dict[int, dict] = {}
        for m, c in self._terms.items():
            k = m[var]
            mm = m[:var] + (0,) + m[var + 1:]
            out.setdefault(k, {})[mm] = c
        return {k: MultiPoly._raw(self.arity, t) for k, t in out.items()}

    def lead_coeff_in(self, var):
        cs = self.coeffs_in(var)
        return cs[max(cs)]

    def is_integral(self):
        return all(c.denominator == 1 for c in self._terms.values())

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.arity != self.arity:
                raise ArityError(f"arity mismatch: {self.arity} vs {other.arity}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.arity, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._terms)
        for m, c in other._terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return MultiPoly._raw(self.arity, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c):
        c = _as_fraction(c)
        if not c:
            return MultiPoly.zero(self.arity)
        return MultiPoly._raw(self.arity, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return MultiPoly.zero(self.arity)
        _check_degree(self.degree + other.degree)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        get = t.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                t[m] = get(m, 0) + ca * cb
        t = {m: c for m, c in t.items() if c}
        _check_terms(len(t))
        return MultiPoly._raw(self.arity, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        if k == 0:
            return MultiPoly.constant(self.arity, 1)
        if self._terms:
            _check_degree(self.degree * k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.arity, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self.arity}, {dict(self.sorted_terms())!r})"

    def __str__(self):
        from .polytext import format_poly

        return format_poly(self)

    # -- numeric evaluation cache --------------------------------------
    def _numeric_terms(self):
        if self._numeric is None:
            self._numeric = [(complex(float(c)), m) for m, c in self._terms.items()]
        return self._numeric


# ---------------------------------------------------------------------
# spec-level function API
# ---------------------------------------------------------------------

def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def pow_(p: MultiPoly, k: int) -> MultiPoly:
    return p ** k


def substitute(q: MultiPoly, f: Sequence[MultiPoly]) -> MultiPoly:
    """Compose: return ``q(f_0, ..., f_{m-1})``."""
    if len(f) != q.arity:
        raise ArityError(f"need {q.arity} substitutes, got {len(f)}")
    if not f:
        return q
    k = f[0].arity
    if any(fi.arity != k for fi in f):
        raise ArityError("substituted polynomials must share an arity")
    if q.is_zero:
        return MultiPoly.zero(k)
    maxdeg = max((fi.degree for fi in f), default=0)
    _check_degree(max(q.degree, 0) * max(maxdeg, 0))
    powers: list[list[MultiPoly]] = [[MultiPoly.constant(k, 1)] for _ in f]

    def power(i, e):
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * f[i])
        return cache[e]

    acc: dict = {}
    for mono, c in q.sorted_terms()[::-1]:
        term = MultiPoly.constant(k, c)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        for m, v in term._terms.items():
            s = acc.get(m, 0) + v
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
    return MultiPoly._raw(k, acc)


def partial_derivative(p: MultiPoly, var: int) -> MultiPoly:
    if not 0 <= var < p.arity:
        raise ArityError(f"variable {var} out of range for arity {p.arity}")
    t = {}
    for m, c in p._terms.items():
        e = m[var]
        if e:
            t[m[:var] + (e - 1,) + m[var + 1:]] = c * e
    return MultiPoly._raw(p.arity, t)


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for j in range(n):
        if rows[0][j].is_zero:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else MultiPoly.zero(rows[0][0].arity)


def jacobian_det(f: Sequence[MultiPoly]) -> MultiPoly:
    """Determinant of the matrix of partials ``d f_i / d x_j``."""
    n = len(f)
    if n == 0 or any(fi.arity != n for fi in f):
        raise ArityError("jacobian_det needs n polynomials in n variables")
    rows = [[partial_derivative(fi, j) for j in range(n)] for fi in f]
    return _det(rows)


ZERO_FLAG = "zero"


def is_homogeneous(p: MultiPoly):
    """Common total degree of all monomials, ``None`` if mixed.

    The zero polynomial is homogeneous of every degree and yields
    :data:`ZERO_FLAG`.
    """
    if p.is_zero:
        return ZERO_FLAG
    degs = {sum(m) for m in p._terms}
    return degs.pop() if len(degs) == 1 else None


def exact_divide(p: MultiPoly, d: MultiPoly) -> MultiPoly | None:
    """Return ``q`` with ``d * q == p``, or ``None`` when no such ``q`` exists."""
    if d.is_zero:
        raise ZeroDivisorError("division by the zero polynomial")
    if p.arity != d.arity:
        raise ArityError("arity mismatch")
    if p.is_zero:
        return MultiPoly.zero(p.arity)
    if d.is_constant():
        return p.scale(1 / d.constant_term())
    if p.degree < d.degree:
        return None
    for v in range(p.arity):
        if p.degree_in(v) < d.degree_in(v):
            return None
    dm, dc = d.leading_term()
    d_rest = [(m, c) for m, c in d._terms.items() if m != dm]
    r = dict(p._terms)
    q = {}
    while r:
        rm = max(r, key=_grlex_key)
        rc = r.pop(rm)
        qm = tuple(a - b for a, b in zip(rm, dm))
        if any(e < 0 for e in qm):
            return None
        qc = rc / dc
        q[qm] = qc
        for m, c in d_rest:
            mm = tuple(a + b for a, b in zip(m, qm))
            s = r.get(mm, 0) - qc * c
            if s:
                r[mm] = s
            else:
                r.pop(mm, None)
    return MultiPoly._raw(p.arity, q)


def _exact(p, d):
    q = exact_divide(p, d)
    if q is None:
        raise PcaError("internal error: expected exact division")
    return q


def _var_power(arity, var, k):
    return MultiPoly.monomial(tuple(k if i == var else 0 for i in range(arity)))


def _prem(a: MultiPoly, b: MultiPoly, var: int) -> MultiPoly:
    """Pseudo-remainder of ``a`` by ``b`` as polynomials in ``x_var``."""
    db = b.degree_in(var)
    lb = b.lead_coeff_in(var)
    e = a.degree_in(var) - db + 1
    r = a
    while not r.is_zero and r.degree_in(var) >= db:
        dr = r.degree_in(var)
        lr = r.lead_coeff_in(var)
        r = r * lb - lr * _var_power(a.arity, var, dr - db) * b
        e -= 1
    if e > 0:
        r = r * lb ** e
    return r


def sylvester_resultant(p: MultiPoly, q: MultiPoly, var: int) -> MultiPoly:
    """Resultant of ``p`` and ``q`` with respect to ``x_var``.

    Sign convention: the determinant of the Sylvester matrix with the
    coefficients of ``p`` in the top rows, i.e. ``lc(p)^deg q * prod q(roots p)``.
    Computed with the subresultant algorithm; if one input is constant in
    ``x_var`` the result is that constant raised to the other's degree.
    """
    if p.arity != q.arity:
        raise ArityError("arity mismatch")
    if not 0 <= var < p.arity:
        raise ArityError(f"variable {var} out of range")
    if p.is_zero and q.is_zero:
        raise ZeroDivisorError("resultant of two zero polynomials")
    if p.is_zero or q.is_zero:
        return MultiPoly.zero(p.arity)
    m, n = p.degree_in(var), q.degree_in(var)
    if m == 0:
        return p ** n
    if n == 0:
        return q ** m
    with _elimination_caps(p, q):
        return _resultant(p, q, var, m, n)


def _resultant(p, q, var, m, n):
    A, B = p, q
    s = 1
    if m < n:
        A, B = q, p
        if m % 2 and n % 2:
            s = -1
    one = MultiPoly.constant(p.arity, 1)
    g = h = one
    while True:
        da, db = A.degree_in(var), B.degree_in(var)
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        R = _prem(A, B, var)
        A = B
        B = _exact(R, g * h ** delta)
        g = A.lead_coeff_in(var)
        if delta != 1:
            h = _exact(g ** delta, h ** (delta - 1)) if delta else h
        else:
            h = g
        if B.is_zero:
            return MultiPoly.zero(p.arity)
        if B.degree_in(var) == 0:
            break
    da = A.degree_in(var)
    res = _exact(B ** da, h ** (da - 1))
    return -res if s < 0 else res


# ---------------------------------------------------------------------
# gcd and friends
# ---------------------------------------------------------------------

def normalize(p: MultiPoly) -> MultiPoly:
    """Primitive integer form with a positive leading coefficient.

    Zero stays zero.
    """
    if p.is_zero:
        return p
    den = 1
    num = 0
    for c in p._terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    for c in p._terms.values():
        num = math.gcd(num, (c * den).numerator)
    factor = Fraction(den, num)
    if p.leading_term()[1] < 0:
        factor = -factor
    if factor == 1:
        return p
    return p.scale(factor)


def _gcd_raw(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """gcd up to a nonzero rational factor; both inputs nonzero."""
    one = MultiPoly.constant(p.arity, 1)
    if p.is_constant() or q.is_constant():
        return one
    used = sorted(set(p.variables()) | set(q.variables()))
    # eliminating the variable of lowest degree keeps the PRS short
    var = min(used, key=lambda v: (max(p.degree_in(v), q.degree_in(v)), v))
    cp = _content_raw(p, var)
    cq = _content_raw(q, var)
    c = _gcd_raw(cp, cq) if not (cp.is_constant() or cq.is_constant()) else one
    pp = _exact(p, cp)
    qq = _exact(q, cq)
    if pp.degree_in(var) == 0 or qq.degree_in(var) == 0:
        return c
    g = _prs_gcd(pp, qq, var)
    if g.degree_in(var) == 0:
        return c
    g = _exact(g, _content_raw(g, var))
    return c * g


def _content_raw(p: MultiPoly, var: int) -> MultiPoly:
    coeffs = sorted(p.coeffs_in(var).values(), key=lambda c: (len(c), c.degree))
    acc = coeffs[0]
    for c in coeffs[1:]:
        if acc.is_constant():
            break
        acc = _gcd_raw(acc, c)
    if acc.is_constant():
        return MultiPoly.constant(p.arity, 1)
    return normalize(acc)


def _prs_gcd(a: MultiPoly, b: MultiPoly, var: int) -> MultiPoly:
    """Last nonzero member of the subresultant PRS of primitive ``a``, ``b``."""
    if a.degree_in(var) < b.degree_in(var):
        a, b = b, a
    one = MultiPoly.constant(a.arity, 1)
    g = h = one
    while True:
        delta = a.degree_in(var) - b.degree_in(var)
        r = _prem(a, b, var)
        if r.is_zero:
            return b
        if r.degree_in(var) == 0:
            return one
        a = b
        b = _exact(r, g * h ** delta)
        g = a.lead_coeff_in(var)
        if delta:
            h = _exact(g ** delta, h ** (delta - 1))


def gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor, primitive with positive leading coefficient."""
    if p.arity != q.arity:
        raise ArityError("arity mismatch")
    if p.is_zero and q.is_zero:
        raise ZeroDivisorError("gcd(0, 0) is undefined")
    if p.is_zero:
        return normalize(q)
    if q.is_zero:
        return normalize(p)
    with _elimination_caps(p, q):
        return normalize(_gcd_raw(p, q))


def gcd_many(polys: Iterable[MultiPoly]) -> MultiPoly:
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        raise ZeroDivisorError("gcd of zero polynomials is undefined")
    polys.sort(key=lambda p: (p.degree, len(p)))
    acc = normalize(polys[0])
    for p in polys[1:]:
        if acc.is_constant():
            break
        acc = gcd(acc, p)
    return acc


def content(p: MultiPoly, var: int) -> MultiPoly:
    """gcd of the coefficients of ``p`` viewed as a polynomial in ``x_var``."""
    if p.is_zero:
        raise ZeroDivisorError("content of zero polynomial")
    return _content_raw(p, var)


def squarefree_part(p: MultiPoly) -> MultiPoly:
    """Product of the distinct irreducible factors of ``p`` (normalized)."""
    if p.is_zero:
        raise ZeroDivisorError("squarefree part of the zero polynomial")
    if p.is_constant():
        return MultiPoly.constant(p.arity, 1)
    derivs = [partial_derivative(p, v) for v in p.variables()]
    g = gcd_many([p] + derivs)
    return normalize(_exact(p, g))


# ---------------------------------------------------------------------
# evaluation and variable bookkeeping
# ---------------------------------------------------------------------

def evaluate(p: MultiPoly, point: Sequence[complex]) -> complex:
    """Numeric value at a complex point."""
    if len(point) != p.arity:
        raise ArityError(f"point has {len(point)} coordinates, polynomial arity {p.arity}")
    pt = [complex(v) for v in point]
    pows = [[1 + 0j] for _ in pt]
    total = 0j
    for c, m in p._numeric_terms():
        v = c
        for i, e in enumerate(m):
            if e:
                row = pows[i]
                while len(row) <= e:
                    row.append(row[-1] * pt[i])
                v *= row[e]
        total += v
    return total


def evaluate_exact(p: MultiPoly, point: Sequence) -> Fraction:
    if len(point) != p.arity:
        raise ArityError(f"point has {len(point)} coordinates, polynomial arity {p.arity}")
    pt = [_as_fraction(v) for v in point]
    total = Fraction(0)
    for m, c in p._terms.items():
        v = c
        for i, e in enumerate(m):
            if e:
                v *= pt[i] ** e
        total += v
    return total


def specialize(p: MultiPoly, var: int, value) -> MultiPoly:
    """Set ``x_var = value`` (rational); arity is preserved."""
    value = _as_fraction(value)
    t: dict = {}
    for m, c in p._terms.items():
        e = m[var]
        v = c * value ** e if e else c
        if not v:
            continue
        mm = m[:var] + (0,) + m[var + 1:]
        s = t.get(mm, 0) + v
        if s:
            t[mm] = s
        else:
            t.pop(mm, None)
    return MultiPoly._raw(p.arity, t)


def remap(p: MultiPoly, mapping: Mapping[int, int] | Sequence[int], arity: int) -> MultiPoly:
    """Rename variables: old index ``i`` becomes ``mapping[i]`` in a new arity.

    Old variables that occur in ``p`` must all be mapped.
    """
    t: dict = {}
    for m, c in p._terms.items():
        new = [0] * arity
        for i, e in enumerate(m):
            if e:
                j = mapping[i]
                new[j] += e
        key = tuple(new)
        s = t.get(key, 0) + c
        if s:
            t[key] = s
        else:
            t.pop(key, None)
    return MultiPoly._raw(arity, t)


def univariate_coeffs(p: MultiPoly, var: int) -> list[Fraction]:
    """Coefficients (low to high) of a polynomial involving only ``x_var``."""
    if any(v != var for v in p.variables()):
        raise ValueError("polynomial involves other variables")
    if p.is_zero:
        return []
    out = [Fraction(0)] * (p.degree_in(var) + 1)
    for m, c in p._terms.items():
        out[m[var]] = c
    return out


def from_univariate(coeffs: Sequence, arity: int, var: int) -> MultiPoly:
    t = {}
    for k, c in enumerate(coeffs):
        if c:
            t[tuple(k if i == var else 0 for i in range(arity))] = _as_fraction(c)
    return MultiPoly._raw(arity, t)
