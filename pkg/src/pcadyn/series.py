"""Truncated univariate power series with precision tracking.

A series carries coefficients ``c_0 .. c_N`` and its absolute precision ``N``:
it stands for ``sum c_k t^k + O(t^(N+1))``.  Arithmetic propagates precision
the way p-adic numbers do, so a product or composition never claims more
terms than its inputs determine.  Coefficients are ``Fraction`` while every
operation stays rational and become ``complex`` otherwise.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Sequence

from .poly import MultiPoly

INF = 10 ** 9


def _num(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    c = complex(c)
    return c


def _is_zero(c, tol=0.0):
    return c == 0 if tol == 0 else abs(c) <= tol


class PowerSeries1:
    """``sum coeffs[k] t^k + O(t^(order+1))``; ``order = INF`` marks an exact polynomial.

    Trailing zero coefficients are not stored.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int = INF):
        order = max(order, -1)
        cs = [_num(c) for c in list(coeffs)[: order + 1]]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.order = order

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, order=INF):
        return cls([], order)

    @classmethod
    def monomial(cls, k, c, order=INF):
        return cls([0] * k + [c], order)

    @classmethod
    def variable(cls, order=INF):
        return cls.monomial(1, 1, order)

    # -- inspection -------------------------------------------------------
    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def valuation(self, tol=0.0) -> int:
        """Index of the first nonzero coefficient; ``INF`` if none is known."""
        for k, c in enumerate(self.coeffs):
            if not _is_zero(c, tol):
                return k
        return INF

    def _val(self):
        # valuation, or the first unknown index when no coefficient is nonzero
        v = self.valuation()
        return v if v != INF else (INF if self.order >= INF else self.order + 1)

    def coeff(self, k):
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond precision {self.order}")
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    __getitem__ = coeff

    def coefficients(self):
        """Coefficients ``c_0 .. c_order`` (finite order only)."""
        if self.order >= INF:
            return list(self.coeffs)
        return [self.coeff(k) for k in range(self.order + 1)]

    def truncate(self, order):
        return PowerSeries1(self.coeffs, min(order, self.order))

    def with_order(self, order):
        """Same coefficients, precision set to ``order`` (caller vouches for it)."""
        return PowerSeries1(self.coeffs, order)

    def is_zero(self, tol=0.0):
        return self.valuation(tol) == INF

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __repr__(self):
        o = "exact" if self.order >= INF else self.order
        return f"PowerSeries1({list(self.coeffs)!r}, order={o})"

    def __eq__(self, other):
        if not isinstance(other, PowerSeries1):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, PowerSeries1):
            return other
        return PowerSeries1([other], INF)

    def __add__(self, other):
        other = self._lift(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        m = min(max(len(a), len(b)), n + 1)
        out = [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(m)]
        return PowerSeries1(out, n)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries1([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        return PowerSeries1([c * a for a in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries1):
            return self.scale(_num(other))
        va, vb = self._val(), other._val()
        n = min(_plus(self.order, vb), _plus(other.order, va))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return PowerSeries1.zero(n)
        top = min(len(a) + len(b) - 1, n + 1)
        out = [0] * top
        for i in range(va, len(a)):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(vb, min(len(b), top - i)):
                if b[j] != 0:
                    out[i + j] += ai * b[j]
        return PowerSeries1(out, n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PowerSeries1([1], INF)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int):
        """Multiply by ``t^k`` (``k >= 0``) or divide by it (``k < 0``, exact)."""
        if k >= 0:
            return PowerSeries1([0] * k + list(self.coeffs), _plus(self.order, k))
        if self._val() < -k:
            raise ValueError("series is not divisible by that power of t")
        return PowerSeries1(self.coeffs[-k:], _plus(self.order, k))

    def derivative(self):
        return PowerSeries1([k * c for k, c in enumerate(self.coeffs)][1:], _plus(self.order, -1))

    def _finite(self, what):
        if self.order >= INF:
            raise ValueError(f"{what} of an exact polynomial needs an explicit order; truncate first")
        return self.order

    def inverse(self):
        """``1/self`` for a unit series."""
        n = self._finite("inverse")
        u = self.coefficients()
        if not u or u[0] == 0:
            raise ZeroDivisionError("series is not a unit")
        u0 = u[0]
        out = [1 / u0]
        for k in range(1, n + 1):
            s = sum(u[j] * out[k - j] for j in range(1, k + 1) if u[j] != 0)
            out.append(-s / u0)
        return PowerSeries1(out, n)

    def power_real(self, alpha: Fraction, root0=None):
        """``self^alpha`` for a unit series; ``root0`` fixes the constant term."""
        n = self._finite("fractional power")
        u = self.coefficients()
        if not u or u[0] == 0:
            raise ZeroDivisionError("fractional power of a non-unit")
        alpha = Fraction(alpha)
        u0 = u[0]
        if root0 is None:
            root0 = _principal_power(u0, alpha)
        r = [root0]
        for k in range(1, n + 1):
            s = 0
            for j in range(1, k + 1):
                if u[j] != 0:
                    s += (alpha * j - (k - j)) * u[j] * r[k - j]
            r.append(s / (k * u0))
        return PowerSeries1(r, n)

    def compose(self, inner: "PowerSeries1"):
        """``self(inner(t))``; ``inner`` must vanish at 0."""
        v = inner._val()
        if v == 0:
            raise ValueError("inner series must vanish at 0")
        c0 = self.coeffs[0] if self.coeffs else 0
        limit = INF if self.order >= INF else _plus(v * (self.order + 1), -1)
        if v >= INF:
            return PowerSeries1([c0], min(limit, inner.order))
        acc = PowerSeries1([c0], INF)
        power = PowerSeries1([1], INF)
        for k in range(1, len(self.coeffs)):
            if k * v > limit:
                break
            power = (power * inner).truncate(limit)
            if self.coeffs[k] != 0:
                acc = acc + power.scale(self.coeffs[k])
        # products already carry the precision lost to inner's truncation
        return acc.truncate(limit)

    def reversion(self):
        """Compositional inverse of a series with ``c_0 = 0, c_1 != 0``."""
        n = self._finite("reversion")
        if n < 1 or self.coeff(0) != 0 or self.coeff(1) == 0:
            raise ValueError("series must be t*unit to be reverted")
        a1 = self.coeff(1)
        rest = PowerSeries1([0, 0] + self.coefficients()[2:], n)
        t = PowerSeries1([0, 1], n)
        inv = t.scale(1 / a1)
        for _ in range(n):
            inv = (t - rest.compose(inv)).scale(1 / a1)
        return inv

    def evaluate(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


def _plus(a, b):
    return INF if a >= INF or b >= INF else a + b


def _principal_power(c, alpha: Fraction):
    """``c^alpha``: rational when possible, else the principal complex value."""
    alpha = Fraction(alpha)
    if isinstance(c, Fraction):
        r = rational_root(c, alpha.denominator)
        if r is not None:
            return r ** alpha.numerator
    return complex(c) ** float(alpha) if not isinstance(c, complex) else cmath.exp(complex(alpha) * cmath.log(c))


def _int_root(n: int, k: int):
    if n < 0:
        return None
    lo, hi = 0, 1
    while hi ** k <= n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def rational_root(c: Fraction, k: int):
    """The real rational ``k``-th root of ``c`` when one exists, else None."""
    c = Fraction(c)
    if k == 1:
        return c
    sign = 1
    if c < 0:
        if k % 2 == 0:
            return None
        sign, c = -1, -c
    a, b = _int_root(c.numerator, k), _int_root(c.denominator, k)
    if a is None or b is None:
        return None
    return sign * Fraction(a, b)


def evaluate_poly_series(p: MultiPoly, args: Sequence[PowerSeries1], order: int) -> PowerSeries1:
    """``p(args(t))`` truncated at ``order`` for a polynomial ``p``."""
    if p.arity != len(args):
        raise ValueError("arity mismatch")
    cache = [[PowerSeries1([1], INF)] for _ in args]

    def power(i, e):
        lst = cache[i]
        while len(lst) <= e:
            lst.append((lst[-1] * args[i]).truncate(order))
        return lst[e]

    acc = PowerSeries1.zero(order)
    for mono, c in p.terms.items():
        term = PowerSeries1([1], INF)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        acc = acc + term.scale(c).truncate(order)
    return acc.truncate(order)
