"""Univariate root finding.

Numeric roots come from Aberth-Ehrlich simultaneous iteration followed by a
Newton polish.  Exact-coefficient polynomials are first made squarefree over
the rationals, so the numeric stage only ever sees simple roots; rational
roots are then recognised and confirmed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import SolverError

EPS = np.finfo(float).eps


# -- exact univariate helpers (coefficients low -> high) -------------------

def _trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lb = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] / lb
        q[k] = c
        if c:
            for i, bi in enumerate(b):
                r[k + i] -= c * bi
    return q, _trim(r[: len(b) - 1])


def ugcd(a, b):
    """Monic gcd of two rational univariate polynomials."""
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lc = a[-1]
    return [c / lc for c in a]


def uderiv(a):
    return [Fraction(k) * c for k, c in enumerate(a)][1:]


def squarefree_factors(coeffs: Sequence[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: ``[(g_k, k)]`` with ``a = lc * prod g_k^k``."""
    a = _trim([Fraction(c) for c in coeffs])
    if len(a) <= 1:
        return []
    out = []
    g = ugcd(a, uderiv(a))
    b, _ = _divmod(a, g)
    c, _ = _divmod(uderiv(a), g)
    d = [x - y for x, y in _zip_pad(c, uderiv(b))]
    k = 1
    while len(_trim(b)) > 1:
        a_k = ugcd(b, d)
        if len(a_k) > 1:
            out.append((a_k, k))
        b, _ = _divmod(b, a_k)
        c, _ = _divmod(d, a_k)
        d = [x - y for x, y in _zip_pad(c, uderiv(b))]
        k += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return zip(a, b)


def squarefree(coeffs):
    a = _trim([Fraction(c) for c in coeffs])
    if len(a) <= 1:
        return a
    g = ugcd(a, uderiv(a))
    q, _ = _divmod(a, g)
    return q


def uval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# -- numeric ---------------------------------------------------------------

def _to_float_coeffs(coeffs):
    cs = list(coeffs)
    if all(isinstance(c, Fraction) or isinstance(c, int) for c in cs):
        big = max((abs(Fraction(c)) for c in cs if c), default=Fraction(1))
        return np.array([complex(float(Fraction(c) / big)) for c in cs])
    arr = np.array([complex(c) for c in cs])
    m = np.max(np.abs(arr))
    return arr / m if m else arr


def aberth(coeffs, *, tol=None, maxiter=500) -> np.ndarray:
    """All roots of ``sum coeffs[k] x^k`` by Aberth-Ehrlich iteration.

    Leading zero coefficients must be trimmed by the caller.
    """
    a = _to_float_coeffs(coeffs)
    while len(a) and a[-1] == 0:
        a = a[:-1]
    n = len(a) - 1
    if n < 1:
        return np.array([], dtype=complex)
    nz = 0
    while a[nz] == 0:
        nz += 1
    a = a[nz:]
    n -= nz
    zeros = np.zeros(nz, dtype=complex)
    if n == 0:
        return zeros
    hi = a[::-1] / a[-1]  # monic, high -> low for polyval
    if n == 1:
        return np.concatenate([zeros, [-hi[1]]])
    dhi = np.polyder(hi)
    center = -hi[1] / n
    shifted_mag = np.abs(hi[1:])
    radius = max(np.max(shifted_mag ** (1.0 / np.arange(1, n + 1))), 1e-3)
    ang = 2 * np.pi * np.arange(n) / n + 0.4
    z = center + radius * np.exp(1j * ang)
    tol = 4 * EPS if tol is None else tol
    for _ in range(maxiter):
        pv = np.polyval(hi, z)
        dv = np.polyval(dhi, z)
        with np.errstate(all="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0)
        w = np.where(pv == 0, 0, w)
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(np.abs(z), 1.0)):
            break
    else:
        # fall through with the best estimate; residual checks downstream
        pass
    z = polish(hi, z)
    if not np.all(np.isfinite(z)):
        raise SolverError("root finder did not converge")
    return np.concatenate([zeros, z])


def polish(hi, z, steps=3):
    dhi = np.polyder(hi)
    for _ in range(steps):
        pv = np.polyval(hi, z)
        dv = np.polyval(dhi, z)
        with np.errstate(all="ignore"):
            step = np.where(dv != 0, pv / dv, 0)
        cand = z - step
        better = np.abs(np.polyval(hi, cand)) <= np.abs(pv)
        z = np.where(better & np.isfinite(cand), cand, z)
    return z


@dataclass(frozen=True)
class Root:
    value: complex | Fraction
    multiplicity: int
    exact: bool

    def as_complex(self) -> complex:
        return complex(self.value)


def _recognize_rational(coeffs, r: complex):
    if abs(r.imag) > 1e-6 * max(1.0, abs(r)):
        return None
    lc = _trim(coeffs)[-1]
    # denominators of rational roots divide the leading coefficient of the
    # integer-scaled polynomial
    den_lcm = 1
    for c in coeffs:
        den_lcm = den_lcm * Fraction(c).denominator // math.gcd(den_lcm, Fraction(c).denominator)
    bound = abs((lc * den_lcm).numerator)
    cand = Fraction(r.real).limit_denominator(max(1, min(bound, 10 ** 12)))
    if uval(coeffs, cand) == 0:
        return cand
    return None


def rational_univariate_roots(coeffs: Sequence) -> list[Root]:
    """Roots with multiplicity of a rational polynomial; rational ones exact."""
    out = []
    for g, k in squarefree_factors(coeffs):
        g = list(g)
        zero_mult = 0
        while g and g[0] == 0:
            g = g[1:]
            zero_mult += 1
        if zero_mult:
            out.append(Root(Fraction(0), k, True))
        if len(g) <= 1:
            continue
        for r in aberth(g):
            q = _recognize_rational(g, complex(r))
            if q is not None:
                out.append(Root(q, k, True))
            else:
                out.append(Root(complex(r), k, False))
    return out
