import random

import pytest
from hypothesis import settings

from pcadyn.endo import check_nondegenerate, new_endo
from pcadyn.poly import MultiPoly
from pcadyn.polytext import parse_poly

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def P(text, variables=("x", "y", "z")):
    return parse_poly(text, variables)


def endo(*texts):
    return new_endo([P(t) for t in texts])


def random_form(rng, arity, d, lo=-5, hi=5):
    """Dense homogeneous form of degree d with integer coefficients."""
    terms = {}
    def rec(prefix, left, slots):
        if slots == 1:
            terms[tuple(prefix + [left])] = rng.randint(lo, hi)
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, slots - 1)
    rec([], d, arity)
    return MultiPoly(arity, terms)


def random_endo(rng, d, lo=-9, hi=9):
    while True:
        f = new_endo([random_form(rng, 3, d, lo, hi) for _ in range(3)])
        if check_nondegenerate(f):
            return f


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_tangent_change(rng, degree=3, terms=3):
    """h = identity + a few random monomials of degree 2..degree, as a germ."""
    from pcadyn.local_analysis import GermMap2

    comps = []
    for v in range(2):
        t = {(1, 0) if v == 0 else (0, 1): 1}
        for _ in range(terms):
            k = rng.randint(2, degree)
            i = rng.randint(0, k)
            t[(i, k - i)] = t.get((i, k - i), 0) + rng.choice([-2, -1, 1, 2])
        comps.append(MultiPoly(2, t))
    return GermMap2(*comps)


def conjugated_cusp(lam, m, n, h, order):
    """h o diag(lam^m, lam^n) o h^-1 with the image of the branch (t^m, t^n)."""
    from fractions import Fraction

    from pcadyn.local_analysis import GermMap2, branch_from_parametrization
    from pcadyn.series import PowerSeries1

    lam = Fraction(lam)
    D = GermMap2.diagonal(lam ** m, lam ** n)
    g = h.compose(D.compose(h.inverse(order), order), order)
    X, Y = h.apply_series(PowerSeries1.monomial(m, 1, order), PowerSeries1.monomial(n, 1, order), order)
    return g, branch_from_parametrization(X, Y, order)


# -- one summary line per acceptance criterion ---------------------------

_CRITERIA: dict[int, bool] = {}
_SESSION = {}


def pytest_sessionstart(session):
    import time
    _SESSION["start"] = time.perf_counter()


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    n = int(report.nodeid.split(marker)[1].split("_")[0])
    ok = _CRITERIA.get(n, True)
    if report.failed or (report.when == "call" and report.skipped):
        ok = False
    _CRITERIA[n] = ok


def pytest_terminal_summary(terminalreporter):
    import time
    if not _CRITERIA:
        return
    elapsed = time.perf_counter() - _SESSION.get("start", time.perf_counter())
    full_run = terminalreporter.config.args in ([], ["tests"]) or all(
        a.rstrip("/").endswith("tests") for a in terminalreporter.config.args)
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok = _CRITERIA[n]
        extra = ""
        if n == 8 and full_run:
            ok = ok and elapsed < 60
            extra = f"  (full suite {elapsed:.1f} s, limit 60 s)"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}{extra}")
