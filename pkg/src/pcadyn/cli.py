"""Command-line front end.

Exit codes: 0 PASS, 2 FAIL-DICHOTOMY, 3 REFUSED, 1 any error.  Thread use is
capped by the ``PCADYN_THREADS`` environment variable.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .critical import CurveComponent, Periodic, verify_pca
from .endo import check_nondegenerate, new_endo, potential
from .errors import DegenerateMapError, PcaError, PcaRefused, SpecParseError
from .fixed_points import CLASS_TOL, RESIDUAL_TOL, ROOT_PROBE, audit_theorem
from .local_analysis import (DEFAULT_ORDER, GermMap2, branch_from_parametrization, newton_puiseux,
                             verify_cusp_relation, verify_preperiodic_relation, verify_tangent_relation)
from .normalization import (RationalCurveMap, RationalMap1D, audit_1d_dichotomy, degree_1d, Finite,
                            lift_over_normalization)
from .polytext import format_poly, parse_poly
from .report import base_report, dumps, number
from .spec_format import CURVE_VARS, MapSpec, load_map_spec

EXIT = {"PASS": 0, "FAIL-DICHOTOMY": 2, "REFUSED": 3, "INFO": 0, "ERROR": 1}
DEFAULT_MAX_ITER = 64


def _fmt(z) -> str:
    if isinstance(z, Fraction):
        return str(z.numerator) if z.denominator == 1 else f"{z.numerator}/{z.denominator}"
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real + 0.0:.10g}"
    return f"{z.real + 0.0:.10g}{z.imag + 0.0:+.10g}i"


def _point(coords) -> str:
    return "[" + " : ".join(_fmt(c) for c in coords) + "]"


def _tolerances(args) -> dict:
    return {"residual": args.tol_residual, "class": args.tol_class, "order": args.order, "max_iter": args.max_iter}


def _map_section(spec: MapSpec, f) -> dict:
    return {
        "name": spec.name,
        "variables": list(spec.variables),
        "components": [format_poly(p, spec.variables) for p in spec.components],
        "degree": f.degree,
    }


def _endo(spec: MapSpec):
    f = new_endo(spec.components)
    if f.arity == 3:
        nd = check_nondegenerate(f)
        if not nd:
            raise DegenerateMapError(
                f"components share the projective zero {_point(nd.witness)} "
                f"(residual {nd.residual:.3g}, {'exact' if nd.witness_exact else 'numeric'})",
                witness=nd.witness,
            )
    return f


def _components(spec: MapSpec):
    if spec.pc_components is None:
        return None
    return [CurveComponent(label, p) for label, p in spec.pc_components]


def _pca_section(cert) -> dict:
    comps = []
    for c, j, cls in zip(cert.components, cert.forward_map, cert.orbit_classes):
        comps.append({
            "label": c.label,
            "poly": format_poly(c.poly),
            "image": cert.components[j].label,
            "tail": cls.tail,
            "period": cls.period,
        })
    return {
        "status": "certified",
        "components": comps,
        "critical_cover": [cert.components[i].label for i in cert.critical_cover],
        "critical_raw": format_poly(cert.critical_raw),
        "critical_squarefree": format_poly(cert.critical_squarefree),
    }


def _refusal_section(exc: PcaRefused) -> dict:
    subject = exc.subject
    if subject is not None and not isinstance(subject, str):
        subject = format_poly(subject)
    return {"status": "refused", "reason": exc.reason, "subject": subject, "message": str(exc)}


def _orbit_text(cls):
    return f"periodic {cls.period}" if isinstance(cls, Periodic) else f"preperiodic tail {cls.tail} period {cls.period}"


def _fixed_point_entry(r) -> dict:
    entry = {
        "point": [number(c) for c in r.point],
        "residual": float(r.residual),
        "eigenvalues": [number(l) for l in r.eigenvalues],
        "classes": [c.tag for c in r.classes],
        "on_pc": r.on_pc,
        "violations": list(r.violations),
        "tangent_split": None,
    }
    if r.split is not None:
        entry["tangent_split"] = {
            "component": r.split.label,
            "tangent": number(r.split.tangent),
            "transversal": number(r.split.transversal),
            "classes": [c.tag for c in r.split_classes],
        }
    return entry


def _fixed_point_line(r) -> str:
    ev = ", ".join(_fmt(l) for l in r.eigenvalues)
    cl = ", ".join(c.tag for c in r.classes)
    line = f"  {_point(r.point)}  eigenvalues {ev}  ({cl})"
    if r.split is not None:
        line += f"  tangent {_fmt(r.split.tangent)} / transversal {_fmt(r.split.transversal)} on {r.split.label}"
    if r.violations:
        line += "  VIOLATION: " + "; ".join(r.violations)
    return line


def _lift_audit(f, label, forms, args):
    n = RationalCurveMap(tuple(forms))
    g = lift_over_normalization(f, n)
    deg = degree_1d(g, as_lift=True)
    aud = audit_1d_dichotomy(g, args.tol_class, ROOT_PROBE, args.max_iter)
    return _audit_1d_section(label, g, aud, forms, deg)


def _audit_1d_section(label, g, aud, forms=None, deg=None) -> tuple[dict, str, str]:
    deg = deg or degree_1d(g)
    crit = []
    for c, o in zip(aud.pcf.critical_points, aud.pcf.orbits):
        item = {"point": str(c), "multiplicity": c.multiplicity, "exact": c.exact}
        if isinstance(o, Finite):
            item["orbit"] = {"kind": "finite", "tail": o.tail, "period": o.period}
        else:
            item["orbit"] = {"kind": "undecided", "reason": o.reason}
        crit.append(item)
    fps = [{"point": str(p.point), "multiplier": number(p.multiplier), "class": p.eigen_class.tag,
            "exact": p.point.exact} for p in aud.fixed_points]
    verdict = aud.verdict
    notes = list(aud.notes)
    if deg.audit == "FAIL":
        verdict = "FAIL-DICHOTOMY"
        notes.append(f"lift has degree {deg.degree} < 2")
    section = {
        "label": label,
        "parametrization": [format_poly(p, CURVE_VARS) for p in forms] if forms is not None else None,
        "lift": str(g),
        "degree": deg.degree,
        "degree_audit": deg.audit,
        "pcf": {"verdict": aud.pcf.verdict, "critical_points": crit},
        "fixed_points": fps,
        "verdict": verdict,
        "notes": notes,
    }
    pcf_text = "PCF" if aud.pcf.verdict == "PCF" else "PCF undecided"
    dich = "PASS" if aud.verdict == "PASS" else "FAIL"
    text = f"{g}, d' = {deg.degree}, {pcf_text}, dichotomy {dich}"
    return section, text, verdict


def _germ_audit(gs, order):
    g = GermMap2(gs.map[0], gs.map[1])
    b = {k: branch_from_parametrization(X, Y, order) for k, (X, Y) in gs.branches}
    if gs.relation == "cusp":
        rep = verify_cusp_relation(g, b["branch"], order=order)
    elif gs.relation == "preperiodic":
        rep = verify_preperiodic_relation(g, b["source"], b["target"], order=order)
    else:
        rep = verify_tangent_relation(g, b["branch1"], b["branch2"], order=order)
    return {
        "label": gs.label,
        "relation": gs.relation,
        "passed": rep.passed,
        "summary": rep.summary(),
        "lambda": number(rep.lam),
        "exponents": list(rep.exponents),
        "expected": [number(e) for e in rep.expected],
        "eigenvalues": [number(e) for e in rep.eigenvalues],
        "exact": rep.exact,
        "residual": float(rep.residual),
    }


# ---------------------------------------------------------------------
# commands: each returns (lines of text, report dict)
# ---------------------------------------------------------------------

def cmd_analyze(spec: MapSpec, args):
    rep = base_report("analyze")
    rep["tolerances"] = _tolerances(args)
    f = _endo(spec)
    rep["map"] = _map_section(spec, f)
    out = [f"map {spec.name}: [{', '.join(rep['map']['components'])}] (degree {f.degree})"]
    verdicts = []
    if f.arity == 2:
        g = RationalMap1D(*spec.components)
        aud = audit_1d_dichotomy(g, args.tol_class, ROOT_PROBE, args.max_iter)
        section, text, v = _audit_1d_section("map", g, aud)
        rep["curves"] = [section]
        for fp in section["fixed_points"]:
            out.append(f"  fixed point {fp['point']}: multiplier {_fmt(_unjson(fp['multiplier']))} ({fp['class']})")
        out.append(f"1-D map: {text}")
        out += [f"note: {n}" for n in section["notes"]]
        verdicts.append(v)
    else:
        comps = _components(spec)
        rep["pca"] = None
        try:
            result = audit_theorem(f, comps, args.tol_class, args.tol_residual, ROOT_PROBE)
        except PcaRefused as exc:
            rep["pca"] = _refusal_section(exc)
            rep["verdict"] = "REFUSED"
            rep["notes"].append("the component list does not certify the map as PCA; this is not a claim that it is not PCA")
            out.append(f"PCA certificate refused ({exc.reason}): {exc}")
            out.append("verdict: REFUSED")
            return out, rep
        if result.certificate is not None:
            rep["pca"] = _pca_section(result.certificate)
            for c in rep["pca"]["components"]:
                cls = result.certificate.orbit_classes[[x["label"] for x in rep["pca"]["components"]].index(c["label"])]
                out.append(f"PCA component {c['label']}: {c['poly']} -> {c['image']} ({_orbit_text(cls)})")
        rep["fixed_points"] = [_fixed_point_entry(r) for r in result.reports]
        out.append(f"fixed points: {len(result.reports)}")
        out += [_fixed_point_line(r) for r in result.reports]
        rep["notes"] += list(result.notes)
        verdicts.append(result.verdict)
        rep["curves"] = []
        for label, forms in spec.curves:
            section, text, v = _lift_audit(f, label, forms, args)
            rep["curves"].append(section)
            out.append(f"curve {label}: {text}")
            out += [f"  note: {n}" for n in section["notes"]]
            verdicts.append(v)
    rep["germs"] = []
    for gs in spec.germs:
        entry = _germ_audit(gs, args.order)
        rep["germs"].append(entry)
        out.append(f"germ {gs.label}: {entry['summary']}")
        verdicts.append("PASS" if entry["passed"] else "FAIL-DICHOTOMY")
    rep["verdict"] = "PASS" if all(v == "PASS" for v in verdicts) else "FAIL-DICHOTOMY"
    out += [f"note: {n}" for n in rep["notes"]]
    out.append(f"verdict: {rep['verdict']}")
    return out, rep


def _unjson(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, dict):
        return complex(x["re"], x["im"])
    return x


def cmd_check_pca(spec: MapSpec, args):
    rep = base_report("check-pca")
    f = _endo(spec)
    rep["map"] = _map_section(spec, f)
    comps = _components(spec)
    if comps is None:
        raise SpecParseError("check-pca needs a [pc] section")
    try:
        cert = verify_pca(f, comps)
    except PcaRefused as exc:
        rep["pca"] = _refusal_section(exc)
        rep["verdict"] = "REFUSED"
        return [f"PCA certificate refused ({exc.reason}): {exc}", "verdict: REFUSED"], rep
    rep["pca"] = _pca_section(cert)
    rep["verdict"] = "PASS"
    out = [f"critical locus: {rep['pca']['critical_raw']} (squarefree part {rep['pca']['critical_squarefree']})"]
    for c, cls in zip(rep["pca"]["components"], cert.orbit_classes):
        out.append(f"PCA component {c['label']}: {c['poly']} -> {c['image']} ({_orbit_text(cls)})")
    out.append("verdict: PASS (certified)")
    return out, rep


def cmd_fixed_points(spec: MapSpec, args):
    rep = base_report("fixed-points")
    rep["tolerances"] = _tolerances(args)
    f = _endo(spec)
    if f.arity != 3:
        raise SpecParseError("fixed-points needs a map of CP^2")
    rep["map"] = _map_section(spec, f)
    result = audit_theorem(f, None, args.tol_class, args.tol_residual, ROOT_PROBE)
    rep["fixed_points"] = [_fixed_point_entry(r) for r in result.reports]
    out = [f"fixed points: {len(result.reports)}"] + [_fixed_point_line(r) for r in result.reports]
    return out, rep


def cmd_puiseux(text: str, args):
    rep = base_report("puiseux")
    q = parse_poly(text, ("x", "y"))
    branches = newton_puiseux(q, args.order)
    rep["branches"] = []
    out = []
    for b in branches:
        ys = b.describe()
        series = ys[1:-1].split(", ", 1)
        if b.swapped:
            line = f"branch: m={b.m}, x = {series[0]}, y = {series[1]}"
        else:
            line = f"branch: m={b.m}, y = {series[1]}"
        if b.is_singular:
            line += f"  (characteristic m={b.m}, n={b.n})"
        out.append(line)
        rep["branches"].append({
            "m": b.m, "n": b.n, "swapped": b.swapped, "exact": b.exact, "order": b.order,
            "coefficients": [number(c) for c in b.y_series.coefficients()],
        })
    return out, rep


def cmd_lift(spec: MapSpec, label: str, args):
    rep = base_report("lift")
    f = _endo(spec)
    rep["map"] = _map_section(spec, f)
    try:
        forms = spec.curve(label)
    except KeyError as exc:
        raise SpecParseError(str(exc.args[0])) from None
    section, text, verdict = _lift_audit(f, label, forms, args)
    rep["curves"] = [section]
    rep["verdict"] = verdict
    return [text] + [f"note: {n}" for n in section["notes"]], rep


def _parse_point(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(Fraction(part))
        except ValueError:
            out.append(complex(part.replace("i", "j")))
    return out


def cmd_potential(spec: MapSpec, point: str, iters: int, args):
    rep = base_report("potential")
    f = _endo(spec)
    rep["map"] = _map_section(spec, f)
    w = _parse_point(point)
    if len(w) != f.arity:
        raise SpecParseError(f"point needs {f.arity} coordinates")
    est = potential(f, w, iters)
    rep["potential"] = {
        "point": [number(c) for c in w],
        "iterations": iters,
        "value": est.extrapolated,
        "converged": est.converged,
        "tolerance": est.tolerance,
    }
    state = "converged" if est.converged else "not converged"
    return [f"H = {est.extrapolated!r}, {state}"], rep


# ---------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-residual", type=float, default=RESIDUAL_TOL, help="fixed-point residual tolerance")
    common.add_argument("--tol-class", type=float, default=CLASS_TOL, help="eigenvalue classification tolerance")
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help="series truncation order N")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="critical orbit iteration cap")
    common.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")

    p = argparse.ArgumentParser(prog="pcadyn", description="Audit dynamics of post-critically algebraic maps.")
    p.add_argument("--version", action="version", version=f"pcadyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("analyze", "full audit"), ("check-pca", "verify the post-critical certificate"),
                        ("fixed-points", "fixed points and their eigenvalues")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("file")
    s = sub.add_parser("puiseux", parents=[common], help="Newton-Puiseux branches of a plane curve in x, y")
    s.add_argument("poly")
    s = sub.add_parser("lift", parents=[common], help="lift the map to a curve's parametrization")
    s.add_argument("file")
    s.add_argument("--curve", required=True)
    s = sub.add_parser("potential", parents=[common], help="escape-rate potential at a point")
    s.add_argument("file")
    s.add_argument("--point", required=True, help="comma separated coordinates")
    s.add_argument("--iters", type=int, default=40)
    return p


def run(argv=None):
    """Parse ``argv`` and run; returns ``(exit code, text, report)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "puiseux":
            lines, rep = cmd_puiseux(args.poly, args)
        else:
            spec = load_map_spec(args.file)
            if args.command == "analyze":
                lines, rep = cmd_analyze(spec, args)
            elif args.command == "check-pca":
                lines, rep = cmd_check_pca(spec, args)
            elif args.command == "fixed-points":
                lines, rep = cmd_fixed_points(spec, args)
            elif args.command == "lift":
                lines, rep = cmd_lift(spec, args.curve, args)
            else:
                lines, rep = cmd_potential(spec, args.point, args.iters, args)
    except (PcaError, ValueError, OSError) as exc:
        rep = base_report(args.command)
        rep["verdict"] = "ERROR"
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SpecParseError):
            err["line"], err["column"] = exc.line, exc.column
        if isinstance(exc, DegenerateMapError) and exc.witness is not None:
            err["witness"] = [number(c) for c in exc.witness]
        rep["error"] = err
        lines = [f"error: {type(exc).__name__}: {exc}"]
    return EXIT[rep["verdict"]], "\n".join(lines) + "\n", rep


def main(argv=None) -> int:
    code, text, rep = run(argv)
    stream = sys.stderr if rep["verdict"] == "ERROR" else sys.stdout
    stream.write(text)
    args = build_parser().parse_args(argv)
    if args.json:
        if args.json == "-":
            sys.stdout.write(dumps(rep))
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(dumps(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
