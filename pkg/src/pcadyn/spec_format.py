"""Reader and writer for map description files.

A file is a flat list of ``key: value`` lines grouped into sections::

    # power map of degree 2
    name: power2
    variables: x, y, z
    map: [x^2, y^2, z^2]

    [pc]
    x: x
    y: y
    z: z

    [curves]
    line: [s, s, t]

    [germ cusp]
    map: [4*x, 8*y]
    relation: cusp
    branch: [t^2, t^3]

The header before the first section names the map.  ``[pc]`` lists labeled
post-critical components, ``[curves]`` rational parametrizations in ``s, t``
and every ``[germ <label>]`` section a plane germ in ``x, y`` with the
branches (in ``t``) for one eigenvalue relation: ``cusp`` takes ``branch``,
``preperiodic`` takes ``source`` and ``target``, ``tangent`` takes
``branch1`` and ``branch2``.  Two variables in the header describe a map of
CP^1.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import PcaError, SpecParseError
from .poly import MultiPoly, is_homogeneous, ZERO_FLAG
from .polytext import KNOWN_VARIABLES, format_poly, parse_poly

CURVE_VARS = ("s", "t")
GERM_VARS = ("x", "y")
BRANCH_VARS = ("t",)
RELATIONS = {
    "cusp": ("branch",),
    "preperiodic": ("source", "target"),
    "tangent": ("branch1", "branch2"),
}

_SECTION = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([A-Za-z0-9_.-]+))?\s*\]$")
_KEY = re.compile(r"^([A-Za-z0-9_.-]+)\s*:(.*)$")


@dataclass(frozen=True)
class GermSpec:
    label: str
    map: tuple[MultiPoly, MultiPoly]
    relation: str
    branches: tuple[tuple[str, tuple[MultiPoly, MultiPoly]], ...]

    def branch(self, key):
        return dict(self.branches)[key]


@dataclass(frozen=True)
class MapSpec:
    name: str
    variables: tuple[str, ...]
    components: tuple[MultiPoly, ...]
    pc_components: tuple[tuple[str, MultiPoly], ...] | None = None
    curves: tuple[tuple[str, tuple[MultiPoly, ...]], ...] = ()
    germs: tuple[GermSpec, ...] = ()
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def curve(self, label):
        for lab, forms in self.curves:
            if lab == label:
                return forms
        raise KeyError(f"no curve labeled {label!r}")


class _Reader:
    def __init__(self, text):
        self.text = text

    def split_list(self, value, lineno, col):
        """``[a, b, c]`` (brackets optional) into items with their columns."""
        v = value.strip()
        start = col + (len(value) - len(value.lstrip()))
        if v.startswith("["):
            if not v.endswith("]"):
                raise SpecParseError("unterminated list (missing ']')", lineno, start + len(v))
            v = v[1:-1]
            start += 1
        items = []
        depth, cur, cur_col = 0, "", start
        for k, ch in enumerate(v):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                items.append((cur, cur_col))
                cur, cur_col = "", start + k + 1
            else:
                cur += ch
        items.append((cur, cur_col))
        out = []
        for s, c in items:
            lead = len(s) - len(s.lstrip())
            if not s.strip():
                raise SpecParseError("empty list item", lineno, c + 1)
            out.append((s.strip(), c + lead))
        return out


def _poly(text, variables, lineno, col):
    return parse_poly(text, variables, line=lineno, column=col)


def _homogeneous(p, lineno, col, what):
    h = is_homogeneous(p)
    if h is None:
        raise SpecParseError(f"{what} is not homogeneous", lineno, col + 1)
    return h


def parse_map_spec(text: str) -> MapSpec:
    """Parse a description file; errors carry the line and column of the first problem."""
    rd = _Reader(text)
    header: dict = {}
    pcs: list = []
    has_pc = False
    curves: list = []
    germs: list = []
    germ_cur = None
    section = None
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        m = _SECTION.match(body)
        if m:
            kind, label = m.group(1), m.group(2)
            if kind in ("pc", "curves"):
                if label:
                    raise SpecParseError(f"section [{kind}] takes no label", lineno, indent + 1)
                if kind == "pc":
                    has_pc = True
                section = kind
            elif kind == "germ":
                if not label:
                    raise SpecParseError("germ section needs a label: [germ <label>]", lineno, indent + 1)
                if any(g["label"] == label for g in germs):
                    raise SpecParseError(f"duplicate germ label {label!r}", lineno, indent + 1)
                germ_cur = {"label": label, "keys": {}, "line": lineno}
                germs.append(germ_cur)
                section = "germ"
            else:
                raise SpecParseError(f"unknown section [{kind}]", lineno, indent + 1)
            continue
        km = _KEY.match(body)
        if not km:
            raise SpecParseError("expected 'key: value'", lineno, indent + 1)
        key, value = km.group(1), km.group(2)
        vcol = indent + body.index(":") + 1
        if section is None:
            if key in header:
                raise SpecParseError(f"duplicate key {key!r}", lineno, indent + 1)
            if key not in ("name", "variables", "map"):
                raise SpecParseError(f"unknown key {key!r}", lineno, indent + 1)
            header[key] = (value, lineno, vcol)
        elif section == "pc":
            pcs.append((key, value, lineno, vcol))
        elif section == "curves":
            curves.append((key, value, lineno, vcol))
        else:
            if key in germ_cur["keys"]:
                raise SpecParseError(f"duplicate key {key!r}", lineno, indent + 1)
            germ_cur["keys"][key] = (value, lineno, vcol)

    for key in ("variables", "map"):
        if key not in header:
            raise SpecParseError(f"missing required key {key!r}", 1, 1)
    name = header["name"][0].strip() if "name" in header else "unnamed"
    value, lineno, col = header["variables"]
    variables = tuple(s for s, _ in rd.split_list(value, lineno, col))
    for v, c in rd.split_list(value, lineno, col):
        if v not in KNOWN_VARIABLES:
            raise SpecParseError(f"unknown variable {v!r}", lineno, c + 1)
    if len(set(variables)) != len(variables):
        raise SpecParseError("repeated variable", lineno, col + 1)
    if len(variables) not in (2, 3):
        raise SpecParseError("two or three variables are supported", lineno, col + 1)

    value, lineno, col = header["map"]
    items = rd.split_list(value, lineno, col)
    if len(items) != len(variables):
        raise SpecParseError(f"map has {len(items)} components for {len(variables)} variables", lineno, col + 1)
    comps = []
    degrees = set()
    for s, c in items:
        p = _poly(s, variables, lineno, c)
        h = _homogeneous(p, lineno, c, f"component {s!r}")
        if h != ZERO_FLAG:
            degrees.add(h)
        comps.append(p)
    if len(degrees) > 1:
        raise SpecParseError(f"components have mixed degrees {sorted(degrees)}", lineno, col + 1)
    lines["map"] = lineno

    pc_out = None
    if has_pc:
        if len(variables) != 3:
            raise SpecParseError("[pc] needs a map of CP^2", pcs[0][2] if pcs else 1, 1)
        pc_out = []
        for label, value, lineno, col in pcs:
            if any(label == l for l, _ in pc_out):
                raise SpecParseError(f"duplicate component label {label!r}", lineno, 1)
            text_ = value.strip()
            c = col + len(value) - len(value.lstrip())
            p = _poly(text_, variables, lineno, c)
            h = _homogeneous(p, lineno, c, f"component {label!r}")
            if h == ZERO_FLAG or h < 1:
                raise SpecParseError(f"component {label!r} must have positive degree", lineno, c + 1)
            pc_out.append((label, p))
            lines[("pc", label)] = lineno
        pc_out = tuple(pc_out)

    curve_out = []
    for label, value, lineno, col in curves:
        if any(label == l for l, _ in curve_out):
            raise SpecParseError(f"duplicate curve label {label!r}", lineno, 1)
        items = rd.split_list(value, lineno, col)
        if len(items) != 3:
            raise SpecParseError("a curve parametrization has three forms", lineno, col + 1)
        forms = []
        degs = set()
        for s, c in items:
            p = _poly(s, CURVE_VARS, lineno, c)
            h = _homogeneous(p, lineno, c, f"form {s!r}")
            if h != ZERO_FLAG:
                degs.add(h)
                if len(degs) > 1:
                    raise SpecParseError(f"form {s!r} has degree {h}; curve forms must share one degree", lineno, c + 1)
            forms.append(p)
        curve_out.append((label, tuple(forms)))
        lines[("curve", label)] = lineno

    germ_out = []
    for g in germs:
        keys = g["keys"]
        for k in ("map", "relation"):
            if k not in keys:
                raise SpecParseError(f"germ {g['label']!r} lacks {k!r}", g["line"], 1)
        rel, lineno, col = keys["relation"]
        rel = rel.strip()
        if rel not in RELATIONS:
            raise SpecParseError(f"unknown relation {rel!r} (expected {', '.join(RELATIONS)})", lineno, col + 2)
        allowed = {"map", "relation", *RELATIONS[rel]}
        for k, (_, ln, _) in keys.items():
            if k not in allowed:
                raise SpecParseError(f"key {k!r} does not belong to a {rel} germ", ln, 1)
        value, lineno, col = keys["map"]
        items = rd.split_list(value, lineno, col)
        if len(items) != 2:
            raise SpecParseError("a plane germ has two components", lineno, col + 1)
        gmap = tuple(_poly(s, GERM_VARS, lineno, c) for s, c in items)
        branches = []
        for bk in RELATIONS[rel]:
            if bk not in keys:
                raise SpecParseError(f"{rel} germ {g['label']!r} lacks {bk!r}", g["line"], 1)
            value, lineno, col = keys[bk]
            items = rd.split_list(value, lineno, col)
            if len(items) != 2:
                raise SpecParseError("a branch parametrization has two series", lineno, col + 1)
            branches.append((bk, tuple(_poly(s, BRANCH_VARS, lineno, c) for s, c in items)))
        germ_out.append(GermSpec(g["label"], gmap, rel, tuple(branches)))
        lines[("germ", g["label"])] = g["line"]

    return MapSpec(name, variables, tuple(comps), pc_out, tuple(curve_out), tuple(germ_out), lines)


def _list(polys, variables):
    return "[" + ", ".join(format_poly(p, variables) for p in polys) + "]"


def serialize_map_spec(spec: MapSpec) -> str:
    """Canonical text; parsing it gives back an equal :class:`MapSpec`."""
    out = [f"name: {spec.name}", "variables: " + ", ".join(spec.variables),
           "map: " + _list(spec.components, spec.variables)]
    if spec.pc_components is not None:
        out += ["", "[pc]"]
        out += [f"{label}: {format_poly(p, spec.variables)}" for label, p in spec.pc_components]
    if spec.curves:
        out += ["", "[curves]"]
        out += [f"{label}: {_list(forms, CURVE_VARS)}" for label, forms in spec.curves]
    for g in spec.germs:
        out += ["", f"[germ {g.label}]", "map: " + _list(g.map, GERM_VARS), f"relation: {g.relation}"]
        out += [f"{k}: {_list(b, BRANCH_VARS)}" for k, b in g.branches]
    return "\n".join(out) + "\n"


def load_map_spec(path) -> MapSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_map_spec(fh.read())


def located(spec: MapSpec, key, exc: PcaError) -> SpecParseError:
    """Re-raise a validation error with the source line it came from."""
    return SpecParseError(str(exc), spec.lines.get(key))
