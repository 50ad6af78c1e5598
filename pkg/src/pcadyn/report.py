"""Machine-readable audit reports.

Reports are plain dicts serialized with sorted keys.  Exact rationals become
``"p/q"`` strings, floats keep Python's shortest round-trip repr and complex
numbers become ``{"re": .., "im": ..}``.  No timestamps are written, so two
runs on the same input give identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__

SCHEMA_ID = "pcadyn.audit/1"

_NUM = {
    "oneOf": [
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"},
        {"type": "number"},
        {
            "type": "object",
            "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
            "required": ["re", "im"],
            "additionalProperties": False,
        },
    ]
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "tool", "version", "command", "verdict", "notes"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "tool": {"const": "pcadyn"},
        "version": {"type": "string"},
        "command": {"type": "string"},
        "verdict": {"enum": ["PASS", "FAIL-DICHOTOMY", "REFUSED", "ERROR", "INFO"]},
        "notes": {"type": "array", "items": {"type": "string"}},
        "tolerances": {"type": "object"},
        "map": {
            "type": "object",
            "required": ["name", "variables", "components", "degree"],
            "properties": {
                "name": {"type": "string"},
                "variables": {"type": "array", "items": {"type": "string"}},
                "components": {"type": "array", "items": {"type": "string"}},
                "degree": {"type": "integer"},
            },
        },
        "pca": {
            "type": ["object", "null"],
            "required": ["status"],
            "properties": {"status": {"enum": ["certified", "refused"]}},
        },
        "fixed_points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["point", "residual", "eigenvalues", "classes", "violations"],
                "properties": {
                    "point": {"type": "array", "items": _NUM},
                    "residual": {"type": "number"},
                    "eigenvalues": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                    "classes": {"type": "array", "items": {"type": "string"}},
                    "violations": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "curves": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "lift", "degree", "pcf", "fixed_points", "verdict"],
            },
        },
        "germs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "relation", "passed", "summary", "eigenvalues"],
            },
        },
        "error": {
            "type": "object",
            "required": ["type", "message"],
        },
    },
}


def number(x):
    """JSON form of an exact or numeric scalar."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    z = complex(x)
    re, im = z.real + 0.0, z.imag + 0.0
    if im == 0.0:
        return re
    return {"re": re, "im": im}


def base_report(command: str) -> dict:
    return {
        "schema": SCHEMA_ID,
        "tool": "pcadyn",
        "version": __version__,
        "command": command,
        "verdict": "INFO",
        "notes": [],
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"

