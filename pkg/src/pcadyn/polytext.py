"""Text format for polynomials.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := INT ('/' INT)? | VAR | '(' expr ')'

Variables come from ``x y z w s t``; juxtaposition such as ``2x`` is rejected.
Example: ``x^2*y - 3/2*z^3``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SpecParseError
from .poly import MultiPoly

KNOWN_VARIABLES = ("x", "y", "z", "w", "s", "t")


class _Parser:
    def __init__(self, text, variables, line=None, col_offset=0):
        self.text = text
        self.variables = tuple(variables)
        self.arity = len(self.variables)
        self.pos = 0
        self.line = line
        self.col_offset = col_offset

    def error(self, msg, pos=None):
        pos = self.pos if pos is None else pos
        raise SpecParseError(msg, self.line, self.col_offset + pos + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def integer(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def parse(self):
        if not self.peek():
            self.error("empty polynomial")
        p = self.expr()
        if self.peek():
            ch = self.peek()
            if ch.isalnum() or ch == "(":
                self.error(f"juxtaposition is not allowed (missing '*' before {ch!r})")
            self.error(f"unexpected character {ch!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek() == "*":
            self.pos += 1
            p = p * self.unary()
        return p

    def unary(self):
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return -self.unary()
        if ch == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.integer()
        return base

    def atom(self):
        ch = self.peek()
        if not ch:
            self.error("unexpected end of input")
        if ch.isdigit():
            num = self.integer()
            if self.peek() == "/":
                self.pos += 1
                at = self.pos
                den = self.integer()
                if den == 0:
                    self.error("zero denominator", at)
                return MultiPoly.constant(self.arity, Fraction(num, den))
            return MultiPoly.constant(self.arity, num)
        if ch == "(":
            self.pos += 1
            p = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return p
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalnum():
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.variables:
                self.error(f"unknown variable {name!r}", start)
            return MultiPoly.variable(self.arity, self.variables.index(name))
        self.error(f"unexpected character {ch!r}")


def parse_poly(text: str, variables: Sequence[str] = ("x", "y", "z"), *, line=None, column=0) -> MultiPoly:
    """Parse ``text`` into a :class:`MultiPoly` over ``variables``.

    ``line``/``column`` only affect the location reported in errors.
    """
    for v in variables:
        if v not in KNOWN_VARIABLES:
            raise SpecParseError(f"variable {v!r} is not one of {', '.join(KNOWN_VARIABLES)}", line)
    return _Parser(text, variables, line, column).parse()


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: MultiPoly, variables: Sequence[str] | None = None) -> str:
    if variables is None:
        variables = KNOWN_VARIABLES[: p.arity] if p.arity <= 3 else tuple(f"x{i}" for i in range(p.arity))
    if p.is_zero:
        return "0"
    parts = []
    for mono, c in p.sorted_terms():
        factors = []
        for v, e in zip(variables, mono):
            if e == 1:
                factors.append(v)
            elif e > 1:
                factors.append(f"{v}^{e}")
        mag = abs(c)
        if not factors:
            body = format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = format_rational(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)
