"""Recursive-descent parser for superpolynomial expressions.

Grammar (whitespace insignificant)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := atom ['^' INT]
    atom    := INT | NAME ['[' INT ']'] | '(' expr ')' | '-' atom

A bare NAME means jet order 0.  Division is only defined by a nonzero
constant.  Exponents are positive integers and are rejected on odd
atoms, where squaring would silently vanish.

``parse_expr`` and ``Poly.__str__`` are mutually inverse on canonical
forms: parsing the printed form of a polynomial reproduces it exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .context import Context
from .poly import Poly


class ParseError(Exception):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()\[\]]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ParseError("unexpected character", pos, text)
            break
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError("unexpected character", pos, text)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.text = text
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos, self.text)

    def fail(self, msg):
        raise ParseError(msg, self.peek()[2], self.text)

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail("trailing input")
        return p

    def expr(self) -> Poly:
        negate = False
        if self.peek()[:2] == ("op", "-"):
            self.next()
            negate = True
        p = self.term()
        if negate:
            p = -p
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.next()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.next()[1]
            q = self.factor()
            if op == "*":
                p = p * q
            else:
                c = q.constant_term()
                if len(q.terms) > 1 or (q.terms and not c):
                    self.fail("division is only defined by a nonzero constant")
                if not c:
                    self.fail("division by zero")
                p = p * Fraction(c.denominator, c.numerator)
        return p

    def factor(self) -> Poly:
        p = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.next()
            kind, val, pos = self.next()
            if kind != "int" or val < 1:
                raise ParseError("exponent must be a positive integer", pos, self.text)
            if p.parity() == 1:
                raise ParseError("cannot exponentiate an odd expression", pos, self.text)
            p = p ** val
        return p

    def atom(self) -> Poly:
        kind, val, pos = self.next()
        if kind == "int":
            return Poly.const(self.ctx, val)
        if kind == "name":
            order = 0
            if self.peek()[:2] == ("op", "["):
                self.next()
                k, v, p2 = self.next()
                if k != "int":
                    raise ParseError("jet order must be an integer", p2, self.text)
                order = v
                self.expect_op("]")
            return Poly.var(self.ctx, val, order)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError("expected a number, variable, or '('", pos, self.text)


def parse_expr(text: str, ctx: Context) -> Poly:
    """Parse an expression string into a :class:`Poly` over ``ctx``."""
    return _Parser(text, ctx).parse()
