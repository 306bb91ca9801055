"""Recursive-descent parser for the polynomial text grammar.

    expr    ::= [sign] term { sign term }
    term    ::= factor { "*" factor }
    factor  ::= sign factor | atom [ "^" INT ]
    atom    ::= INT [ "/" INT ] | VAR | "(" expr ")"
    sign    ::= "+" | "-"
    VAR     ::= "x" INT "_" INT | "u" INT
    INT     ::= digit { digit }

Whitespace is ignored.  ``x<m>_<i>`` is coordinate i of memory cell m;
``u<i>`` is coordinate i of a point (alphabet equations).
"""

from __future__ import annotations

import re
from typing import Sequence

from .poly import MultiPoly

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x\d+_\d+|u\d+)|(?P<op>[-+*^/()]))")


class PolySyntaxError(ValueError):
    def __init__(self, message, column):
        super().__init__(f"column {column}: {message}")
        self.message = message
        self.column = column


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise PolySyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        col = m.start(kind) + 1
        toks.append((kind, m.group(kind), col))
        pos = m.end()
    toks.append(("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text, field, variables):
        self.toks = _tokenize(text)
        self.i = 0
        self.field = field
        self.variables = tuple(variables)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val, col = self.take()
        if kind != "op" or val != op:
            raise PolySyntaxError(f"expected {op!r}, found {val or 'end of input'!r}", col)

    def const(self, value):
        return MultiPoly.constant(self.field, self.variables, value)

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.factor()
            return -f if val == "-" else f
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, col = self.take()
            if kind != "int":
                raise PolySyntaxError("exponent must be a nonnegative integer", col)
            return base ** int(val)
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "int":
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, c3 = self.take()
                if k3 != "int":
                    raise PolySyntaxError("denominator must be an integer literal", c3)
                if int(v3) == 0:
                    raise PolySyntaxError("division by zero", c3)
                from fractions import Fraction
                return self.const(Fraction(num, int(v3)))
            return self.const(num)
        if kind == "var":
            if val not in self.variables:
                raise PolySyntaxError(f"undeclared variable {val}", col)
            return MultiPoly.var(self.field, self.variables, val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise PolySyntaxError(f"unexpected {val or 'end of input'!r}", col)


def parse_polynomial(text: str, field, variables: Sequence[str]) -> MultiPoly:
    p = _Parser(text, field, variables)
    out = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise PolySyntaxError(f"unexpected {val!r}", col)
    return out
