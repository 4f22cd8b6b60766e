"""Parsing of polynomial, element and point strings.

Grammar (ASCII):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := ('-' | '+') factor | atom ('^' integer)?
    atom    := '(' expr ')' | integer | 'X' index | 'z' order

'Xk' is the k-th affine coordinate (1-based), 'zm' denotes a primitive
m-th root of unity.  Division is only allowed by constants.  Examples:
"X1^2 - 1", "(1/2)*z12^3*X1 - X2^2".
"""

from __future__ import annotations

import re
from fractions import Fraction

from .cyclotomic import CyclotomicElement
from .heights import AffinePoint
from .polynomials import MultiPoly


class PolyParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>X\d+)|(?P<zeta>z\d+)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise PolyParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group("num"):
            tokens.append(("num", int(m.group("num")), m.start("num")))
        elif m.group("var"):
            tokens.append(("var", int(m.group("var")[1:]), m.start("var")))
        elif m.group("zeta"):
            tokens.append(("zeta", int(m.group("zeta")[1:]), m.start("zeta")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


def _zeta_allowed(m: int, field_order: int) -> bool:
    # mu(Q(zeta_n)) is mu_n for even n and mu_2n for odd n
    if field_order % 2 == 0:
        return field_order % m == 0
    return (2 * field_order) % m == 0


class _Parser:
    def __init__(self, text: str, nvars: int, field_order: int):
        self.tokens = _tokenize(text)
        self.idx = 0
        self.nvars = nvars
        self.field_order = field_order

    def peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise PolyParseError("unexpected end of input")
        self.idx += 1
        return tok

    def expect_op(self, op):
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise PolyParseError(f"expected {op!r}", tok[2])

    def parse(self) -> MultiPoly:
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            raise PolyParseError(f"trailing input {tok[1]!r}", tok[2])
        return value

    def expr(self) -> MultiPoly:
        value = self.term()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.next()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self) -> MultiPoly:
        value = self.factor()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "*/":
                self.next()
                rhs = self.factor()
                if tok[1] == "*":
                    value = value * rhs
                else:
                    if not rhs.is_constant():
                        raise PolyParseError("division only by constants", tok[2])
                    c = rhs.constant_value()
                    if not c:
                        raise PolyParseError("division by zero", tok[2])
                    value = value.scale(c.inverse())
            else:
                return value

    def factor(self) -> MultiPoly:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            self.next()
            value = self.factor()
            return value if tok[1] == "+" else -value
        value = self.atom()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.next()
            etok = self.next()
            if etok[0] != "num":
                raise PolyParseError("exponent must be a nonnegative integer", etok[2])
            value = value ** etok[1]
        return value

    def atom(self) -> MultiPoly:
        tok = self.next()
        if tok[0] == "op" and tok[1] == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        if tok[0] == "num":
            return MultiPoly.constant(self.nvars, tok[1])
        if tok[0] == "var":
            index = tok[1]
            if not 1 <= index <= self.nvars:
                raise PolyParseError(
                    f"X{index} out of range for {self.nvars} variables", tok[2]
                )
            return MultiPoly.variable(index - 1, self.nvars)
        if tok[0] == "zeta":
            m = tok[1]
            if m < 1:
                raise PolyParseError("root order must be positive", tok[2])
            if not _zeta_allowed(m, self.field_order):
                raise PolyParseError(
                    f"z{m} does not lie in Q(zeta_{self.field_order})", tok[2]
                )
            return MultiPoly.constant(self.nvars, CyclotomicElement.zeta(m))
        raise PolyParseError(f"unexpected token {tok[1]!r}", tok[2])


def parse_polynomial(text: str, nvars: int, field_order: int = 1) -> MultiPoly:
    return _Parser(text, nvars, field_order).parse()


def parse_element(text: str, field_order: int = 1) -> CyclotomicElement:
    poly = _Parser(text, 1, field_order).parse()
    return poly.constant_value()


def parse_point(text: str, field_order: int = 1) -> AffinePoint:
    """Comma-separated coordinates, each an element expression."""
    parts = [p for p in text.split(",")]
    if not parts or not text.strip():
        raise PolyParseError("empty point")
    return AffinePoint([parse_element(p, field_order) for p in parts])
