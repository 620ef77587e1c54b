"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" INT)?
    atom    := INT ("/" INT)? | "x" | "y" | "z" | "w" | "i" | "(" expr ")"

``z`` and ``w`` name the same two slots as ``x`` and ``y``; an expression may
use one pair or the other, not both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import BiPoly, GaussianRational
from .errors import ExpressionSyntaxError

_SLOT = {"x": (1, 0), "y": (0, 1), "z": (1, 0), "w": (0, 1)}
_FAMILY = {"x": "xy", "y": "xy", "z": "zw", "w": "zw"}


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            line += 1
            col = 1
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            col += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            tokens.append(Token("int", text[start:pos], line, col))
            col += pos - start
            continue
        if ch.isalpha():
            start = pos
            while pos < len(text) and text[pos].isalnum():
                pos += 1
            word = text[start:pos]
            if word not in ("x", "y", "z", "w", "i"):
                raise ExpressionSyntaxError(f"unknown identifier {word!r}", line, col, text)
            tokens.append(Token("name", word, line, col))
            col += pos - start
            continue
        if ch in "+-*^/()":
            tokens.append(Token("op", ch, line, col))
            pos += 1
            col += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", line, col, text)
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.family: str | None = None

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None) -> ExpressionSyntaxError:
        tok = tok or self.tok
        return ExpressionSyntaxError(message, tok.line, tok.col, self.text)

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.pos += 1
            return True
        return False

    def parse(self) -> BiPoly:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return value

    def expr(self) -> BiPoly:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> BiPoly:
        value = self.unary()
        while self.accept("*"):
            value = value * self.unary()
        return value

    def unary(self) -> BiPoly:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> BiPoly:
        base = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "int":
                raise self.error("exponent must be a non-negative integer literal")
            self.pos += 1
            return base ** int(tok.text)
        return base

    def atom(self) -> BiPoly:
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            value = Fraction(int(tok.text))
            if self.accept("/"):
                den = self.tok
                if den.kind != "int":
                    raise self.error("expected integer denominator")
                if int(den.text) == 0:
                    raise self.error("zero denominator", den)
                self.pos += 1
                value = value / int(den.text)
            return BiPoly.const(value)
        if tok.kind == "name":
            self.pos += 1
            if tok.text == "i":
                return BiPoly.const(GaussianRational(0, 1))
            fam = _FAMILY[tok.text]
            if self.family is None:
                self.family = fam
            elif self.family != fam:
                raise self.error("cannot mix x/y with z/w variables", tok)
            i, j = _SLOT[tok.text]
            return BiPoly.monomial(i, j)
        if self.accept("("):
            value = self.expr()
            if not self.accept(")"):
                raise self.error("expected ')'")
            return value
        if tok.kind == "end":
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected token {tok.text!r}")


def parse_expression(text: str) -> BiPoly:
    """Parse a polynomial expression into an exact BiPoly."""
    return _Parser(text).parse()
