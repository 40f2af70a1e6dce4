"""Recursive descent parser for polynomial expressions.

Grammar (whitespace-insensitive)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := int ('/' uint)? | var | '(' expr ')'

Errors report the byte offset of the offending character.
"""
from __future__ import annotations

from typing import Sequence

from ..errors import PolySyntaxError, UnknownVariable
from .poly import MultiPoly
from .rational import QQ


class _Parser:
    def __init__(self, text: str, context: tuple):
        self.text = text
        self.context = context
        self.pos = 0

    def offset(self, pos: int | None = None) -> int:
        pos = self.pos if pos is None else pos
        return len(self.text[:pos].encode("utf-8"))

    def fail(self, msg: str, pos: int | None = None):
        raise PolySyntaxError(msg, self.offset(pos))

    def skip(self):
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def uint(self) -> int:
        self.skip()
        start = self.pos
        t = self.text
        while self.pos < len(t) and t[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected unsigned integer")
        return int(t[start:self.pos])

    def expr(self) -> MultiPoly:
        sign = 1
        ch = self.peek()
        if ch in "+-" and ch:
            self.pos += 1
            sign = -1 if ch == "-" else 1
        acc = self.term() * sign
        while True:
            ch = self.peek()
            if ch and ch in "+-":
                self.pos += 1
                t = self.term()
                acc = acc + t if ch == "+" else acc - t
            else:
                return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            acc = acc * self.factor()
        return acc

    def factor(self) -> MultiPoly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.uint()
        return base

    def atom(self) -> MultiPoly:
        ch = self.peek()
        t = self.text
        if not ch:
            self.fail("unexpected end of input")
        if ch.isdigit():
            num = self.uint()
            if self.peek() == "/":
                self.pos += 1
                den = self.uint()
                if den == 0:
                    self.fail("zero denominator", self.pos - 1)
                return MultiPoly.const(QQ(num, den), self.context)
            return MultiPoly.const(num, self.context)
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(t) and (t[self.pos].isalnum() or t[self.pos] == "_"):
                self.pos += 1
            name = t[start:self.pos]
            if name not in self.context:
                raise UnknownVariable(name)
            return MultiPoly.var(name, self.context)
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.pos += 1
            return inner
        self.fail(f"unexpected character {ch!r}")


def parse_poly(text: str, context: Sequence[str]) -> MultiPoly:
    """Parse ``text`` into a canonical polynomial over ``context``."""
    p = _Parser(text, tuple(context))
    result = p.expr()
    if p.peek():
        p.fail(f"unexpected character {p.peek()!r}")
    return result
