"""Infix grammar shared by every config file and CLI subcommand.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          (right associative, '**' accepted)
    atom   := number | ident | func '(' expr ')' | '(' expr ')'

Identifiers are ``x``, ``pi``, ``e`` and the functions sqrt/exp/log/sin/cos.
Decimal literals are read as exact rationals.  ``extra_idents`` lets callers
admit extra symbols (generators in PET tuple files); they come back as
``Named`` leaves.
"""
from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError
from .nodes import (Add, Const, Cos, Div, Exp, Log, Mul, Named, Node, Pow, Sin, Sub,
                    Var, canonical)

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")
FUNCS = {"exp": Exp, "log": Log, "sin": Sin, "cos": Cos, "sqrt": None}


def tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", Fraction(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, extra_idents=(), var: str = "x"):
        self.toks = tokenize(text)
        self.i = 0
        self.extra = set(extra_idents)
        self.var = var

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} at token {self.i}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        if not self.toks:
            raise ParseError("empty expression")
        n = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.i}: {self.peek()[1]!r}")
        return n

    def expr(self):
        n = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            r = self.term()
            n = Add((n, r)) if op == "+" else Sub(n, r)
        return n

    def term(self):
        n = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            r = self.unary()
            n = Mul((n, r)) if op == "*" else Div(n, r)
        return n

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return Mul((Const(Fraction(-1)), self.unary()))
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            ex = canonical(self.unary())
            if isinstance(ex, Const):
                return Pow(base, ex.value)
            return Exp(Mul((ex, Log(base))))
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Const(val)
        if kind == "op" and val == "(":
            self.take()
            n = self.expr()
            self.take("op", ")")
            return n
        if kind == "id":
            self.take()
            if val in FUNCS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return Pow(arg, Fraction(1, 2)) if val == "sqrt" else FUNCS[val](arg)
            if val == self.var:
                return Var()
            if val in ("pi", "e"):
                return Named(val)
            if val in self.extra:
                return Named(val)
            raise ParseError(f"unknown identifier {val!r}")
        raise ParseError(f"unexpected token {val!r}")


def parse_node(text: str, extra_idents=(), var: str = "x", raw: bool = False) -> Node:
    n = _Parser(text, extra_idents, var).parse()
    return n if raw else canonical(n)
