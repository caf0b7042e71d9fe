"""Exact polynomials over Q in opaque generators (log N, 1/N, pi, ...)."""
from __future__ import annotations

from fractions import Fraction

from ..errors import ParseError
from ..fn import nodes as fnn
from ..fn.parser import parse_node


def _norm(c):
    """Integral rationals are stored as int: int arithmetic is much cheaper."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class CoeffExpr:
    """Normal form: sorted tuple of (monomial, coefficient), monomial = sorted ((gen, exp), ...).

    Zero is the empty tuple, so equality and zero tests are exact.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = tuple(sorted((m, _norm(c)) for m, c in terms.items() if c != 0))
        self.terms = terms
        self._hash = hash(terms)

    @classmethod
    def const(cls, c) -> "CoeffExpr":
        c = _norm(Fraction(c))
        return cls(((((), c),)) if c != 0 else ())

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "CoeffExpr":
        return cls(((((name, power),), 1),))

    # ---------------------------------------------------------------- ring ops
    def _dict(self):
        return dict(self.terms)

    def __add__(self, other: "CoeffExpr") -> "CoeffExpr":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = self._dict()
        for m, c in other.terms:
            out[m] = out.get(m, 0) + c
        return CoeffExpr(out)

    def __neg__(self) -> "CoeffExpr":
        return CoeffExpr(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "CoeffExpr") -> "CoeffExpr":
        return self + (-other)

    def scale(self, r) -> "CoeffExpr":
        if r == 1 or not self.terms:
            return self
        if r == 0:
            return ZERO
        if r == -1:
            return -self
        r = _norm(r) if type(r) is Fraction else r
        return CoeffExpr(tuple((m, _norm(c * r)) for m, c in self.terms))

    def __mul__(self, other):
        if not isinstance(other, CoeffExpr):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                mono = dict(m1)
                for g, e in m2:
                    mono[g] = mono.get(g, 0) + e
                key = tuple(sorted(mono.items()))
                out[key] = out.get(key, 0) + c1 * c2
        return CoeffExpr(out)

    __rmul__ = __mul__

    # ---------------------------------------------------------------- queries
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def generators(self) -> set:
        return {g for m, _ in self.terms for g, _ in m}

    @property
    def is_rational(self) -> bool:
        return all(m == () for m, _ in self.terms)

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} depends on generators")
        return Fraction(self.terms[0][1]) if self.terms else Fraction(0)

    def flat(self, coord: int = 0) -> dict:
        return {(coord, m): c for m, c in self.terms}

    def __eq__(self, other):
        return isinstance(other, CoeffExpr) and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.terms < other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            mono = "*".join(g if e == 1 else f"{g}^{e}" for g, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                cs = str(c) if Fraction(c).denominator == 1 else f"({c})"
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"CoeffExpr({str(self)!r})"


ZERO = CoeffExpr()
ONE = CoeffExpr.const(1)


def parse_coeff(text: str, generators=()) -> CoeffExpr:
    """Parse the expression grammar restricted to polynomials in the generators."""
    gens = set(generators) | {"pi", "e"}
    tree = parse_node(str(text), extra_idents=gens, var="\0", raw=True)
    return _to_coeff(tree)


def _to_coeff(n) -> CoeffExpr:
    if isinstance(n, fnn.Const):
        return CoeffExpr.const(n.value)
    if isinstance(n, fnn.Named):
        return CoeffExpr.gen(n.name)
    if isinstance(n, fnn.Add):
        out = ZERO
        for t in n.terms:
            out = out + _to_coeff(t)
        return out
    if isinstance(n, fnn.Sub):
        return _to_coeff(n.left) - _to_coeff(n.right)
    if isinstance(n, fnn.Mul):
        out = ONE
        for f in n.factors:
            out = out * _to_coeff(f)
        return out
    if isinstance(n, fnn.Div):
        den = _to_coeff(n.den)
        if not den.is_rational or den.is_zero:
            raise ParseError("division only by nonzero rational constants")
        return _to_coeff(n.num).scale(1 / den.rational())
    if isinstance(n, fnn.Pow) and n.exp.denominator == 1 and n.exp >= 0:
        base, out = _to_coeff(n.base), ONE
        for _ in range(int(n.exp)):
            out = out * base
        return out
    raise ParseError(f"not a polynomial in the generators: {fnn.to_str(n)}")
