"""Exact reals in the Q-span of {1, sqrt2, sqrt3, sqrt5, pi, e}.

The golden ratio enters as 1/2 + sqrt5/2.  The named irrationals are assumed
Q-linearly independent together with 1, which makes "x in Z" decidable.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from ..errors import UndecidableFrequency
from ..fn import nodes as fnn
from ..fn.parser import parse_node

BASIS = ("sqrt2", "sqrt3", "sqrt5", "pi", "e")
_SQRT = {2: "sqrt2", 3: "sqrt3", 5: "sqrt5"}
_FIXED_ONE = 1 << 64


class ExactReal:
    __slots__ = ("rat", "irr", "_hash")

    def __init__(self, rat=0, irr=None):
        self.rat = Fraction(rat)
        self.irr = tuple(sorted((k, Fraction(v)) for k, v in (irr or {}).items() if v != 0))
        self._hash = hash((self.rat, self.irr))

    @classmethod
    def parse(cls, text) -> "ExactReal":
        if isinstance(text, ExactReal):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(text)
        tree = parse_node(str(text), extra_idents={"phi", "pi", "e"}, var="\0", raw=True)
        return _from_node(tree)

    # ---------------------------------------------------------------- arithmetic
    def __add__(self, other):
        other = _lift(other)
        irr = dict(self.irr)
        for k, v in other.irr:
            irr[k] = irr.get(k, 0) + v
        return ExactReal(self.rat + other.rat, irr)

    __radd__ = __add__

    def __neg__(self):
        return ExactReal(-self.rat, {k: -v for k, v in self.irr})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, r):
        if isinstance(r, ExactReal):
            if r.irr and self.irr:
                raise UndecidableFrequency("product of two irrational reals leaves the span")
            if r.irr:
                return r * self.rat
            r = r.rat
        r = Fraction(r)
        return ExactReal(self.rat * r, {k: v * r for k, v in self.irr})

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _lift(other)
        except TypeError:
            return NotImplemented
        return self.rat == other.rat and self.irr == other.irr

    def __hash__(self):
        return self._hash

    # ---------------------------------------------------------------- queries
    @property
    def is_rational(self) -> bool:
        return not self.irr

    @property
    def is_integer(self) -> bool:
        """Exact test, using the independence of the basis."""
        return not self.irr and self.rat.denominator == 1

    def frac(self) -> "ExactReal":
        """Representative mod 1: the rational part reduced into [0, 1)."""
        return ExactReal(self.rat - math.floor(self.rat), dict(self.irr))

    def value(self, prec: int = 128):
        with mpmath.workprec(prec):
            acc = mpmath.mpf(self.rat.numerator) / self.rat.denominator
            for k, v in self.irr:
                acc += (mpmath.mpf(v.numerator) / v.denominator) * _basis_value(k)
            return acc

    def __float__(self):
        return float(self.value(80))

    def fixed(self, bits: int = 64) -> int:
        """frac(x) * 2^bits rounded down, as an unsigned fixed-point phase."""
        one = 1 << bits
        if not self.irr:
            r = self.rat - math.floor(self.rat)
            return (r.numerator << bits) // r.denominator
        with mpmath.workprec(bits + 128):
            v = self.value(bits + 128)
            return int(mpmath.floor((v - mpmath.floor(v)) * one)) % one

    def double_double(self):
        """(hi, lo) float pair with hi + lo = x to about 2^-106 relative."""
        with mpmath.workprec(160):
            v = self.value(160)
            hi = float(v)
            return hi, float(v - hi)

    def __str__(self):
        parts = []
        if self.rat or not self.irr:
            parts.append(str(self.rat))
        for k, v in self.irr:
            name = {"sqrt2": "sqrt(2)", "sqrt3": "sqrt(3)", "sqrt5": "sqrt(5)"}.get(k, k)
            parts.append(name if v == 1 else f"({v})*{name}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ExactReal({str(self)!r})"


def _lift(x) -> ExactReal:
    if isinstance(x, ExactReal):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactReal(x)
    raise TypeError(f"cannot lift {type(x).__name__} to ExactReal")


def _basis_value(k):
    if k.startswith("sqrt"):
        return mpmath.sqrt(int(k[4:]))
    return +mpmath.pi if k == "pi" else +mpmath.e


def _from_node(n) -> ExactReal:
    if isinstance(n, fnn.Const):
        return ExactReal(n.value)
    if isinstance(n, fnn.Named):
        if n.name == "phi":
            return ExactReal(Fraction(1, 2), {"sqrt5": Fraction(1, 2)})
        return ExactReal(0, {n.name: 1})
    if isinstance(n, fnn.Exp) and n.arg == fnn.Const(Fraction(1)):
        return ExactReal(0, {"e": 1})
    if isinstance(n, fnn.Pow) and isinstance(n.base, fnn.Const) and n.exp == Fraction(1, 2):
        k = n.base.value
        if k.denominator == 1 and k > 0:
            k = int(k)
            root = math.isqrt(k)
            if root * root == k:
                return ExactReal(root)
            for s, name in _SQRT.items():
                if k % s == 0 and math.isqrt(k // s) ** 2 == k // s:
                    return ExactReal(0, {name: math.isqrt(k // s)})
    if isinstance(n, fnn.Add):
        out = ExactReal()
        for t in n.terms:
            out = out + _from_node(t)
        return out
    if isinstance(n, fnn.Sub):
        return _from_node(n.left) - _from_node(n.right)
    if isinstance(n, fnn.Mul):
        out = ExactReal(1)
        for f in n.factors:
            out = out * _from_node(f)
        return out
    if isinstance(n, fnn.Div):
        den = _from_node(n.den)
        if den.is_rational and den.rat != 0:
            return _from_node(n.num) * (1 / den.rat)
    raise UndecidableFrequency(f"{fnn.to_str(n)} is outside the Q-span of 1, sqrt2, sqrt3,"
                               " sqrt5, pi, e")
