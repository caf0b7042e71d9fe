from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError
from . import nodes as N
from .evaluate import compile_np, eval_node
from .parser import parse_node


@dataclass(frozen=True)
class SmoothExpr:
    """A canonical expression tree in one positive variable plus a domain threshold.

    ``node`` is always canonical, so ``==`` is the structural equality test
    (equal implies same function; the converse is not guaranteed).
    """

    node: N.Node
    x0: float = 0.0

    def __post_init__(self):
        if self.x0 < 0:
            raise ValueError("x0 must be >= 0: the variable is taken to be positive")

    # construction ------------------------------------------------------
    @classmethod
    def parse(cls, text: str, x0: float = 0.0, var: str = "x") -> "SmoothExpr":
        return cls(parse_node(text, var=var), x0)

    @classmethod
    def const(cls, v) -> "SmoothExpr":
        return cls(N.const(v))

    @classmethod
    def var(cls) -> "SmoothExpr":
        return cls(N.X)

    @classmethod
    def from_raw(cls, node: N.Node, x0: float = 0.0) -> "SmoothExpr":
        return cls(N.canonical(node), x0)

    # algebra -----------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, SmoothExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return SmoothExpr(N.const(other))
        if isinstance(other, str):
            return SmoothExpr.parse(other)
        return NotImplemented

    def _join(self, other, node):
        return SmoothExpr(node, max(self.x0, other.x0))

    def __add__(self, other):
        o = self._lift(other)
        return self._join(o, N.add(self.node, o.node))

    __radd__ = __add__

    def __neg__(self):
        return SmoothExpr(N.mul(N.const(-1), self.node), self.x0)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return self._join(o, N.mul(self.node, o.node))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return self._join(o, N.mul(self.node, N.power(o.node, -1)))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, q):
        return SmoothExpr(N.power(self.node, Fraction(q)), self.x0)

    def exp(self):
        return SmoothExpr(N.exp_(self.node), self.x0)

    def log(self):
        return SmoothExpr(N.log_(self.node), self.x0)

    def sin(self):
        return SmoothExpr(N.sin_(self.node), self.x0)

    def cos(self):
        return SmoothExpr(N.cos_(self.node), self.x0)

    def compose(self, inner: "SmoothExpr") -> "SmoothExpr":
        return SmoothExpr(N.substitute(self.node, inner.node), max(self.x0, inner.x0))

    # calculus / evaluation --------------------------------------------
    def diff(self, order: int = 1) -> "SmoothExpr":
        return diff(self, order)

    def __call__(self, x, precision_bits: int = 53):
        return evaluate(self, x, precision_bits)

    def numpy(self):
        return compile_np(self.node)

    # inspection --------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.node == N.ZERO

    @property
    def is_constant(self) -> bool:
        return not N.has_var(self.node)

    def to_str(self, var: str = "x") -> str:
        return N.to_str(self.node, var)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"SmoothExpr({self.to_str()!r})"


def parse(text: str, x0: float = 0.0) -> SmoothExpr:
    return SmoothExpr.parse(text, x0)


def diff(expr: SmoothExpr, order: int = 1) -> SmoothExpr:
    if order < 0:
        raise ValueError("order must be >= 0")
    n = expr.node
    for _ in range(order):
        n = N.derivative(n)
    return SmoothExpr(n, expr.x0)


def evaluate(expr: SmoothExpr, x, precision_bits: int = 53):
    """mpmath value of ``expr`` at ``x`` (relative error <= 2^(-precision_bits+4))."""
    if x <= expr.x0:
        raise DomainError(f"x={x} is not above the domain threshold {expr.x0}")
    return eval_node(expr.node, x, precision_bits)


def polynomial_coeffs(expr: SmoothExpr) -> list[SmoothExpr]:
    """Coefficients [c0, c1, ...] if expr is a polynomial in x with constant coefficients."""
    terms = expr.node.terms if isinstance(expr.node, N.Add) else (expr.node,)
    coeffs: dict[int, list] = {}
    for t in terms:
        if t == N.ZERO:
            continue
        fs = t.factors if isinstance(t, N.Mul) else (t,)
        deg, rest = 0, []
        for f in fs:
            if f == N.X:
                deg += 1
            elif isinstance(f, N.Pow) and f.base == N.X:
                if f.exp.denominator != 1 or f.exp < 0:
                    raise DomainError(f"{N.to_str(t)} is not a polynomial term")
                deg += int(f.exp)
            elif N.has_var(f):
                raise DomainError(f"{N.to_str(t)} is not a polynomial term")
            else:
                rest.append(f)
        coeffs.setdefault(deg, []).extend([N.mul(*rest)] if rest else [N.ONE])
    if not coeffs:
        return []
    top = max(coeffs)
    return [SmoothExpr(N.add(*coeffs.get(j, [N.ZERO]))) for j in range(top + 1)]
