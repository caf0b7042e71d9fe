"""Expression nodes and the canonical rewrite set.

Raw trees may contain any node type.  ``canonical`` maps a raw tree onto the
canonical subset (no Sub, Div or Compose; flattened and sorted Add/Mul; like
terms merged; products distributed over sums), which is what structural
equality is tested on.  The variable is assumed positive (domain x > x0 >= 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math


class Node:
    __slots__ = ()
    rank = 99


@dataclass(frozen=True)
class Var(Node):
    rank = 2


@dataclass(frozen=True)
class Const(Node):
    value: Fraction
    rank = 0


@dataclass(frozen=True)
class Named(Node):
    name: str  # "pi" or "e"; canonical form keeps only "pi"
    rank = 1


@dataclass(frozen=True)
class Add(Node):
    terms: tuple
    rank = 5


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node
    rank = 11


@dataclass(frozen=True)
class Mul(Node):
    factors: tuple
    rank = 4


@dataclass(frozen=True)
class Div(Node):
    num: Node
    den: Node
    rank = 12


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exp: Fraction
    rank = 3


@dataclass(frozen=True)
class Exp(Node):
    arg: Node
    rank = 6


@dataclass(frozen=True)
class Log(Node):
    arg: Node
    rank = 7


@dataclass(frozen=True)
class Sin(Node):
    arg: Node
    rank = 8


@dataclass(frozen=True)
class Cos(Node):
    arg: Node
    rank = 9


@dataclass(frozen=True)
class Compose(Node):
    """outer(inner(x))."""

    outer: Node
    inner: Node
    rank = 10


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
X = Var()
PI = Named("pi")
E = Exp(ONE)
UNARY = {Exp: "exp", Log: "log", Sin: "sin", Cos: "cos"}
MAX_EXPAND = 8


def const(v) -> Const:
    return Const(Fraction(v))


@lru_cache(maxsize=None)
def sort_key(n: Node) -> tuple:
    if isinstance(n, Const):
        return (0, n.value)
    if isinstance(n, Named):
        return (1, n.name)
    if isinstance(n, Var):
        return (2,)
    if isinstance(n, Pow):
        return (3, sort_key(n.base), n.exp)
    if isinstance(n, (Mul, Add)):
        items = n.factors if isinstance(n, Mul) else n.terms
        return (n.rank, tuple(sort_key(c) for c in items))
    if isinstance(n, (Exp, Log, Sin, Cos)):
        return (n.rank, sort_key(n.arg))
    if isinstance(n, Compose):
        return (10, sort_key(n.outer), sort_key(n.inner))
    if isinstance(n, Sub):
        return (11, sort_key(n.left), sort_key(n.right))
    if isinstance(n, Div):
        return (12, sort_key(n.num), sort_key(n.den))
    raise TypeError(n)


def known_positive(n: Node) -> bool:
    if isinstance(n, Const):
        return n.value > 0
    if isinstance(n, (Var, Named, Exp)):
        return True
    if isinstance(n, Pow):
        return known_positive(n.base)
    if isinstance(n, Mul):
        return all(known_positive(f) for f in n.factors)
    if isinstance(n, Add):
        return all(known_positive(t) for t in n.terms)
    return False


def has_var(n: Node) -> bool:
    if isinstance(n, Var):
        return True
    if isinstance(n, (Const, Named)):
        return False
    return any(has_var(c) for c in children(n))


def children(n: Node) -> tuple:
    if isinstance(n, Add):
        return n.terms
    if isinstance(n, Mul):
        return n.factors
    if isinstance(n, Pow):
        return (n.base,)
    if isinstance(n, (Exp, Log, Sin, Cos)):
        return (n.arg,)
    if isinstance(n, Sub):
        return (n.left, n.right)
    if isinstance(n, Div):
        return (n.num, n.den)
    if isinstance(n, Compose):
        return (n.outer, n.inner)
    return ()


# ---------------------------------------------------------------- canonical

def split_coeff(n: Node):
    """n = c * rest with c rational; rest is None for constants."""
    if isinstance(n, Const):
        return n.value, None
    if isinstance(n, Mul) and isinstance(n.factors[0], Const):
        rest = n.factors[1:]
        return n.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), n


def _scaled(c: Fraction, rest: Node) -> Node:
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.factors)
    return Mul((Const(c), rest))


def add(*args: Node) -> Node:
    flat = []
    for a in args:
        flat.extend(a.terms if isinstance(a, Add) else (a,))
    total = Fraction(0)
    merged: dict = {}
    for t in flat:
        c, rest = split_coeff(t)
        if rest is None:
            total += c
        else:
            merged[rest] = merged.get(rest, Fraction(0)) + c
    out = [_scaled(c, r) for r, c in merged.items() if c != 0]
    out.sort(key=sort_key)
    if total != 0:
        out.insert(0, Const(total))
    if not out:
        return ZERO
    return out[0] if len(out) == 1 else Add(tuple(out))


def mul(*args: Node) -> Node:
    flat = []
    for a in args:
        flat.extend(a.factors if isinstance(a, Mul) else (a,))
    for i, f in enumerate(flat):
        if isinstance(f, Add):
            others = flat[:i] + flat[i + 1:]
            return add(*(mul(t, *others) for t in f.terms))
    coeff = Fraction(1)
    bases: dict = {}
    exp_args = []
    for f in flat:
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Exp):
            exp_args.append(f.arg)
        elif isinstance(f, Pow):
            bases[f.base] = bases.get(f.base, Fraction(0)) + f.exp
        else:
            bases[f] = bases.get(f, Fraction(0)) + 1
    if coeff == 0:
        return ZERO
    pieces = [power(b, q) for b, q in bases.items()]
    if exp_args:
        pieces.append(exp_(add(*exp_args)))
    if any(isinstance(p, Add) for p in pieces):
        return mul(Const(coeff), *pieces)
    out = []
    for p in pieces:
        for g in (p.factors if isinstance(p, Mul) else (p,)):
            if isinstance(g, Const):
                coeff *= g.value
            else:
                out.append(g)
    if coeff == 0:
        return ZERO
    out.sort(key=sort_key)
    if not out:
        return Const(coeff)
    if coeff == 1 and len(out) == 1:
        return out[0]
    return Mul(((Const(coeff),) if coeff != 1 else ()) + tuple(out))


def _squarefree_split(n: int):
    """n = s^2 * k with k squarefree."""
    s, k, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            s *= p
            n //= p * p
        if n % p == 0:
            k *= p
            n //= p
        p += 1
    return s, k * n


def power(b: Node, q) -> Node:
    q = Fraction(q)
    if q == 0:
        return ONE
    if q == 1:
        return b
    if isinstance(b, Const):
        v = b.value
        if v == 0:
            return ZERO if q > 0 else Pow(b, q)
        if q.denominator == 1:
            return Const(v ** q.numerator)
        if v < 0:
            return Pow(b, q)
        if q.denominator == 2:
            r = v ** q.numerator
            s, k = _squarefree_split(r.numerator * r.denominator)
            c = Fraction(s, r.denominator)
            if k == 1:
                return Const(c)
            root = Pow(Const(Fraction(k)), Fraction(1, 2))
            return root if c == 1 else Mul((Const(c), root))
        whole = math.floor(q)
        frac = q - whole
        if whole == 0:
            return Pow(b, q)
        return Mul((Const(v ** whole), Pow(b, frac)))
    if isinstance(b, Pow):
        if q.denominator == 1 or known_positive(b.base):
            return power(b.base, b.exp * q)
        return Pow(b, q)
    if isinstance(b, Exp):
        return exp_(mul(Const(q), b.arg))
    if isinstance(b, Mul):
        if q.denominator == 1:
            return mul(*(power(f, q) for f in b.factors))
        pos = [f for f in b.factors if known_positive(f)]
        other = [f for f in b.factors if not known_positive(f)]
        if not other:
            return mul(*(power(f, q) for f in b.factors))
        if pos:
            rest = other[0] if len(other) == 1 else Mul(tuple(other))
            return mul(*(power(f, q) for f in pos), Pow(rest, q))
        return Pow(b, q)
    if isinstance(b, Add) and q.denominator == 1 and 2 <= q <= MAX_EXPAND:
        return mul(*([b] * int(q)))
    if isinstance(b, Add) and q.denominator == 1 and -MAX_EXPAND <= q <= -2:
        # same normal form as ((b)^m)^(-1), whose inner power is expanded
        return power(power(b, -q), -1)
    return Pow(b, q)


def exp_(u: Node) -> Node:
    if u == ZERO:
        return ONE
    terms = u.terms if isinstance(u, Add) else (u,)
    factors, rest = [], []
    for t in terms:
        c, r = split_coeff(t)
        if isinstance(r, Log):
            factors.append(power(r.arg, c))
        else:
            rest.append(t)
    if not factors:
        return Exp(u)
    if rest:
        factors.append(Exp(add(*rest)))
    return mul(*factors)


def log_(u: Node) -> Node:
    if u == ONE:
        return ZERO
    if isinstance(u, Exp):
        return u.arg
    if isinstance(u, Pow) and known_positive(u.base):
        return mul(Const(u.exp), log_(u.base))
    if isinstance(u, Mul) and all(known_positive(f) for f in u.factors):
        return add(*(log_(f) for f in u.factors))
    return Log(u)


def _quarter_turns(u: Node):
    """k when u = k*pi/2 for an integer k (including u = 0), else None."""
    if u == ZERO:
        return 0
    c, rest = split_coeff(u)
    if rest == PI and (2 * c).denominator == 1:
        return int(2 * c)
    return None


def sin_(u: Node) -> Node:
    k = _quarter_turns(u)
    return Sin(u) if k is None else const((0, 1, 0, -1)[k % 4])


def cos_(u: Node) -> Node:
    k = _quarter_turns(u)
    return Cos(u) if k is None else const((1, 0, -1, 0)[k % 4])


_REBUILD = {Exp: exp_, Log: log_, Sin: sin_, Cos: cos_}


def substitute(n: Node, inner: Node) -> Node:
    """Canonical form of n with the variable replaced by ``inner``."""
    return _canon(n, inner)


def canonical(n: Node) -> Node:
    return _canon(n, None)


def _canon(n: Node, sub) -> Node:
    if isinstance(n, Var):
        return X if sub is None else sub
    if isinstance(n, Const):
        return n
    if isinstance(n, Named):
        return E if n.name == "e" else n
    if isinstance(n, Add):
        return add(*(_canon(t, sub) for t in n.terms))
    if isinstance(n, Sub):
        return add(_canon(n.left, sub), mul(Const(Fraction(-1)), _canon(n.right, sub)))
    if isinstance(n, Mul):
        return mul(*(_canon(f, sub) for f in n.factors))
    if isinstance(n, Div):
        return mul(_canon(n.num, sub), power(_canon(n.den, sub), -1))
    if isinstance(n, Pow):
        return power(_canon(n.base, sub), n.exp)
    if type(n) in _REBUILD:
        return _REBUILD[type(n)](_canon(n.arg, sub))
    if isinstance(n, Compose):
        return _canon(n.outer, _canon(n.inner, sub))
    raise TypeError(n)


# ---------------------------------------------------------------- calculus

def derivative(n: Node) -> Node:
    """First derivative of a canonical node, returned canonical."""
    if isinstance(n, Var):
        return ONE
    if isinstance(n, (Const, Named)):
        return ZERO
    if isinstance(n, Add):
        return add(*(derivative(t) for t in n.terms))
    if isinstance(n, Mul):
        fs = n.factors
        return add(*(mul(*fs[:i], derivative(f), *fs[i + 1:]) for i, f in enumerate(fs)))
    if isinstance(n, Pow):
        return mul(Const(n.exp), power(n.base, n.exp - 1), derivative(n.base))
    if isinstance(n, Exp):
        return mul(n, derivative(n.arg))
    if isinstance(n, Log):
        return mul(derivative(n.arg), power(n.arg, -1))
    if isinstance(n, Sin):
        return mul(cos_(n.arg), derivative(n.arg))
    if isinstance(n, Cos):
        return mul(Const(Fraction(-1)), sin_(n.arg), derivative(n.arg))
    return derivative(canonical(n))


# ---------------------------------------------------------------- printing

def _const_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _atom(n: Node, var: str) -> str:
    s = to_str(n, var)
    simple = isinstance(n, (Var, Named, Exp, Log, Sin, Cos, Pow)) or (
        isinstance(n, Const) and n.value.denominator == 1 and n.value >= 0)
    return s if simple else f"({s})"


def _exp_str(q: Fraction) -> str:
    return _const_str(q) if (q.denominator == 1 and q > 0) else f"({_const_str(q)})"


def to_str(n: Node, var: str = "x") -> str:
    if isinstance(n, Var):
        return var
    if isinstance(n, Const):
        return _const_str(n.value)
    if isinstance(n, Named):
        return n.name
    if isinstance(n, Exp) and n.arg == ONE:
        return "e"
    if type(n) in UNARY:
        return f"{UNARY[type(n)]}({to_str(n.arg, var)})"
    if isinstance(n, Pow):
        if isinstance(n.base, Const) and n.exp == Fraction(1, 2):
            return f"sqrt({to_str(n.base, var)})"
        return f"{_atom(n.base, var)}^{_exp_str(n.exp)}"
    if isinstance(n, Add):
        parts = []
        for i, t in enumerate(n.terms):
            c, rest = split_coeff(t)
            if i > 0 and c < 0:
                parts.append(" - " + to_str(_scaled(-c, rest) if rest is not None else Const(-c), var))
            else:
                parts.append((" + " if i else "") + to_str(t, var))
        return "".join(parts)
    if isinstance(n, Mul):
        c, rest = split_coeff(n)
        fs = rest.factors if isinstance(rest, Mul) else (rest,)
        num = [f for f in fs if not (isinstance(f, Pow) and f.exp < 0)]
        den = [Pow(f.base, -f.exp) if f.exp != -1 else f.base for f in fs
               if isinstance(f, Pow) and f.exp < 0]
        head = []
        if c == -1 and num:
            prefix = "-"
        else:
            prefix = ""
            if c != 1 or not num:
                head.append(_const_str(c) if c.denominator == 1 else f"({_const_str(c)})")
        s = prefix + "*".join(head + [_atom(f, var) for f in num])
        # one division per factor: a joined (A)*(B) would reparse as an expanded product
        return s + "".join("/" + _atom(f, var) for f in den)
    if isinstance(n, Sub):
        return f"{to_str(n.left, var)} - ({to_str(n.right, var)})"
    if isinstance(n, Div):
        return f"({to_str(n.num, var)})/({to_str(n.den, var)})"
    if isinstance(n, Compose):
        return to_str(substitute(n.outer, n.inner), var)
    raise TypeError(n)
