"""High-precision and vectorized evaluation of canonical nodes.

Each node is compiled once into a closure ``f(ctx, x)`` over an mpmath
context.  Contexts are thread-local so concurrent evaluation never shares the
global ``mp.prec``.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ..errors import DomainError, PrecisionExhausted
from .nodes import (Add, Compose, Const, Cos, Div, Exp, Log, Mul, Named, Node, Pow,
                    Sin, Sub, Var, canonical)

PRECISION_CAP = 4096
_local = threading.local()


def context(prec: int) -> mpmath.MPContext:
    cache = getattr(_local, "ctxs", None)
    if cache is None:
        cache = _local.ctxs = {}
    ctx = cache.get(prec)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.prec = prec
        cache[prec] = ctx
    return ctx


def to_mpf(ctx, v):
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    return ctx.mpf(v)


def _check(ctx, v):
    if not ctx.isfinite(v):
        raise DomainError("non-finite intermediate value")
    return v


@lru_cache(maxsize=4096)
def compile_mp(n: Node):
    if isinstance(n, Var):
        return lambda ctx, x: x
    if isinstance(n, Const):
        v = n.value
        return lambda ctx, x: to_mpf(ctx, v)
    if isinstance(n, Named):
        if n.name == "pi":
            return lambda ctx, x: +ctx.pi
        if n.name == "e":
            return lambda ctx, x: +ctx.e
        raise DomainError(f"opaque symbol {n.name!r} has no numeric value")
    if isinstance(n, Add):
        fs = [compile_mp(t) for t in n.terms]
        return lambda ctx, x: ctx.fsum(f(ctx, x) for f in fs)
    if isinstance(n, Mul):
        fs = [compile_mp(t) for t in n.factors]

        def _mul(ctx, x):
            acc = ctx.mpf(1)
            for f in fs:
                acc *= f(ctx, x)
            return acc
        return _mul
    if isinstance(n, Pow):
        fb, q = compile_mp(n.base), n.exp

        def _pow(ctx, x):
            b = fb(ctx, x)
            if b == 0 and q < 0:
                raise DomainError("zero raised to a negative power")
            if q.denominator == 1:
                return _check(ctx, b ** q.numerator)
            if b < 0:
                raise DomainError("negative base with fractional exponent")
            if q.denominator == 2:
                r = ctx.sqrt(b)
            elif q.denominator <= 64:
                r = ctx.root(b, q.denominator)
            else:
                return _check(ctx, ctx.power(b, to_mpf(ctx, q)))
            return _check(ctx, r ** q.numerator)
        return _pow
    if isinstance(n, Exp):
        fa = compile_mp(n.arg)
        return lambda ctx, x: _check(ctx, ctx.exp(fa(ctx, x)))
    if isinstance(n, Log):
        fa = compile_mp(n.arg)

        def _log(ctx, x):
            a = fa(ctx, x)
            if a <= 0:
                raise DomainError("log of a nonpositive argument")
            return ctx.log(a)
        return _log
    if isinstance(n, Sin):
        fa = compile_mp(n.arg)
        return lambda ctx, x: ctx.sin(fa(ctx, x))
    if isinstance(n, Cos):
        fa = compile_mp(n.arg)
        return lambda ctx, x: ctx.cos(fa(ctx, x))
    if isinstance(n, (Sub, Div, Compose)):
        return compile_mp(canonical(n))
    raise TypeError(n)


def eval_at(n: Node, x, prec: int):
    """One evaluation at a fixed working precision (no error control)."""
    ctx = context(prec)
    return compile_mp(n)(ctx, to_mpf(ctx, x))


def eval_node(n: Node, x, precision_bits: int = 53, cap: int = PRECISION_CAP):
    """Value with relative error <= 2^(-precision_bits+4).

    Two working precisions are compared; the guard is doubled until they agree.
    A value that vanishes at working precision (an exact zero such as
    sin(pi)) cannot be certified relatively; it is returned once both
    evaluations are below 2^-(precision_bits+guard) in absolute value.
    """
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    guard = 20
    tol = mpmath.mpf(2) ** (-precision_bits + 4)
    while precision_bits + 2 * guard <= cap:
        lo = eval_at(n, x, precision_bits + guard)
        hi = eval_at(n, x, precision_bits + 2 * guard)
        if hi == lo or abs(hi - lo) <= tol * abs(hi):
            return hi
        floor = mpmath.mpf(2) ** -(precision_bits + guard)
        if abs(hi) <= floor and abs(lo) <= floor:
            return hi
        guard *= 2
    raise PrecisionExhausted(f"no agreement to {precision_bits} bits below cap {cap}")


# ---------------------------------------------------------------- numpy path

@lru_cache(maxsize=1024)
def compile_np(n: Node):
    """float64 vectorized evaluator; invalid values surface as NaN for the caller."""
    if isinstance(n, Var):
        return lambda x: x
    if isinstance(n, Const):
        v = float(n.value)
        return lambda x: np.full_like(x, v, dtype=np.float64)
    if isinstance(n, Named):
        v = np.pi if n.name == "pi" else np.e
        return lambda x: np.full_like(x, v, dtype=np.float64)
    if isinstance(n, Add):
        fs = [compile_np(t) for t in n.terms]
        return lambda x: sum((f(x) for f in fs[1:]), fs[0](x))
    if isinstance(n, Mul):
        fs = [compile_np(t) for t in n.factors]

        def _mul(x):
            acc = fs[0](x)
            for f in fs[1:]:
                acc = acc * f(x)
            return acc
        return _mul
    if isinstance(n, Pow):
        fb, q = compile_np(n.base), n.exp
        if q.denominator == 1:
            return lambda x: fb(x) ** float(q)
        if q == Fraction(1, 2):
            return lambda x: np.sqrt(fb(x))
        return lambda x: np.power(fb(x), float(q))
    table = {Exp: np.exp, Log: np.log, Sin: np.sin, Cos: np.cos}
    if type(n) in table:
        fa, g = compile_np(n.arg), table[type(n)]
        return lambda x: g(fa(x))
    return compile_np(canonical(n))
