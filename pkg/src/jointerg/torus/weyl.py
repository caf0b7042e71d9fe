"""Certified floors of real sequences and Weyl averages with 128-bit phases."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ..errors import DomainError, FloorAmbiguous
from ..fn import nodes as fnn
from ..fn.evaluate import compile_mp, compile_np, context
from ..fn.expr import SmoothExpr, polynomial_coeffs
from .exact import ExactReal

CERT_GAP = 2.0 ** -20
AMBIGUOUS_GAP = 2.0 ** -40
PRECISIONS = (53, 128, 256)
CHUNK = 1 << 16
_TWO_PI_OVER_2_64 = 2 * math.pi / 2.0 ** 64


def _rational_poly(a: SmoothExpr):
    try:
        cs = polynomial_coeffs(a)
    except DomainError:
        return None
    out = []
    for c in cs:
        node = c.node
        if not hasattr(node, "value"):
            return None
        out.append(Fraction(node.value))
    return out


def iterate_sequence(a: SmoothExpr, N: int, start: int = 1) -> np.ndarray:
    """[a(n)] for n = start..N as int64.

    Rational polynomials are floored exactly.  Otherwise a float64 pass is
    trusted where a(n) sits at least max(2^-20, |a(n)| 2^-45) from an integer;
    the rest is re-evaluated at 128 and then 256 bits.  A value still within
    2^-40 of an integer at 256 bits raises FloorAmbiguous.
    """
    if N < start:
        return np.zeros(0, dtype=np.int64)
    if isinstance(a, str):
        a = SmoothExpr.parse(a)
    n = np.arange(start, N + 1, dtype=np.int64)
    poly = _rational_poly(a)
    if poly is not None:
        return np.array([math.floor(sum(c * k ** j for j, c in enumerate(poly)))
                         for k in range(start, N + 1)], dtype=np.int64)
    with np.errstate(all="ignore"):
        v = compile_np(a.node)(n.astype(np.float64))
    if not np.all(np.isfinite(v)):
        bad = int(n[~np.isfinite(v)][0])
        raise DomainError(f"a(n) is not finite at n={bad}")
    out = np.floor(v).astype(np.int64)
    gap = np.minimum(v - np.floor(v), np.ceil(v) - v)
    unsure = np.nonzero(gap < np.maximum(CERT_GAP, np.abs(v) * 2.0 ** -45))[0]
    if len(unsure):
        f = compile_mp(a.node)
        for idx in unsure:
            out[idx] = _certified_floor(f, int(n[idx]), a.node)
    return out


def _exact_value(node, k: int):
    """a(k) when it canonicalizes to a rational constant (e.g. k log k at k = 1)."""
    v = fnn.substitute(node, fnn.Const(Fraction(k)))
    return v.value if isinstance(v, fnn.Const) else None


def _certified_floor(f, k: int, node=None) -> int:
    val = gap = None
    for prec in PRECISIONS[1:]:
        ctx = context(prec)
        val = f(ctx, ctx.mpf(k))
        fl = ctx.floor(val)
        gap = min(val - fl, fl + 1 - val)
        if gap >= max(ctx.mpf(CERT_GAP), abs(val) * ctx.mpf(2) ** (-(prec - 16))):
            return int(fl)
    if gap < AMBIGUOUS_GAP:
        exact = _exact_value(node, k) if node is not None else None
        if exact is not None:
            return math.floor(exact)
        raise FloorAmbiguous(f"a({k}) is within 2^-40 of an integer at {PRECISIONS[-1]} bits",
                             n=k)
    return int(context(PRECISIONS[-1]).floor(val))


def _phase_of(beta) -> int:
    """frac(beta) in 128-bit fixed point."""
    if isinstance(beta, str):
        beta = ExactReal.parse(beta)
    elif isinstance(beta, (int, Fraction)):
        beta = ExactReal(beta)
    if isinstance(beta, ExactReal):
        return beta.fixed(128)
    r = Fraction(beta) - math.floor(beta)
    return (r.numerator << 128) // r.denominator


def _chunk_sum(values: np.ndarray, hi: np.uint64, lo: float):
    # v*hi wraps mod 2^64 exactly; v*lo/2^64 is the sub-ulp tail, below |v| 2^-64 turns
    ph = values.view(np.uint64) * hi
    ang = (ph.astype(np.float64) + values.astype(np.float64) * lo) * _TWO_PI_OVER_2_64
    return math.fsum(np.cos(ang)), math.fsum(np.sin(ang))


RATIONAL_DENOMINATOR_CAP = 1 << 20


def _rational_of(beta) -> Optional[Fraction]:
    if isinstance(beta, ExactReal):
        return beta.rat if beta.is_rational else None
    if isinstance(beta, (int, Fraction)):
        return Fraction(beta)
    return None


def _unit(r: int, q: int) -> complex:
    """e(r/q) for 0 <= r < q, exact at the quarter turns."""
    if (4 * r) % q == 0:
        return (1, 1j, -1, -1j)[4 * r // q]
    t = 2 * math.pi * r / q
    return complex(math.cos(t), math.sin(t))


def _residue_sum(vals: np.ndarray, beta: Fraction) -> complex:
    p, q = beta.numerator, beta.denominator
    counts = np.bincount(np.mod(vals, q), minlength=q)
    terms = [int(c) * _unit((r * p) % q, q) for r, c in enumerate(counts) if c]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def weyl_sum(values, beta, threads: int = 1) -> complex:
    """sum_n e(values[n] beta); chunk boundaries are fixed, so the result
    does not depend on the worker count.  Rational beta with a small
    denominator is summed by residue class instead."""
    vals = np.ascontiguousarray(values, dtype=np.int64)
    rat = _rational_of(beta)
    if rat is not None and rat.denominator <= RATIONAL_DENOMINATOR_CAP:
        return _residue_sum(vals, rat)
    P = _phase_of(beta)
    hi, lo = np.uint64(P >> 64), (P & ((1 << 64) - 1)) / 2.0 ** 64
    chunks = [vals[i:i + CHUNK] for i in range(0, len(vals), CHUNK)]
    with np.errstate(over="ignore"):
        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(lambda c: _chunk_sum(c, hi, lo), chunks))
        else:
            parts = [_chunk_sum(c, hi, lo) for c in chunks]
    return complex(math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts))


def weyl_average(values, beta, threads: int = 1) -> complex:
    """(1/N) sum_n e(values[n] beta), compensated and deterministic."""
    N = len(values)
    if N == 0:
        raise ValueError("values must be nonempty")
    s = weyl_sum(values, beta, threads)
    return complex(s.real / N, s.imag / N)


def weyl_curve(values, beta, checkpoints: Sequence[int], threads: int = 1) -> list:
    """|weyl_average| over the prefixes values[:N] for N in checkpoints."""
    return [abs(weyl_average(values[:N], beta, threads)) for N in checkpoints]
