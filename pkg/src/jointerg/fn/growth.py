"""Numeric growth diagnostics on fixed geometric grids.

Everything here is an estimate from the log-slope x f'(x)/f(x), which is
computed from the exact symbolic derivative, so no finite differences are
involved.  Two grids are used:

* STANDARD_GRID, 10^4 .. 10^12, for integer degrees (Richardson in 1/log x);
* FAR_GRID, x = 10^(10^j), for limits that converge like a power of 1/log x
  (tempered exponents, Fejer checks, log-exponent profiles).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..errors import DomainError, Inconclusive, NotTempered
from . import nodes as N
from .evaluate import compile_mp, context
from .expr import SmoothExpr, diff, polynomial_coeffs

STANDARD_GRID = tuple(10 ** k for k in range(4, 13))
FAR_EXPONENTS = tuple(range(1, 10))
WORK_PREC = 256

SLOPE_MARGIN = 0.05
STABILITY_TOL = 1e-3
POLY_DEV = 1e-6
PROFILE_TOL = 1e-3


def _far_points(ctx):
    return [ctx.mpf(10) ** (10 ** j) for j in FAR_EXPONENTS]


def _std_points(ctx):
    return [ctx.mpf(x) for x in STANDARD_GRID]


def _all_points(ctx):
    """Standard grid followed by the far points beyond it, in increasing order."""
    top = STANDARD_GRID[-1]
    return _std_points(ctx) + [x for x in _far_points(ctx) if x > top]


def _values(node, points, ctx):
    f = compile_mp(node)
    return [f(ctx, x) for x in points]


def log_slopes(expr: SmoothExpr, far: bool = False):
    """(u_j, s_j) with u = 1/log x and s = x f'(x)/f(x) on the chosen grid."""
    ctx = context(WORK_PREC)
    pts = _far_points(ctx) if far else _std_points(ctx)
    f = compile_mp(expr.node)
    df = compile_mp(N.derivative(expr.node))
    out = []
    for x in pts:
        fx = f(ctx, x)
        if fx == 0:
            raise DomainError("zero value on the sample grid; log-slope undefined")
        out.append((1 / ctx.log(x), x * df(ctx, x) / fx))
    return out


def eventual_sign(expr: SmoothExpr) -> int:
    ctx = context(WORK_PREC)
    vals = _values(expr.node, _all_points(ctx), ctx)
    signs = {ctx.sign(v) for v in vals}
    if len(signs) != 1 or 0 in signs:
        raise Inconclusive("expression changes sign (or vanishes) on the sample grid")
    return int(signs.pop())


def _neville_at_zero(pts):
    """Polynomial extrapolation to u = 0 through the given (u, s) points."""
    us = [u for u, _ in pts]
    ps = [s for _, s in pts]
    n = len(pts)
    for k in range(1, n):
        for i in range(n - k):
            ps[i] = (us[i + k] * ps[i] - us[i] * ps[i + 1]) / (us[i + k] - us[i])
    return ps[0]


def extrapolated_slope(expr: SmoothExpr):
    """(limit, spread, slopes): quadratic Richardson in 1/log x over sliding triples."""
    pts = log_slopes(expr)
    ests = [_neville_at_zero(pts[j - 2:j + 1]) for j in range(len(pts) - 3, len(pts))]
    spread = max(ests) - min(ests)
    return float(ests[-1]), float(spread), [float(s) for _, s in pts]


def growth_degree(expr: SmoothExpr, margin: float = SLOPE_MARGIN,
                  tol: float = STABILITY_TOL) -> tuple[int, bool]:
    """(degree, strongly_nonpoly) from the extrapolated log-slope.

    A slope that reaches an integer n polynomially fast is polynomial-like
    (degree n).  One that approaches n only like a power of 1/log x is strongly
    non-polynomial; its degree is n from above and n-1 from below, since
    x^n log x and x^n / log x sit on opposite sides of x^n.
    """
    eventual_sign(expr)
    limit, spread, slopes = extrapolated_slope(expr)
    if spread > tol:
        raise Inconclusive(f"slope extrapolation unstable (spread {spread:.2e})")
    n = round(limit)
    if abs(limit - n) <= tol:
        first, last = abs(slopes[0] - n), abs(slopes[-1] - n)
        if last < POLY_DEV or (first > 0 and last / first < POLY_DEV):
            return n, False
        return (n, True) if slopes[-1] > n else (n - 1, True)
    if abs(limit - n) < margin:
        raise Inconclusive(f"slope {limit:.4f} within margin {margin} of an integer")
    return math.floor(limit), True


# ---------------------------------------------------------------- profiles

@dataclass(frozen=True)
class GrowthProfile:
    """f ~ x^p (log x)^q, read off the far grid; q is meaningless for oscillating f."""

    p: float
    q: float

    def kind(self, tol: float = PROFILE_TOL) -> str:
        """'infinite', 'zero' or 'bounded' (both exponents within tol of 0)."""
        for e in (self.p, self.q):
            if e > tol:
                return "infinite"
            if e < -tol:
                return "zero"
        return "bounded"

    def compare(self, other: "GrowthProfile", tol: float = PROFILE_TOL) -> int:
        """-1 if self is asymptotically smaller, 1 if larger, 0 if undecided."""
        for a, b in ((self.p, other.p), (self.q, other.q)):
            if a < b - tol:
                return -1
            if a > b + tol:
                return 1
        return 0


def growth_profile(expr: SmoothExpr) -> GrowthProfile:
    pts = log_slopes(expr, far=True)
    (u1, s1), (u2, s2) = pts[-2], pts[-1]
    q = (s1 - s2) / (u1 - u2)
    p = s2 - q * u2
    return GrowthProfile(float(p), float(q))


def tends_to_zero(expr: SmoothExpr) -> bool:
    return growth_profile(expr).kind() == "zero"


def diverges(expr: SmoothExpr) -> bool:
    return growth_profile(expr).kind() == "infinite"


def _strictly_monotone_abs(expr: SmoothExpr, decreasing: bool) -> bool:
    ctx = context(WORK_PREC)
    vals = _values(expr.node, _all_points(ctx), ctx)
    if len({ctx.sign(v) for v in vals}) != 1 or vals[0] == 0:
        return False
    mags = [abs(v) for v in vals]
    pairs = zip(mags, mags[1:])
    return all(b < a for a, b in pairs) if decreasing else all(b > a for a, b in pairs)


# ---------------------------------------------------------------- tempered

@dataclass(frozen=True)
class TemperedProfile:
    expr: SmoothExpr
    degree: int
    alpha: float
    monotone_tail_checked: bool
    x_abs_deriv_diverges_checked: bool
    sandwich_checked: bool = False

    def __post_init__(self):
        if not (self.degree < self.alpha <= self.degree + 1):
            raise ValueError(f"alpha={self.alpha} outside ({self.degree}, {self.degree + 1}]")


def tempered_alpha(t: SmoothExpr, tol: float = STABILITY_TOL) -> TemperedProfile:
    if eventual_sign(t) < 0:
        raise DomainError("tempered function must be eventually positive")
    slopes = [float(s) for _, s in log_slopes(t, far=True)]
    tail = slopes[-3:]
    if max(tail) - min(tail) > tol:
        raise Inconclusive(f"x t'/t does not settle on the far grid: {tail}")
    alpha = tail[-1]
    if abs(alpha - round(alpha)) <= tol:
        raise NotTempered(f"alpha={alpha:.6f} is an integer within tolerance")
    d = math.ceil(alpha) - 1
    dt = diff(t, d + 1)
    x = SmoothExpr.var()
    cond1 = _strictly_monotone_abs(dt, decreasing=True) and tends_to_zero(dt)
    cond2 = _strictly_monotone_abs(x * dt, decreasing=False) and diverges(x * dt)
    lower = x ** d * x.log() if d > 0 else x.log()
    sandwich = diverges(t / lower) and tends_to_zero(t / x ** (d + 1))
    return TemperedProfile(t, d, alpha, cond1, cond2, sandwich)


def is_fejer(L: SmoothExpr) -> bool:
    """Degree-0 tempered conditions: L' -> 0 monotonically and x|L'| -> infinity."""
    if eventual_sign(L) < 0:
        raise DomainError("Fejer test expects an eventually positive function")
    d1 = diff(L, 1)
    if d1.is_zero:
        return False
    if not (_strictly_monotone_abs(d1, decreasing=True) and tends_to_zero(d1)):
        return False
    return diverges(SmoothExpr.var() * d1)


# ---------------------------------------------------------------- decomposition

@dataclass(frozen=True)
class GrowthDecomposition:
    """h = s + p + e, declared by the caller and verified numerically."""

    s_part: SmoothExpr
    p_coeffs: tuple  # SmoothExpr constants, lowest degree first
    e_part: Optional[SmoothExpr]
    deg_s: Optional[int]
    deg_p: Optional[int]
    log_dominated: bool
    strongly_nonpoly_verified: bool

    @property
    def p_part(self) -> SmoothExpr:
        x = SmoothExpr.var()
        out = SmoothExpr.const(0)
        for j, c in enumerate(self.p_coeffs):
            out = out + c * x ** j
        return out

    @property
    def total(self) -> SmoothExpr:
        h = self.s_part + self.p_part
        return h + self.e_part if self.e_part is not None else h


def decompose(s_part, p_part="0", e_part=None, deg_s: Optional[int] = None) -> GrowthDecomposition:
    """Verify a declared split.  ``deg_s`` overrides the numeric classification."""
    s = s_part if isinstance(s_part, SmoothExpr) else SmoothExpr.parse(s_part)
    p = p_part if isinstance(p_part, SmoothExpr) else SmoothExpr.parse(p_part)
    e = e_part if (e_part is None or isinstance(e_part, SmoothExpr)) else SmoothExpr.parse(e_part)
    coeffs = tuple(polynomial_coeffs(p))
    if any(not c.is_constant for c in coeffs):
        raise DomainError("p_part coefficients must be constants")
    deg_p = len(coeffs) - 1 if coeffs else None
    if e is not None and not e.is_zero and not tends_to_zero(e):
        raise DomainError("e_part must vanish at infinity")
    if s.is_zero:
        return GrowthDecomposition(s, coeffs, e, None, deg_p, False, False)
    degree, strong = growth_degree(s)
    if deg_s is not None and deg_s != degree:
        strong = False
        degree = deg_s
    x = SmoothExpr.var()
    log_dom = diverges(s / x.log())
    return GrowthDecomposition(s, coeffs, e, degree, deg_p, log_dom, strong)
