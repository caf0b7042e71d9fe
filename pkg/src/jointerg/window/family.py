"""Taylor families on short windows and the normalizing change of variables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import HypothesisViolated, SandwichViolated
from ..fn.evaluate import compile_mp, context
from ..fn.expr import SmoothExpr, diff
from ..fn.growth import (STABILITY_TOL, GrowthDecomposition, TemperedProfile, diverges,
                         eventual_sign, growth_profile, is_fejer, tempered_alpha,
                         tends_to_zero)

MODES = ("hardy", "case1", "case2")
X = SmoothExpr.var()


def _threshold(K: int) -> float:
    return (K * K + K) / (2 * K + 1)


def select_order(decomp: GrowthDecomposition, mode: str = "hardy",
                 t: Optional[TemperedProfile] = None, tol: float = STABILITY_TOL) -> int:
    """Taylor degree K for the declared decomposition.

    hardy: d_s + 1 unless the polynomial part dominates (then d_p + 1).
    case1: max(d_s, d_p) + 1.  case2: max(d_p, d_t) + 1, bumped while the
    forbidden value (K^2+K)/(2K+1) = alpha is hit.
    """
    ds = -1 if decomp.deg_s is None else decomp.deg_s
    dp = -1 if decomp.deg_p is None else decomp.deg_p
    if mode == "hardy":
        return ds + 1 if dp < ds + 1 else dp + 1
    if mode == "case1":
        return max(ds, dp) + 1
    if mode == "case2":
        if t is None:
            raise ValueError("case2 needs the tempered profile t")
        K = max(dp, t.degree) + 1
        while abs(_threshold(K) - t.alpha) <= tol:
            K += 1
        return K
    raise ValueError(f"unknown mode {mode!r}")


def _abs_power(e: SmoothExpr, q: Fraction) -> SmoothExpr:
    """|e|^q for an expression of eventually constant sign."""
    return (e * eventual_sign(e)) ** q


def _asymptotic_min(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    c = growth_profile(a).compare(growth_profile(b))
    if c == 0:
        from ..fn.growth import _far_points, WORK_PREC
        ctx = context(WORK_PREC)
        x = _far_points(ctx)[-1]
        va, vb = compile_mp(a.node)(ctx, x), compile_mp(b.node)(ctx, x)
        return a if va <= vb else b
    return a if c < 0 else b


def select_window(core: SmoothExpr, K: int, mode: str = "hardy",
                  alpha: Optional[float] = None, tol: float = STABILITY_TOL) -> SmoothExpr:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    cK, cK1 = diff(core, K), diff(core, K + 1)
    if cK.is_zero or cK1.is_zero:
        raise SandwichViolated(f"core has a vanishing derivative of order {K} or {K + 1}")
    if mode == "case2":
        if alpha is None:
            alpha = tempered_alpha(core).alpha
        thr = _threshold(K)
        if abs(thr - alpha) <= tol:
            raise SandwichViolated(f"(K^2+K)/(2K+1) = {thr:.4f} collides with alpha")
        if thr < alpha:
            L = _abs_power(cK, Fraction(-(2 * K + 1), 2 * K * K))
        else:
            L = _abs_power(cK, Fraction(-1, 2 * K)) * _abs_power(cK1, Fraction(-1, 2 * (K + 1)))
        if not is_fejer(L):
            raise SandwichViolated(f"tempered window {L} is not a Fejer function")
        return L
    lower = _abs_power(cK, Fraction(-1, K))
    upper = _asymptotic_min(_abs_power(cK1, Fraction(-1, K + 1)),
                            _abs_power(cK, Fraction(-(K + 1), K * K)))
    L = (lower * upper) ** Fraction(1, 2)
    chain = [("1 < |core^(K)|^(-1/K)", diverges(lower)),
             ("|core^(K)|^(-1/K) < L", diverges(L / lower)),
             ("L < min(...)", tends_to_zero(L / upper)),
             ("L < x", tends_to_zero(L / X))]
    for name, ok in chain:
        if not ok:
            raise SandwichViolated(f"window chain fails at {name} for L = {L}")
    return L


@dataclass(frozen=True)
class VariablePolyFamily:
    """p_N(r) = sum_j coeffs[j](N) r^j on the window 0 <= r <= L(N)."""

    K: int
    coeffs: tuple
    window: SmoothExpr
    leading_is_aN: bool
    core: SmoothExpr = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.coeffs) != self.K + 1 or self.coeffs[self.K].is_zero:
            raise ValueError("coeff[K] must be a nonzero expression")

    def coeff_strings(self, var: str = "N") -> list[str]:
        return [c.to_str(var) for c in self.coeffs]

    def coeff_values(self, N, prec: int):
        ctx = context(prec)
        n = ctx.mpf(N)
        return [compile_mp(c.node)(ctx, n) for c in self.coeffs]


def taylor_family(decomp: GrowthDecomposition, extra: Optional[TemperedProfile], K: int,
                  L: SmoothExpr) -> VariablePolyFamily:
    p = decomp.p_coeffs
    if decomp.deg_p is not None and K < decomp.deg_p:
        raise ValueError(f"K={K} is below deg p = {decomp.deg_p}")
    core = decomp.s_part if extra is None else decomp.s_part + extra.expr
    coeffs = []
    for j in range(K + 1):
        c = diff(core, j) / math.factorial(j)
        for i in range(j, len(p)):
            c = c + p[i] * math.comb(i, j) * X ** (i - j)
        coeffs.append(c)
    leading = (decomp.deg_p is None or K > decomp.deg_p) and not diff(core, K).is_zero
    if not (diverges(L) and tends_to_zero(L / X)):
        raise SandwichViolated(f"window {L} does not satisfy 1 < L < x")
    return VariablePolyFamily(K, tuple(coeffs), L, leading, core)


def window_error(a: SmoothExpr, fam: VariablePolyFamily, N: int, samples: int = 10 ** 4) -> float:
    """max |a(N+r) - p_N(r)| over equispaced r in [0, L(N)], endpoints included."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    ctx0 = context(128)
    mag = abs(compile_mp(a.node)(ctx0, ctx0.mpf(N))) + 1
    prec = 128 + int(ctx0.log(mag, 2))
    ctx = context(prec)
    n = ctx.mpf(N)
    Lv = compile_mp(fam.window.node)(ctx, n)
    if Lv < 1:
        raise ValueError(f"L({N}) < 1")
    cs = fam.coeff_values(N, prec)
    f = compile_mp(a.node)
    worst = ctx.mpf(0)
    for i in range(samples):
        r = Lv * i / (samples - 1)
        acc = ctx.mpf(0)
        for c in reversed(cs):
            acc = acc * r + c
        worst = max(worst, abs(f(ctx, n + r) - acc))
    return float(worst)


# ---------------------------------------------------------------- change of variables

@dataclass(frozen=True)
class ChangeOfVariablesResult:
    """n = kQ + s with Q = [D_N^{-1}] normalizes the leading coefficient.

    ``new_window`` is the smooth proxy L(N)*|a_N|^(1/K) of the window in k;
    ``new_window_value`` is the literal quotient L(N)/[D_N^{-1}] at this N.
    """

    N: int
    K: int
    sign: int
    D_inv: SmoothExpr
    new_window: SmoothExpr
    Q: int
    new_window_value: float
    leading_error_bound: float
    prec: int
    _coeffs: tuple = field(repr=False)
    _aN: object = field(repr=False)

    def full_poly(self, n):
        """a_N n^K + p_N(n) at an integer n."""
        ctx = context(self.prec)
        acc = ctx.mpf(0)
        for c in reversed(self._coeffs):
            acc = acc * n + c
        return acc

    def residue_poly(self, s: int) -> list:
        """Coefficients (k^0 .. k^(K-1)) of p_{N,s}(k) = P(kQ+s) - a_N Q^K k^K."""
        if not 0 <= s < self.Q:
            raise ValueError(f"residue {s} outside [0, {self.Q})")
        ctx = context(self.prec)
        out = [ctx.mpf(0)] * (self.K + 1)
        for j, c in enumerate(self._coeffs):
            for i in range(j + 1):
                out[i] += c * math.comb(j, i) * ctx.mpf(self.Q) ** i * ctx.mpf(s) ** (j - i)
        return out[:self.K]

    def substituted(self, k: int, s: int):
        """sign * k^K + p_{N,s}(k)."""
        ctx = context(self.prec)
        acc = ctx.mpf(0)
        for c in reversed(self.residue_poly(s)):
            acc = acc * k + c
        return acc + self.sign * ctx.mpf(k) ** self.K

    def residues(self):
        return range(self.Q)


def change_of_variables(fam: VariablePolyFamily, N: int, prec: int = 256) -> ChangeOfVariablesResult:
    if not fam.leading_is_aN:
        raise HypothesisViolated("leading coefficient is not a^(K)(N)/K!")
    K, a, L = fam.K, fam.coeffs[fam.K], fam.window
    if a.is_constant or not tends_to_zero(a):
        raise HypothesisViolated("a_N does not tend to 0", hypothesis="lim a_N = 0")
    sign = eventual_sign(a)
    D = (a * sign) ** Fraction(1, K)
    D_inv = (a * sign) ** Fraction(-1, K)
    if not diverges(L * D):
        raise HypothesisViolated("L(N)|a_N|^(1/K) does not diverge",
                                 hypothesis="lim L|a_N|^(1/K) = inf")
    if growth_profile(L * (a * sign) ** Fraction(K + 1, K * K)).kind() == "infinite":
        raise HypothesisViolated("L(N) is not << |a_N|^(-(K+1)/K^2)",
                                 hypothesis="L << |a_N|^(-(K+1)/K^2)")
    new_window = L * D
    if not (diverges(new_window) and tends_to_zero(new_window / X)):
        raise HypothesisViolated("new window fails 1 < L~ < N")
    ctx = context(prec)
    n = ctx.mpf(N)
    dinv_v = compile_mp(D_inv.node)(ctx, n)
    if dinv_v < 1:
        raise HypothesisViolated(f"D_N^(-1) < 1 at N={N}")
    Q = int(ctx.floor(dinv_v))
    Lv = compile_mp(L.node)(ctx, n)
    lt = Lv / Q
    coeffs = tuple(fam.coeff_values(N, prec))
    aN = coeffs[K]
    kmax = int(ctx.floor(lt))
    bound = abs(aN * ctx.mpf(Q) ** K - sign) * ctx.mpf(kmax) ** K
    return ChangeOfVariablesResult(N, K, sign, D_inv, new_window, Q, float(lt), float(bound),
                                   prec, coeffs, aN)
