"""Ergodicity of sequences, multiple averages and the two joint-ergodicity conditions."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import CombinatorialBlowup
from .exact import ExactReal
from .system import TorusSystem, TrigPoly, dot
from .weyl import weyl_average

DEFAULT_THRESHOLD = 0.05
SUPPORT_CAP = 4096


def _half_box(m: int, cutoff: int):
    """Nonzero k with |k|_inf <= cutoff, one of each pair {k, -k}."""
    for k in itertools.product(range(-cutoff, cutoff + 1), repeat=m):
        if any(k) and k > tuple(-x for x in k):
            yield k


def _magnitude(values, beta: ExactReal, threads: int) -> float:
    if beta.is_integer:
        return 1.0
    return abs(weyl_average(values, beta, threads))


def sequence_ergodic(system: TorusSystem, g: Sequence[int], values, char_cutoff: int,
                     threads: int = 1) -> float:
    """max over 0 < |k|_inf <= cutoff of |(1/N) sum_n e(values[n] k.theta_g)|."""
    if char_cutoff < 1:
        raise ValueError("char_cutoff must be >= 1")
    theta = system.theta(g)
    return max(_magnitude(values, dot(k, theta), threads) for k in _half_box(system.m, char_cutoff))


def product_ergodic(system: TorusSystem, values, cutoff: int, threads: int = 1) -> float:
    """Same for (T_1 x ... x T_d)^{v_n} on the d-fold product, characters (k_1..k_d)."""
    if cutoff < 1:
        raise ValueError("product_cutoff must be >= 1")
    rows = system.alpha
    best = 0.0
    for ks in _half_box(system.m * system.d, cutoff):
        beta = ExactReal()
        for i in range(system.d):
            beta = beta + dot(ks[i * system.m:(i + 1) * system.m], rows[i])
        best = max(best, _magnitude(values, beta, threads))
        if best == 1.0:
            break
    return best


def _expand(system: TorusSystem, fs: Sequence[TrigPoly], cap: int):
    """Product support: {(K, beta): weight} for prod_i T_i^v f_i."""
    if len(fs) != system.d:
        raise ValueError(f"need {system.d} functions, got {len(fs)}")
    size = math.prod(len(f.coeffs) for f in fs)
    if size > cap:
        raise CombinatorialBlowup(f"product support {size} exceeds cap {cap}", size=size)
    terms: dict = {}
    for combo in itertools.product(*(f.coeffs.items() for f in fs)):
        K = tuple(sum(k[j] for k, _ in combo) for j in range(system.m))
        beta = ExactReal()
        w = 1 + 0j
        for i, (k, c) in enumerate(combo):
            beta = beta + dot(k, system.alpha[i])
            w *= c
        key = (K, beta.frac())
        terms[key] = terms.get(key, 0) + w
    return terms


def multiple_average(system: TorusSystem, fs: Sequence[TrigPoly], values,
                     cap: int = SUPPORT_CAP, threads: int = 1):
    """(1/N) sum_n prod_i T_i^{values[n]} f_i as a TrigPoly, and its L2 distance
    to prod_i int f_i.  Each distinct phase gets one Weyl sum."""
    terms = _expand(system, fs, cap)
    cache: dict = {}
    coeffs: dict = {}
    for (K, beta), w in terms.items():
        if beta not in cache:
            cache[beta] = 1 + 0j if beta.is_integer else weyl_average(values, beta, threads)
        coeffs[K] = coeffs.get(K, 0) + w * cache[beta]
    avg = TrigPoly(system.m, coeffs)
    target = math.prod((f.mean for f in fs), start=1 + 0j)
    zero = (0,) * system.m
    dev2 = math.fsum(abs(c - (target if K == zero else 0)) ** 2 for K, c in avg.coeffs.items())
    if zero not in avg.coeffs:
        dev2 += abs(target) ** 2
    return avg, math.sqrt(dev2)


def direct_average(system: TorusSystem, fs: Sequence[TrigPoly], values, points) -> np.ndarray:
    """Pointwise (1/N) sum_n prod_i f_i(x + values[n] alpha_i) at each x in points.

    Independent of the Fourier path: phases use double-double alpha and a
    Veltkamp split, products are formed per n and summed afterwards.
    """
    v = np.asarray(values, dtype=np.int64)
    out = []
    if len(v) and int(np.max(np.abs(v))) >= 1 << 52:
        raise ValueError("direct_average needs |values| < 2^52")
    hi_part, lo_part = v >> 26, v & ((1 << 26) - 1)
    vh, vl = hi_part.astype(np.float64), lo_part.astype(np.float64)
    split = [[(_split(a.double_double()), _split(_scaled(a.double_double(), 26)))
              for a in row] for row in system.alpha]
    # e(v k.alpha_i) per frequency does not depend on x
    waves = []
    for i, f in enumerate(fs):
        row = {}
        for k in f.coeffs:
            ph = np.zeros(len(v))
            for kj, (lo, hi) in zip(k, split[i]):
                if kj:
                    ph = np.mod(ph + kj * (_frac_product(vl, *lo) + _frac_product(vh, *hi)), 1.0)
            row[k] = np.exp(2j * np.pi * ph)
        waves.append(row)
    for x in points:
        prod = np.ones(len(v), dtype=np.complex128)
        for f, row in zip(fs, waves):
            acc = np.zeros(len(v), dtype=np.complex128)
            for k, c in f.coeffs.items():
                acc += (c * cmath.exp(2j * math.pi * sum(ki * xi for ki, xi in zip(k, x)))) * row[k]
            prod *= acc
        out.append(complex(math.fsum(prod.real), math.fsum(prod.imag)) / len(v))
    return np.array(out)


def _scaled(hl, bits):
    """2^bits * x reduced mod 1, still as a double-double pair."""
    hi, lo = hl[0] * 2.0 ** bits, hl[1] * 2.0 ** bits
    hi -= math.floor(hi)
    return hi, lo


def _split(hl):
    hi, lo = hl
    c = 134217729.0 * hi  # 2^27 + 1
    a1 = c - (c - hi)
    return a1, hi - a1, lo


def _frac_product(vf, a1, a2, lo):
    """frac(v * alpha) for 0 <= v < 2^26, where v*a1 is exact."""
    p1 = vf * a1
    return np.mod(p1, 1.0) + np.mod(vf * a2 + vf * lo, 1.0)


@dataclass
class ErgodicityReport:
    N: list
    cond_i: dict = field(default_factory=dict)  # "i-j" -> [max over characters per N]
    cond_ii: list = field(default_factory=list)
    average_deviation: list = field(default_factory=list)
    threshold: float = DEFAULT_THRESHOLD
    char_cutoff: int = 5
    product_cutoff: int = 5

    @property
    def cond_i_max(self) -> list:
        if not self.cond_i:
            return [0.0] * len(self.N)
        return [max(v[j] for v in self.cond_i.values()) for j in range(len(self.N))]

    @staticmethod
    def _trend_ok(seq):
        return all(b <= a for a, b in zip(seq, seq[1:]))

    @property
    def cond_i_holds(self) -> bool:
        s = self.cond_i_max
        return s[-1] < self.threshold and self._trend_ok(s)

    @property
    def cond_ii_holds(self) -> bool:
        s = self.cond_ii
        return s[-1] < self.threshold and self._trend_ok(s)

    @property
    def verdict(self) -> bool:
        return self.cond_i_holds and self.cond_ii_holds

    def to_json(self):
        return {"N": self.N, "cond_i": self.cond_i, "cond_i_max": self.cond_i_max,
                "cond_ii": self.cond_ii, "average_deviation": self.average_deviation,
                "threshold": self.threshold, "char_cutoff": self.char_cutoff,
                "product_cutoff": self.product_cutoff, "cond_i_holds": self.cond_i_holds,
                "cond_ii_holds": self.cond_ii_holds, "verdict": self.verdict}


def condition_check(system: TorusSystem, values, char_cutoff: int = 5, product_cutoff: int = 5,
                    checkpoints: Optional[Sequence[int]] = None,
                    threshold: float = DEFAULT_THRESHOLD,
                    test_functions: Optional[Sequence[TrigPoly]] = None,
                    threads: int = 1) -> ErgodicityReport:
    """Conditions (i) and (ii) for (T_i^{values[n]})_i at every checkpoint N.

    (i): the sequences (T_i T_j^{-1})^{v_n}, i < j, are ergodic;
    (ii): (T_1 x ... x T_d)^{v_n} is ergodic on the product.
    The verdict needs the last value below threshold and no increase
    across checkpoints.  With test functions the multiple-average deviation
    is recorded next to them.
    """
    checkpoints = list(checkpoints or [len(values)])
    rep = ErgodicityReport(checkpoints, threshold=threshold, char_cutoff=char_cutoff,
                           product_cutoff=product_cutoff)
    for i, j in itertools.combinations(range(system.d), 2):
        g = [0] * system.d
        g[i], g[j] = 1, -1
        rep.cond_i[f"{i + 1}-{j + 1}"] = [sequence_ergodic(system, g, values[:N], char_cutoff, threads)
                                          for N in checkpoints]
    rep.cond_ii = [product_ergodic(system, values[:N], product_cutoff, threads) for N in checkpoints]
    if test_functions is not None:
        rep.average_deviation = [multiple_average(system, test_functions, values[:N],
                                                  threads=threads)[1] for N in checkpoints]
    return rep


def cond_expect_invariant(f: TrigPoly, gens: Sequence[Sequence[ExactReal]]) -> TrigPoly:
    """E(f | I(H)) for H generated by rotations with the given vectors:
    keep exactly the frequencies k with k.theta in Z for every generator."""
    gens = [tuple(ExactReal.parse(t) for t in ((g,) if not isinstance(g, (list, tuple)) else g))
            for g in gens]
    keep = {k: c for k, c in f.coeffs.items() if all(dot(k, th).is_integer for th in gens)}
    return TrigPoly(f.m, keep)
