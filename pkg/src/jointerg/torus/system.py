"""Commuting rotations on the m-torus and trigonometric-polynomial observables."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .exact import ExactReal


@dataclass(frozen=True)
class TorusSystem:
    """Z^d-action T_g x = x + sum_i g_i alpha[i] (mod 1) on T^m."""

    m: int
    d: int
    alpha: tuple  # d rows of m ExactReal

    def __post_init__(self):
        if len(self.alpha) != self.d or any(len(a) != self.m for a in self.alpha):
            raise ValueError("alpha must be a d x m table")

    @classmethod
    def from_table(cls, alpha: Sequence) -> "TorusSystem":
        rows = []
        for row in alpha:
            if isinstance(row, (str, int, ExactReal)):
                row = [row]
            rows.append(tuple(ExactReal.parse(c) for c in row))
        m = len(rows[0]) if rows else 0
        return cls(m, len(rows), tuple(rows))

    def theta(self, g: Sequence[int]) -> tuple:
        """Rotation vector of T_g."""
        if len(g) != self.d:
            raise ValueError(f"direction {g} is not in Z^{self.d}")
        out = [ExactReal() for _ in range(self.m)]
        for gi, row in zip(g, self.alpha):
            if gi:
                out = [o + a * gi for o, a in zip(out, row)]
        return tuple(out)

    def to_json(self):
        return {"m": self.m, "d": self.d, "alpha": [[str(c) for c in row] for row in self.alpha]}


def dot(k: Sequence[int], theta: Sequence[ExactReal]) -> ExactReal:
    out = ExactReal()
    for ki, t in zip(k, theta):
        if ki:
            out = out + t * ki
    return out


class TrigPoly:
    """Finite Fourier series sum_k c_k e(k.x) on T^m."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: Mapping):
        self.m = m
        clean = {}
        for k, c in coeffs.items():
            k = (k,) if isinstance(k, int) else tuple(k)
            if len(k) != m:
                raise ValueError(f"frequency {k} is not in Z^{m}")
            if c != 0:
                clean[k] = clean.get(k, 0) + complex(c)
        self.coeffs = {k: c for k, c in sorted(clean.items()) if c != 0}

    @classmethod
    def constant(cls, m: int, c) -> "TrigPoly":
        return cls(m, {(0,) * m: c})

    @classmethod
    def character(cls, k: Sequence[int], c=1) -> "TrigPoly":
        k = tuple(k)
        return cls(len(k), {k: c})

    @property
    def mean(self) -> complex:
        return self.coeffs.get((0,) * self.m, 0j)

    @property
    def l2(self) -> float:
        return math.sqrt(math.fsum(abs(c) ** 2 for c in self.coeffs.values()))

    @property
    def sup_bound(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs.values())

    @property
    def support(self) -> list:
        return list(self.coeffs)

    def conj(self) -> "TrigPoly":
        return TrigPoly(self.m, {tuple(-x for x in k): c.conjugate() for k, c in self.coeffs.items()})

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return TrigPoly(self.m, out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) - c
        return TrigPoly(self.m, out)

    def shift(self, theta: Sequence[ExactReal]) -> "TrigPoly":
        """f(x + theta): coefficient at k picks up e(k.theta)."""
        return TrigPoly(self.m, {k: c * _e(float(dot(k, theta).frac())) for k, c in self.coeffs.items()})

    def __call__(self, x: Sequence[float]) -> complex:
        return sum(c * _e(sum(ki * xi for ki, xi in zip(k, x))) for k, c in self.coeffs.items())

    def __eq__(self, other):
        return isinstance(other, TrigPoly) and self.m == other.m and self.coeffs == other.coeffs

    def to_json(self):
        return [{"k": list(k), "re": c.real, "im": c.imag} for k, c in self.coeffs.items()]

    def __repr__(self):
        return f"TrigPoly({self.coeffs})"


def _e(t: float) -> complex:
    return cmath.exp(2j * math.pi * t)
