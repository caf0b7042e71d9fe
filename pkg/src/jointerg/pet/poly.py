"""Vector-valued polynomials in (n; h_1..h_s) over CoeffExpr."""
from __future__ import annotations

import math

from .coeff import ZERO, CoeffExpr


def _vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vscale(u, r):
    if r == 1:
        return u
    return tuple(a.scale(r) for a in u)


def _is_zero(u):
    return all(a.is_zero for a in u)


class PetPolynomial:
    """Sparse map (b, (a_1..a_s)) -> coefficient vector of length d.

    Immutable; zero vectors are never stored, so the n-degree is exact.
    """

    __slots__ = ("s", "d", "terms", "_hash", "_map")

    def __init__(self, s: int, d: int, terms=None):
        self.s, self.d = s, d
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        clean = {}
        for (b, a), vec in items:
            if len(a) != s or len(vec) != d:
                raise ValueError("exponent or vector length mismatch")
            if not _is_zero(vec):
                clean[(b, tuple(a))] = tuple(vec)
        self.terms = tuple(sorted(clean.items()))
        self._map = clean
        self._hash = hash((s, d, self.terms))

    @classmethod
    def monomial(cls, s, d, b, a, vec):
        return cls(s, d, {(b, tuple(a)): tuple(vec)})

    @classmethod
    def zero(cls, s, d):
        return cls(s, d)

    # ---------------------------------------------------------------- algebra
    def _merge(self, other, sign):
        if (self.s, self.d) != (other.s, other.d):
            raise ValueError("incompatible polynomials")
        out = dict(self.terms)
        for k, v in other.terms:
            v = v if sign > 0 else tuple(-a for a in v)
            out[k] = _vadd(out[k], v) if k in out else v
        return PetPolynomial(self.s, self.d, out)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __neg__(self):
        return PetPolynomial(self.s, self.d, {k: tuple(-a for a in v) for k, v in self.terms})

    def scale(self, r):
        return PetPolynomial(self.s, self.d, {k: _vscale(v, r) for k, v in self.terms})

    def extend(self, s_new: int) -> "PetPolynomial":
        """Same polynomial viewed in s_new >= s h-variables."""
        pad = (0,) * (s_new - self.s)
        return PetPolynomial(s_new, self.d, {(b, a + pad): v for (b, a), v in self.terms})

    def shift(self) -> "PetPolynomial":
        """q(n + h_{s+1}; h_1..h_s) as a polynomial in s+1 h-variables."""
        out: dict = {}
        for (b, a), v in self.terms:
            for i in range(b + 1):
                key = (i, a + (b - i,))
                w = _vscale(v, math.comb(b, i))
                out[key] = _vadd(out[key], w) if key in out else w
        return PetPolynomial(self.s + 1, self.d, out)

    # ---------------------------------------------------------------- queries
    @property
    def n_degree(self) -> int:
        """max b with a nonzero coefficient; -1 for the zero polynomial."""
        return max((b for (b, _), _ in self.terms), default=-1)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def nonconstant(self) -> tuple:
        """Terms with b >= 1; two polynomials are essentially equal iff these agree."""
        return tuple(t for t in self.terms if t[0][0] >= 1)

    def leading(self) -> tuple:
        deg = self.n_degree
        return deg, tuple(t for t in self.terms if t[0][0] == deg)

    def coeff(self, b: int, a: tuple):
        v = self._map.get((b, tuple(a)))
        return v if v is not None else (ZERO,) * self.d

    def n_coefficient(self, b: int) -> dict:
        """h-polynomial multiplying n^b, as {a: vector}."""
        return {a: v for (bb, a), v in self.terms if bb == b}

    @property
    def generators(self) -> set:
        return {g for _, v in self.terms for c in v for g in c.generators}

    def __eq__(self, other):
        return (isinstance(other, PetPolynomial) and (self.s, self.d, self.terms)
                == (other.s, other.d, other.terms))

    def __hash__(self):
        return self._hash

    def to_str(self, basis: str = "e") -> str:
        if not self.terms:
            return "0"
        parts = []
        for (b, a), vec in sorted(self.terms, key=lambda t: (-t[0][0], t[0][1])):
            mono = []
            if b:
                mono.append("n" if b == 1 else f"n^{b}")
            for j, e in enumerate(a, 1):
                if e:
                    mono.append(f"h{j}" if e == 1 else f"h{j}^{e}")
            coeff = _vec_str(vec, basis)
            if mono and coeff in ("1", "-1"):
                parts.append(coeff[:-1] + "*".join(mono))
            else:
                parts.append("*".join([coeff] + mono))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [{"n": b, "h": list(a), "coeff": [str(c) for c in v]} for (b, a), v in self.terms]

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"PetPolynomial({self.to_str()!r})"


def _vec_str(vec, basis):
    nz = [(j, c) for j, c in enumerate(vec, 1) if not c.is_zero]
    if len(vec) == 1:
        return _paren(vec[0])
    parts = [f"{_paren(c)}*{basis}{j}" if c != CoeffExpr.const(1) else f"{basis}{j}" for j, c in nz]
    return "(" + " + ".join(parts) + ")"


def _paren(c):
    s = str(c)
    return f"({s})" if " " in s else s
