"""Coefficient tracking: level data, types and symbols, (P1)-(P4), and the
group inclusion used to read off the seminorm directions.

Generators are treated as Q-linearly independent together with 1, so
span_Q computations flatten every vector onto the monomial basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import (ClaimViolated, P1Violation, P2Violation, P3Violation, P4Violation)
from .coeff import ZERO
from .tuples import PetTuple, unit


def multinomial(b: int, a: tuple) -> int:
    out, total = 1, b
    for x in a:
        total += x
        out *= math.comb(total, x)
    return out


def _levels(s: int, K: int):
    """(b; a) with b >= 1, a in N_0^s and b + |a| <= K, in a fixed order."""
    for total in range(1, K + 1):
        for b in range(total, 0, -1):
            for a in _compositions(total - b, s):
                yield (b, a)


def _compositions(n: int, parts: int):
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def _vsub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def _vadd(u, v):
    return tuple(x + y for x, y in zip(u, v))


def _vscale(u, r):
    return tuple(x.scale(r) for x in u)


def _nonzero(u):
    return any(not x.is_zero for x in u)


class _Reference:
    """b_{i,v} of the original family p, with b_{0,v} = 0."""

    def __init__(self, p: PetTuple):
        if p.s != 0:
            raise ValueError("reference family must have no h-variables")
        self.k, self.d = p.ell, p.d
        self.K = p.degree
        zero = (ZERO,) * p.d
        self.B = [[zero] * (self.K + 1)]
        for q in p.polys:
            self.B.append([q.coeff(v, ()) for v in range(self.K + 1)])
        self.lookup = []
        for v in range(self.K + 1):
            table: dict = {}
            for w in range(self.k + 1):
                table.setdefault(self.B[w][v], []).append(w)
            self.lookup.append(table)
        self._memo: dict = {}

    def b(self, w, v):
        return self.B[w][v] if v <= self.K else (ZERO,) * self.d

    def symbols(self, u: tuple, r, v: int, i: int):
        """Per-coordinate sets {w : u_m = r(b_{w,v} - b_{i,v})}."""
        if v > self.K:
            return [set(range(self.k + 1)) if not _nonzero(um) else set() for um in u]
        out = []
        for um in u:
            key = (um, r, v, i)
            hit = self._memo.get(key)
            if hit is None:
                target = _vadd(_vscale(um, Fraction(1) / r), self.B[i][v])
                hit = self._memo[key] = frozenset(self.lookup[v].get(target, ()))
            out.append(set(hit))
        return out


@dataclass(frozen=True)
class LevelAssignment:
    level: tuple
    u: tuple
    r: int
    i: int
    v: int
    w: tuple


@dataclass
class LevelReport:
    ok: bool
    assignments: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)

    def to_json(self) -> list:
        return [{"b": lv[0], "a": list(lv[1]), "r": x.r, "i": x.i, "v": x.v, "w": list(x.w)}
                for lv, x in self.assignments.items()]


def _level_vector(A: PetTuple, level):
    b, a = level
    return tuple(q.coeff(b, a) for q in A.polys)


def _any_type(ref: _Reference, u: tuple) -> Optional[tuple]:
    """Search every (r, i, v) for a type, ignoring (P2)."""
    for v in range(ref.K + 1):
        for i in range(ref.k + 1):
            base = _vsub(ref.b(1, v), ref.b(i, v))
            if _nonzero(base):
                r = _ratio(u[0], base)
                candidates = [] if r is None else [r]
            elif _nonzero(u[0]):
                continue
            else:
                candidates = _ratios_from(ref, u, v, i)
            for r in candidates:
                if r == 0:
                    if not any(_nonzero(um) for um in u):
                        return (r, i, v)
                    continue
                sets = ref.symbols(u, r, v, i)
                if 1 in sets[0] and all(sets):
                    return (r, i, v)
    return None


def _ratio(u, base) -> Optional[Fraction]:
    """r with u = r*base, if it exists."""
    for x, y in zip(u, base):
        if not y.is_zero:
            lead_m, lead_c = y.terms[0]
            coeff = dict(x.terms).get(lead_m)
            if coeff is None:
                return Fraction(0) if not _nonzero(u) else None
            r = coeff / lead_c
            return r if _vscale(base, r) == tuple(u) else None
    return None


def _ratios_from(ref, u, v, i):
    out = {Fraction(1)}
    for um in u:
        if _nonzero(um):
            for w in range(ref.k + 1):
                r = _ratio(um, _vsub(ref.b(w, v), ref.b(i, v)))
                if r:
                    out.add(r)
    return sorted(out)


def level_check(A: PetTuple, p: Optional[PetTuple] = None) -> LevelReport:
    """Assign a type and symbol to every level u(q, b; a), b >= 1, of A.

    Levels run over a in N_0^s with b + |a| up to deg p, plus any other
    nonzero level of A.  Types are fixed by (P2), w_1 = 1 by (P4), and levels
    with the same zero pattern in a must share i and w (P3).
    """
    p = A.root if p is None else p
    ref = _Reference(p)
    levels = list(_levels(A.s, ref.K))
    seen = set(levels)
    for q in A.polys:
        for (b, a), _ in q.terms:
            if b >= 1 and (b, a) not in seen:
                seen.add((b, a))
                levels.append((b, a))

    feasible = {}
    for lv in levels:
        b, a = lv
        u = _level_vector(A, lv)
        r, v = multinomial(b, a), b + sum(a)
        options = {}
        loose = False
        for i in range(ref.k + 1):
            sets = ref.symbols(u, r, v, i)
            if all(sets):
                loose = True
                if 1 in sets[0]:
                    options[i] = sets
        if not options:
            data = {"u": [[str(c) for c in um] for um in u], "r": r, "v": v}
            if loose:
                raise P4Violation(f"level {lv}: no symbol with w_1 = 1", level=lv, **data)
            alt = _any_type(ref, u)
            if alt is not None:
                raise P2Violation(f"level {lv} has type p{alt}, not the one fixed by (P2)",
                                  level=lv, found=alt, **data)
            raise P1Violation(f"level {lv} is of no type p(r, i, v)", level=lv, **data)
        feasible[lv] = (u, r, v, options)

    report = LevelReport(True)
    patterns: dict = {}
    for lv in levels:
        patterns.setdefault(tuple(x != 0 for x in lv[1]), []).append(lv)
    for pat, members in patterns.items():
        chosen = None
        common_i = set.intersection(*(set(feasible[lv][3]) for lv in members))
        for i in sorted(common_i):
            per_m = [set.intersection(*(feasible[lv][3][i][m] for lv in members))
                     for m in range(A.ell)]
            if 1 in per_m[0] and all(per_m):
                chosen = (i, (1,) + tuple(min(s) for s in per_m[1:]))
                break
        if chosen is None:
            raise P3Violation(f"levels with zero pattern {pat} share no (i, w)",
                              level=members[0], members=members)
        report.classes[pat] = chosen
        for lv in members:
            u, r, v, _ = feasible[lv]
            report.assignments[lv] = LevelAssignment(lv, u, r, chosen[0], v, chosen[1])
    return report


# ---------------------------------------------------------------- inclusion

def _flatten(vec) -> dict:
    out = {}
    for j, c in enumerate(vec):
        out.update(c.flat(j))
    return out


class _RationalSpan:
    """Row-reduced basis of a Q-span of sparse vectors."""

    def __init__(self):
        self.rows: list = []  # (pivot, dict)

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        for pivot, row in self.rows:
            c = vec.get(pivot)
            if c:
                for k, x in row.items():
                    y = vec.get(k, 0) - c * x
                    if y:
                        vec[k] = y
                    else:
                        vec.pop(k, None)
        return vec

    def add(self, vec: dict) -> bool:
        vec = self.reduce(vec)
        if not vec:
            return False
        pivot = min(vec)
        scale = vec[pivot]
        vec = {k: x / scale for k, x in vec.items()}
        for idx, (pv, row) in enumerate(self.rows):
            c = row.get(pivot)
            if c:
                new = {k: row.get(k, 0) - c * vec.get(k, 0) for k in set(row) | set(vec)}
                self.rows[idx] = (pv, {k: x for k, x in new.items() if x})
        self.rows.append((pivot, vec))
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self):
        return len(self.rows)


@dataclass
class InclusionReport:
    witness: dict  # m -> j or None

    @property
    def ok(self) -> bool:
        return all(j is not None for j in self.witness.values())

    def to_json(self):
        return {str(m): j for m, j in self.witness.items()}


def top_difference(p: PetTuple, i: int, j: int):
    """(v_{i,j}, b_{i,v} - b_{j,v}) at the largest v where p_i and p_j differ."""
    ref = _Reference(p)
    for v in range(ref.K, -1, -1):
        diff = _vsub(ref.b(i, v), ref.b(j, v))
        if _nonzero(diff):
            return v, diff
    return None, None


def group_inclusion(A: PetTuple, p: Optional[PetTuple] = None) -> InclusionReport:
    """For each m in {0, 2..ell}: some j != 1 with G'_{1,j}(p) inside H_{1,m}(A)."""
    p = A.root if p is None else p
    gens = {}  # prefer the e_1 - e_j groups, then j = 0
    for j in list(range(2, p.ell + 1)) + [0]:
        _, diff = top_difference(p, 1, j)
        if diff is not None:
            gens[j] = _flatten(diff)
    witness = {}
    keys = set()
    for q in A.polys:
        keys.update(k for k, _ in q.terms if k[0] >= 1)
    for m in [0] + list(range(2, A.ell + 1)):
        span = _RationalSpan()
        for key in sorted(keys):
            u1 = A.polys[0].coeff(*key)
            um = A.polys[m - 1].coeff(*key) if m else (ZERO,) * A.d
            span.add(_flatten(_vsub(u1, um)))
        witness[m] = next((j for j, g in gens.items() if span.contains(g)), None)
    return InclusionReport(witness)


# ---------------------------------------------------------------- linear coefficients

@dataclass(frozen=True)
class LinearCoeff:
    """c_m(h): {a: integer vector}."""

    terms: tuple

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a, vec in self.terms:
            mono = "*".join(f"h{i}" if e == 1 else f"h{i}^{e}" for i, e in enumerate(a, 1) if e)
            for j, c in enumerate(vec, 1):
                if c:
                    lead = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                    parts.append(f"{lead}{mono + '*' if mono else ''}e{j}")
        return " + ".join(parts).replace("+ -", "- ")


def linear_coeffs(final: PetTuple, check_origin: bool = True) -> list:
    """n-linear coefficients c_m(h) of a degree-1 tuple, which must be integer and N-free.

    With ``check_origin`` the recorded make_tuple input must also have the
    standard basis vectors as leading coefficients, the hypothesis under
    which integrality is asserted.
    """
    if final.degree != 1:
        raise ValueError(f"final tuple has degree {final.degree}, expected 1")
    if check_origin and final.origin is not None:
        root = final.origin
        K = root.degree
        allowed = {unit(root.d, j) for j in range(1, root.d + 1)}
        for j, q in enumerate(root.polys, 1):
            lead = q.coeff(K, ())
            if lead not in allowed:
                raise ClaimViolated(f"leading vector of p_{j} is {[str(c) for c in lead]},"
                                    " not a standard basis vector", iterate=j)
    out = []
    for m, q in enumerate(final.polys, 1):
        terms = []
        for a, vec in sorted(q.n_coefficient(1).items()):
            ints = []
            for c in vec:
                if not c.is_rational:
                    raise ClaimViolated(f"c_{m} depends on generators {sorted(c.generators)}",
                                        iterate=m, h=a)
                r = c.rational()
                if r.denominator != 1:
                    raise ClaimViolated(f"c_{m} has non-integer entry {r}", iterate=m, h=a)
                ints.append(int(r))
            terms.append((a, tuple(ints)))
        out.append(LinearCoeff(tuple(terms)))
    return out


# ---------------------------------------------------------------- seminorm

SINGLE_CONDITION = "E(f (x) conj(f) | I((T_1 x T_1)^a)) = 0 for all a != 0"


@dataclass(frozen=True)
class SeminormSpec:
    mode: str
    directions: tuple = ()
    D: int = 2
    D_authoritative: bool = False
    condition: str = ""

    def to_json(self):
        return {"mode": self.mode, "directions": [list(v) for v in self.directions],
                "D": self.D, "D_authoritative": self.D_authoritative,
                "condition": self.condition}

    def __str__(self):
        if self.mode == "single":
            return f"single: {self.condition}"
        dirs = ", ".join(str(tuple(v)) for v in self.directions)
        return f"multi: {{{dirs}}} each with multiplicity D={self.D} (not authoritative)"


def seminorm_spec(A: PetTuple, D: int = 2) -> SeminormSpec:
    """Directions {e_1} and {e_1 - e_j} read from the leading vectors of the source tuple."""
    root = A.root
    if root.ell == 1:
        return SeminormSpec("single", condition=SINGLE_CONDITION, D=D)
    K = root.degree
    leads = []
    for q in root.polys:
        vec = []
        for c in q.coeff(K, ()):
            if not c.is_rational or c.rational().denominator != 1:
                raise ValueError("seminorm directions need integer leading vectors")
            vec.append(int(c.rational()))
        leads.append(tuple(vec))
    dirs = [leads[0]] + [tuple(x - y for x, y in zip(leads[0], l)) for l in leads[1:]]
    return SeminormSpec("multi", tuple(dirs), D)
