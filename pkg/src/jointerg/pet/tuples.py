"""PET-tuples, the van der Corput operation and the reduction to degree 1."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from ..errors import Degenerate, DegenerateInput, Nontermination, StrategyFailed
from .coeff import ONE, ZERO, CoeffExpr, parse_coeff
from .poly import PetPolynomial


@dataclass(frozen=True)
class VdcRecord:
    """One applied operation: q' indices are 1-based over the 2*ell candidates."""

    t: int
    inherited: bool
    dropped: tuple
    groups: tuple


@dataclass(frozen=True)
class PetTuple:
    s: int
    ell: int
    polys: tuple
    d: int
    trace: tuple = field(default=(), compare=False)
    origin: Optional["PetTuple"] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.polys) != self.ell or self.ell < 1:
            raise ValueError("ell must equal the number of polynomials and be >= 1")
        for q in self.polys:
            if (q.s, q.d) != (self.s, self.d):
                raise ValueError("polynomial does not live in (n; h_1..h_s) x R^d")

    @property
    def root(self) -> "PetTuple":
        """The make_tuple input this tuple descends from (itself if none recorded)."""
        return self.origin if self.origin is not None else self

    @property
    def degree(self) -> int:
        """deg(A): the largest n-degree among the iterates."""
        return max(q.n_degree for q in self.polys)

    @property
    def is_one_standard(self) -> bool:
        return self.polys[0].n_degree == self.degree

    def degeneracy(self) -> Optional[tuple]:
        """None when non-degenerate, else the 1-based witness (i,) or (i, j)."""
        seen: dict = {}
        for i, q in enumerate(self.polys, 1):
            key = q.nonconstant()
            if not key:
                return (i,)
            if key in seen:
                return (seen[key], i)
            seen[key] = i
        return None

    @property
    def is_nondegenerate(self) -> bool:
        return self.degeneracy() is None

    @property
    def generators(self) -> set:
        return set().union(*(q.generators for q in self.polys))

    def to_json(self) -> dict:
        return {"s": self.s, "ell": self.ell, "d": self.d, "degree": self.degree,
                "polys": [q.to_str() for q in self.polys]}

    def __str__(self):
        return f"({self.s}, {self.ell}, ({', '.join(q.to_str() for q in self.polys)}))"


def _coerce(c, generators) -> CoeffExpr:
    if isinstance(c, CoeffExpr):
        return c
    if isinstance(c, (int, Fraction)):
        return CoeffExpr.const(c)
    return parse_coeff(str(c), generators)


def _vector(v, d, generators):
    if isinstance(v, (str, int, Fraction, CoeffExpr)):
        v = [v]
    v = [_coerce(c, generators) for c in v]
    if len(v) != d:
        raise ValueError(f"coefficient vector {v} has length {len(v)}, expected {d}")
    return tuple(v)


def unit(d: int, j: int) -> tuple:
    return tuple(ONE if i == j else ZERO for i in range(1, d + 1))


def make_tuple(d: int, ell: int, K: int, lower_order: Optional[Mapping] = None,
               leading: Optional[Sequence] = None, generators: Sequence[str] = ()) -> PetTuple:
    """(0, ell, (e_j n^K + p'_j)) with p'_j read from ``lower_order[j][v]`` (1-based j).

    ``leading`` overrides the e_j leading vectors; it is the only way to
    build a tuple with ell > d.
    """
    if K < 1 or ell < 1 or d < 1:
        raise ValueError("d, ell and K must be positive")
    if leading is None:
        if ell > d:
            raise ValueError("default leading vectors e_j need ell <= d")
        leading = [unit(d, j) for j in range(1, ell + 1)]
    else:
        leading = [_vector(v, d, generators) for v in leading]
    lower_order = lower_order or {}
    polys = []
    for j in range(1, ell + 1):
        terms = {(K, ()): leading[j - 1]}
        for v, vec in (lower_order.get(j) or lower_order.get(str(j)) or {}).items():
            v = int(v)
            if not 0 <= v < K:
                raise ValueError(f"lower-order term n^{v} is not below K={K}")
            terms[(v, ())] = _vector(vec, d, generators)
        polys.append(PetPolynomial(0, d, terms))
    A = PetTuple(0, ell, tuple(polys), d)
    bad = A.degeneracy()
    if bad is not None:
        raise Degenerate(f"iterates {bad} are essentially constant or essentially equal",
                         witness=bad)
    return A


def vdc(A: PetTuple, t: int, rng: Optional[random.Random] = None) -> PetTuple:
    """The operation A -> d_t A (Steps 1-3).

    ``rng`` shuffles every group after the first; the default order is by
    smallest member index.
    """
    if not 1 <= t <= A.ell:
        raise ValueError(f"t={t} outside 1..{A.ell}")
    bad = A.degeneracy()
    if bad is not None:
        raise DegenerateInput(f"input iterates {bad} are degenerate", witness=bad)
    neg_qt = -A.polys[t - 1].extend(A.s + 1)
    primes = ([q.shift() + neg_qt for q in A.polys]
              + [q.extend(A.s + 1) + neg_qt for q in A.polys])
    dropped, groups, index = [], [], {}
    for i, q in enumerate(primes, 1):
        key = q.nonconstant()
        if not key:
            dropped.append(i)
        elif key in index:
            groups[index[key]].append(i)
        else:
            index[key] = len(groups)
            groups.append([i])
    if not groups:
        raise DegenerateInput("every candidate iterate is essentially constant")
    if rng is not None and len(groups) > 2:
        rest = groups[1:]
        rng.shuffle(rest)
        groups = groups[:1] + rest
    inherited = groups[0] == [1]
    rec = VdcRecord(t, inherited, tuple(dropped), tuple(tuple(g) for g in groups))
    reps = tuple(primes[g[0] - 1] for g in groups)
    return PetTuple(A.s + 1, len(reps), reps, A.d, A.trace + (rec,), A.root)


def _key(q: PetPolynomial):
    return q.nonconstant()


def choose_t(A: PetTuple) -> int:
    """Classic PET weighting.

    Among j != 1 whose leading term differs from q_1's, pick the minimal
    n-degree; without such j, the minimal-degree iterate j != 1.  Ties are
    broken by the nonconstant part, which is shared by a whole group, so the
    choice does not depend on how groups were ordered.
    """
    if A.ell == 1:
        return 1
    lead1 = A.polys[0].leading()
    idx = range(2, A.ell + 1)
    cands = [j for j in idx if A.polys[j - 1].leading() != lead1] or list(idx)
    return min(cands, key=lambda j: (A.polys[j - 1].n_degree, _key(A.polys[j - 1]), j))


def step_budget(A: PetTuple) -> int:
    return 2 ** (A.degree * A.ell * (A.d + 2))


MAX_ITERATES = 4096


def reduce(A: PetTuple, rng: Optional[random.Random] = None, max_steps: Optional[int] = None,
           max_iterates: int = MAX_ITERATES):
    """Apply vdc until deg = 1; returns (trace, final) with trace = [(t, tuple), ...].

    Every step must be 1-inherited, and every intermediate tuple 1-standard
    and non-degenerate; a failure raises StrategyFailed with the step index.
    Each step at a lower degree doubles the iterates above it, so a tuple
    with more than ``max_iterates`` iterates stops the run with Nontermination.
    """
    bad = A.degeneracy()
    if bad is not None:
        raise DegenerateInput(f"input iterates {bad} are degenerate", witness=bad)
    if A.degree < 1 or not A.is_one_standard:
        raise StrategyFailed("input must be 1-standard of degree >= 1", step=0)
    budget = step_budget(A) if max_steps is None else max_steps
    trace = []
    while A.degree > 1:
        if len(trace) >= budget:
            raise Nontermination(f"step budget {budget} exhausted", steps=len(trace))
        t = choose_t(A)
        B = vdc(A, t, rng)
        step = len(trace) + 1
        if not B.trace[-1].inherited:
            raise StrategyFailed(f"step {step} (t={t}) is not 1-inherited", step=step, t=t)
        if not B.is_one_standard:
            raise StrategyFailed(f"step {step} (t={t}) is not 1-standard", step=step, t=t)
        if not B.is_nondegenerate:
            raise StrategyFailed(f"step {step} (t={t}) is degenerate", step=step, t=t)
        trace.append((t, B))
        A = B
        if A.ell > max_iterates and A.degree > 1:
            raise Nontermination(f"{A.ell} iterates after {len(trace)} steps exceed the cap"
                                 f" {max_iterates}", steps=len(trace), iterates=A.ell)
    return trace, A
