"""Host-Kra seminorms of trigonometric polynomials under torus rotations.

For a rotation the cube measure mu_{H_1..H_k} is the law of
(x + sum_j eps_j t_j)_eps with x Haar on T^m and t_j Haar on the closed
subgroup Z_j generated by theta_j.  Integrating characters over Z_j keeps
exactly the exponents m with m.theta_j in Z.
"""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from ..errors import CapExceeded, CombinatorialBlowup
from .exact import BASIS, ExactReal
from .system import TorusSystem, TrigPoly, dot

DIRECTION_CAP = 6
STATE_CAP = 2_000_000


def _expand_directions(directions) -> list:
    """Accept [g, ...] or [(g, multiplicity), ...]."""
    out = []
    for item in directions:
        if (isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], int)
                and isinstance(item[0], (tuple, list))):
            out.extend([tuple(item[0])] * item[1])
        else:
            out.append(tuple(item))
    return out


def _label_code(theta):
    """Integer encoding of b -> -(b.theta) mod 1.

    With D the common denominator of theta's coordinates over the basis,
    D*(b.theta) is an integer vector; its rational slot is kept mod D.
    Returns (D, per-coordinate integer vectors).
    """
    slots = ("1",) + BASIS
    D = 1
    for t in theta:
        D = math.lcm(D, t.rat.denominator, *(v.denominator for _, v in t.irr))
    vecs = []
    for t in theta:
        irr = dict(t.irr)
        vecs.append(tuple(int(D * (t.rat if s == "1" else irr.get(s, 0))) for s in slots))
    return D, vecs


def _label(b, D, vecs):
    out = [0] * len(vecs[0]) if vecs else []
    for bi, v in zip(b, vecs):
        if bi:
            out = [o - bi * x for o, x in zip(out, v)]
    if out:
        out[0] %= D
    return tuple(out)


def host_kra_power(system: TorusSystem, f: TrigPoly, directions, cap: int = DIRECTION_CAP,
                   state_cap: int = STATE_CAP) -> complex:
    """|||f|||^(2^k): one direction at a time, F <- F * conj(F(. + t_j)).

    States are keyed by (frequency, labels) where label j encodes the
    exponent of t_j through its pairing with theta_j mod 1.
    """
    dirs = _expand_directions(directions)
    if len(dirs) > cap:
        raise CapExceeded(f"{len(dirs)} directions exceed the cap {cap}", k=len(dirs))
    codes = [_label_code(system.theta(g)) for g in dirs]
    state = {(k, ()): c for k, c in f.coeffs.items()}
    mods = [c[0] for c in reversed(codes)]
    for D, vecs in reversed(codes):
        if len(state) ** 2 > state_cap:
            raise CombinatorialBlowup(f"{len(state)} cube states square past {state_cap}",
                                      states=len(state))
        new: dict = {}
        items = list(state.items())
        shifted = [(b, Lb, cb.conjugate(), _label(b, D, vecs)) for (b, Lb), cb in items]
        for (a, La), ca in items:
            for b, Lb, cbc, lab in shifted:
                K = tuple(x - y for x, y in zip(a, b))
                L = tuple(_sub(x, y, Dx) for x, y, Dx in zip(La, Lb, mods))
                key = (K, L + (lab,))
                new[key] = new.get(key, 0) + ca * cbc
        state = {key: c for key, c in new.items() if c != 0}
    zero = (0,) * f.m
    return sum((c for (K, L), c in state.items() if K == zero and not any(any(l) for l in L)),
               0j)


def _sub(x, y, D):
    out = [p - q for p, q in zip(x, y)]
    if out:
        out[0] %= D
    return tuple(out)


def host_kra(system: TorusSystem, f: TrigPoly, directions, cap: int = DIRECTION_CAP) -> float:
    """|||f||| for the listed directions g in Z^d (repeat a g for multiplicity)."""
    k = len(_expand_directions(directions))
    p = host_kra_power(system, f, directions, cap).real
    return max(p, 0.0) ** (1.0 / 2 ** k)


def host_kra_bruteforce(system: TorusSystem, f: TrigPoly, directions) -> complex:
    """The cube frequency formula enumerated literally over eps -> k_eps (small k only)."""
    dirs = _expand_directions(directions)
    k = len(dirs)
    thetas = [system.theta(g) for g in dirs]
    cube = list(itertools.product((0, 1), repeat=k))
    supp = list(f.coeffs.items())
    if len(supp) ** len(cube) > 5_000_000:
        raise CombinatorialBlowup("brute-force enumeration too large")
    total = 0j
    for choice in itertools.product(supp, repeat=len(cube)):
        s = [0] * f.m
        w = 1 + 0j
        for eps, (kv, c) in zip(cube, choice):
            sign = -1 if sum(eps) % 2 else 1
            s = [x + sign * y for x, y in zip(s, kv)]
            w *= c.conjugate() if sign < 0 else c
        if any(s):
            continue
        ok = True
        for j, th in enumerate(thetas):
            mj = [0] * f.m
            for eps, (kv, _) in zip(cube, choice):
                if eps[j]:
                    sign = -1 if sum(eps) % 2 else 1
                    mj = [x + sign * y for x, y in zip(mj, kv)]
            if not dot(mj, th).is_integer:
                ok = False
                break
        if ok:
            total += w
    return total


def iterated_average_gg(f: TrigPoly, theta: Sequence[ExactReal], M: int = 1000) -> float:
    """E_{h1,h2 <= M} int f(x) conj f(x+h1 th) conj f(x+h2 th) f(x+(h1+h2) th) dx.

    The x-integral of a trigonometric polynomial is exact on a grid finer
    than its frequency span, so the only approximation is the finite M.
    """
    span = max((max(abs(x) for x in k) for k in f.coeffs), default=0)
    G = 4 * span + 1
    grid = list(itertools.product(range(G), repeat=f.m))
    th = np.array([float(t.frac()) for t in theta])
    h = np.arange(0, 2 * M + 1)
    idx = h[1:M + 1, None] + h[None, 1:M + 1]
    total = 0j
    for g in grid:
        x = np.array(g, dtype=float) / G
        A = np.zeros(len(h), dtype=np.complex128)
        for k, c in f.coeffs.items():
            kv = np.array(k, dtype=float)
            A += c * np.exp(2j * np.pi * np.mod(kv @ x + h * float(kv @ th), 1.0))
        B = np.conj(A[1:M + 1])
        S = np.sum(np.outer(B, B) * A[idx])
        total += A[0] * S
    return (total / (len(grid) * M * M)).real
