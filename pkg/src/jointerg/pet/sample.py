"""Seeded random make_tuple inputs for property runs."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from ..errors import Degenerate
from .tuples import PetTuple, make_tuple

GENERATOR_POOL = ("logN", "pi")


def _small_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2, 3)))


def _entry(rng: random.Random, gens) -> str:
    parts = [str(_small_rational(rng))]
    for g in gens:
        if rng.random() < 0.5:
            parts.append(f"({_small_rational(rng)})*{g}")
    return " + ".join(parts)


def random_tuple(rng: random.Random, d_max: int = 3, ell_max: int = 3, K_max: int = 3,
                 gen_max: int = 2, fill: float = 0.5,
                 shape: Optional[tuple] = None) -> tuple:
    """One non-degenerate make_tuple input; returns ((d, ell, K, gens, table), tuple).

    ``shape`` pins (d, ell, K); otherwise d <= d_max, ell <= min(d, ell_max)
    and K <= K_max are drawn uniformly.  Lower-order entries are small
    rationals plus rational multiples of at most ``gen_max`` generators.
    Redraws on Degenerate, which can only come from lower-order collisions.
    """
    while True:
        if shape is None:
            d = rng.randint(1, d_max)
            ell = rng.randint(1, min(d, ell_max))
            K = rng.randint(1, K_max)
        else:
            d, ell, K = shape
        gens = tuple(GENERATOR_POOL[:rng.randint(0, gen_max)])
        table = {}
        for j in range(1, ell + 1):
            row = {}
            for v in range(K):
                if rng.random() < fill:
                    row[v] = [_entry(rng, gens) if rng.random() < 0.6 else "0" for _ in range(d)]
            if row:
                table[j] = row
        try:
            A = make_tuple(d, ell, K, table, generators=gens)
        except Degenerate:
            continue
        return (d, ell, K, gens, table), A
