from __future__ import annotations

import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.errors import (ClaimViolated, Degenerate, DegenerateInput, LevelViolation,
                             Nontermination, P1Violation, ParseError)
from jointerg.pet import (CoeffExpr, PetPolynomial, PetTuple, choose_t, group_inclusion,
                          level_check, linear_coeffs, make_tuple, multinomial, parse_coeff,
                          random_tuple, reduce, seminorm_spec, top_difference, vdc)
from jointerg.pet.coeff import ONE, ZERO


def _poly(d, terms):
    return PetPolynomial(0, d, {(b, ()): tuple(parse_coeff(str(c), ()) for c in vec)
                                for b, vec in terms.items()})


# ---------------------------------------------------------------- coefficients

def test_coeff_normal_form():
    g = ("logN", "pi")
    a = parse_coeff("logN*pi + 1/2 - pi*logN", g)
    assert a == CoeffExpr.const(Fraction(1, 2))
    b = parse_coeff("(logN + 1)^2", g)
    assert b == parse_coeff("logN^2 + 2*logN + 1", g)
    assert (b - b).is_zero
    assert parse_coeff("3/4", ()).rational() == Fraction(3, 4)
    assert not parse_coeff("pi", g).is_rational


def test_coeff_rejects_non_polynomial():
    with pytest.raises(ParseError):
        parse_coeff("1/logN", ("logN",))
    with pytest.raises(ParseError):
        parse_coeff("sqrt(logN)", ("logN",))


_small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def _coeffs(draw):
    out = CoeffExpr.const(draw(_small))
    for g in ("x", "y"):
        out = out + CoeffExpr.gen(g).scale(draw(_small))
    return out


@given(_coeffs(), _coeffs(), _coeffs())
@settings(max_examples=60, deadline=None)
def test_coeff_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero
    assert (a * b) * c == a * (b * c)


# ---------------------------------------------------------------- make_tuple

def test_make_tuple_examples():
    A = make_tuple(1, 1, 2)
    assert str(A) == "(0, 1, (n^2))"
    B = make_tuple(2, 2, 2)
    assert B.is_nondegenerate and B.is_one_standard
    with pytest.raises(Degenerate):
        make_tuple(1, 2, 2, leading=[[1], [1]])
    with pytest.raises(ValueError):
        make_tuple(1, 2, 2)


def test_make_tuple_validates_lower_order():
    with pytest.raises(ValueError):
        make_tuple(1, 1, 2, {1: {2: [1]}})
    A = make_tuple(2, 2, 3, {1: {1: ["logN", "1/2"]}, 2: {0: ["pi", 0]}},
                   generators=("logN", "pi"))
    assert A.generators == {"logN", "pi"}
    assert A.polys[0].coeff(1, ()) == (parse_coeff("logN", ("logN",)), CoeffExpr.const(Fraction(1, 2)))


# ---------------------------------------------------------------- vdc

def test_vdc_single_square():
    B = vdc(make_tuple(1, 1, 2), 1)
    assert (B.s, B.ell) == (1, 1)
    assert B.polys[0].to_str() == "2*n*h1 + h1^2"
    assert B.trace[-1].inherited


def test_vdc_two_squares():
    A = PetTuple(0, 2, (_poly(1, {2: [1]}), _poly(1, {2: [2]})), 1)
    B = vdc(A, 2)
    assert [q.to_str() for q in B.polys] == ["-n^2 + 2*n*h1 + h1^2", "4*n*h1 + 2*h1^2", "-n^2"]
    assert B.trace[-1].inherited
    assert B.trace[-1].dropped == (4,)


def test_vdc_merge_clears_inherited_flag():
    # (n, n^2) with t = 2: q1' = (n+h) - n^2 and q3' = n - n^2 differ by h only
    A = PetTuple(0, 2, (_poly(1, {1: [1]}), _poly(1, {2: [1]})), 1)
    B = vdc(A, 2)
    assert B.trace[-1].groups[0] == (1, 3)
    assert not B.trace[-1].inherited


def test_vdc_rejects_degenerate_input():
    A = PetTuple(0, 2, (_poly(1, {2: [1]}), _poly(1, {2: [1], 0: [5]})), 1)
    with pytest.raises(DegenerateInput):
        vdc(A, 1)


# ---------------------------------------------------------------- reduce

@pytest.mark.parametrize("K", [2, 3, 4])
def test_base_case_linear_coefficient(K):
    trace, final = reduce(make_tuple(1, 1, K))
    assert len(trace) == K - 1
    assert final.degree == 1
    (c,) = linear_coeffs(final)
    hs = "*".join(f"h{i}" for i in range(1, K))
    assert str(c) == f"{math.factorial(K)}*{hs}*e1"


def test_degree_one_input_is_final():
    A = make_tuple(2, 2, 1)
    trace, final = reduce(A)
    assert trace == [] and final is A


def test_two_squares_in_two_dimensions():
    trace, final = reduce(make_tuple(2, 2, 2))
    assert all(B.trace[-1].inherited for _, B in trace)
    assert all(q.n_degree == 1 for q in final.polys)
    rep = group_inclusion(final)
    assert rep.ok
    assert 2 in rep.witness.values()


def test_choose_t_prefers_other_leading_terms():
    A = make_tuple(2, 2, 2)
    assert choose_t(A) == 2
    assert choose_t(make_tuple(1, 1, 3)) == 1


def test_iterate_cap_raises_nontermination():
    A = make_tuple(3, 3, 2)
    with pytest.raises(Nontermination):
        reduce(A, max_iterates=20)


def test_step_budget_raises_nontermination():
    with pytest.raises(Nontermination):
        reduce(make_tuple(1, 1, 4), max_steps=1)


# ---------------------------------------------------------------- levels

def test_multinomial():
    assert multinomial(2, (1, 1)) == 12
    assert multinomial(1, ()) == 1
    assert multinomial(0, (2, 1)) == 3


def test_level_check_on_reference():
    p = make_tuple(2, 2, 2)
    rep = level_check(p, p)
    assert rep.ok
    for lv, x in rep.assignments.items():
        assert x.w == (1, 2) and x.r == 1 and x.i == 0


def test_level_check_after_each_step():
    A = make_tuple(2, 2, 2, {1: {1: ["1/2", "logN"]}, 2: {0: [0, "3"]}}, generators=("logN",))
    trace, final = reduce(A)
    for _, B in trace:
        assert level_check(B).ok


def test_cubic_pairs_outgrow_the_iterate_cap():
    # every elimination at degree 2 doubles the cubic iterates
    with pytest.raises(Nontermination) as exc:
        reduce(make_tuple(2, 2, 3), max_iterates=256)
    assert exc.value.context["iterates"] > 256


def test_corrupted_level_is_named():
    trace, final = reduce(make_tuple(1, 1, 3))
    B = final
    q = B.polys[0]
    key = next(k for k, _ in q.terms if k[0] == 1)
    bumped = dict(q.terms)
    bumped[key] = tuple(c + ONE for c in bumped[key])
    bad = PetTuple(B.s, B.ell, (PetPolynomial(B.s, B.d, bumped),), B.d, B.trace, B.root)
    with pytest.raises(LevelViolation) as exc:
        level_check(bad)
    assert exc.value.level == key
    assert exc.value.prop in {"P1", "P2", "P3", "P4"}


def test_top_difference():
    p = make_tuple(2, 2, 2)
    v, diff = top_difference(p, 1, 2)
    assert v == 2 and diff == (ONE, -ONE)


def test_inclusion_on_reference_tuple():
    p = make_tuple(3, 3, 2)
    rep = group_inclusion(p, p)
    assert rep.witness[2] == 2 and rep.witness[3] == 3


def test_inclusion_one_dimensional():
    A = make_tuple(1, 1, 3)
    trace, final = reduce(A)
    assert group_inclusion(final).ok


# ---------------------------------------------------------------- claim and seminorms

def test_claim_rejects_half_leading_vector():
    A = make_tuple(1, 1, 2, leading=[["1/2"]])
    _, final = reduce(A)
    with pytest.raises(ClaimViolated):
        linear_coeffs(final)


def test_claim_rejects_non_integer_coefficient():
    _, final = reduce(make_tuple(1, 1, 2, leading=[["1/3"]]))
    with pytest.raises(ClaimViolated, match="non-integer entry 2/3"):
        linear_coeffs(final, check_origin=False)


def test_claim_rejects_generator_dependence():
    A = make_tuple(1, 1, 2, leading=[["logN"]], generators=("logN",))
    _, final = reduce(A)
    with pytest.raises(ClaimViolated):
        linear_coeffs(final, check_origin=False)


def test_seminorm_spec_modes():
    single = seminorm_spec(make_tuple(1, 1, 2))
    assert single.mode == "single" and single.condition
    multi = seminorm_spec(make_tuple(3, 3, 2))
    assert multi.mode == "multi"
    assert set(multi.directions) == {(1, 0, 0), (1, -1, 0), (1, 0, -1)}
    assert multi.D == 2 and not multi.D_authoritative
    assert seminorm_spec(make_tuple(2, 1, 3)).mode == "single"


# ---------------------------------------------------------------- random family

def _feasible(rng, count):
    """Seeded inputs whose reductions stay small: ell = 1, or K <= 2 with ell <= 2."""
    out = []
    while len(out) < count:
        spec, A = random_tuple(rng)
        d, ell, K = spec[:3]
        if ell == 1 or (K <= 2 and ell <= 2):
            out.append(A)
    return out


@pytest.fixture(scope="module")
def family():
    return _feasible(random.Random(7), 60)


def test_random_reductions_are_sound(family):
    for A in family:
        trace, final = reduce(A)
        assert final.degree == 1
        for _, B in trace:
            assert B.trace[-1].inherited and B.is_one_standard and B.is_nondegenerate
            assert level_check(B).ok
        assert group_inclusion(final).ok
        for c in linear_coeffs(final):
            assert all(isinstance(x, int) for vec in c.as_dict().values() for x in vec)


def test_random_vdc_keeps_differences_consistent(family):
    for A in [A for A in family if A.degree > 1][:20]:
        for t in range(1, A.ell + 1):
            B = vdc(A, t)
            assert B.is_nondegenerate
            for i in range(B.ell):
                for j in range(i + 1, B.ell):
                    assert (B.polys[i] - B.polys[j]).n_degree >= 1


def test_group_order_does_not_change_final(family):
    for k, A in enumerate(family[:25]):
        _, plain = reduce(A)
        _, shuffled = reduce(A, rng=random.Random(k))
        assert plain.polys[0] == shuffled.polys[0]
        assert ({q.nonconstant() for q in plain.polys}
                == {q.nonconstant() for q in shuffled.polys})


def test_json_records_round_trip(family):
    A = family[0]
    trace, final = reduce(A)
    blob = json.dumps({"final": final.to_json(), "levels": level_check(final).to_json(),
                       "inclusion": group_inclusion(final).to_json(),
                       "seminorm": seminorm_spec(final).to_json()})
    assert json.loads(blob)["final"]


def test_three_quadratic_iterates_reduce_soundly():
    trace, final = reduce(make_tuple(3, 3, 2, {2: {1: ["1/3", 0, "-1"]}}))
    assert final.degree == 1 and final.ell > 3
    for _, B in trace:
        assert level_check(B).ok
    rep = group_inclusion(final)
    assert rep.ok
    assert linear_coeffs(final)
