from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest

from jointerg.errors import HypothesisViolated, SandwichViolated
from jointerg.fn import decompose, growth_profile, is_fejer, parse, tempered_alpha
from jointerg.fn.growth import GrowthDecomposition
from jointerg.window import (change_of_variables, select_order, select_window, taylor_family,
                             window_error)


@pytest.fixture(scope="module")
def h1():
    d = decompose("x*log(x)", "pi*x")
    K = select_order(d, "hardy")
    L = select_window(d.s_part, K, "hardy")
    return d, taylor_family(d, None, K, L)


@pytest.fixture(scope="module")
def h2():
    d = decompose("log(x)^2", "sqrt(2)*x^2")
    K = select_order(d, "hardy")
    L = select_window(d.s_part, K, "hardy")
    return d, taylor_family(d, None, K, L)


def test_select_order_examples(h1, h2):
    assert h1[1].K == 2
    assert h2[1].K == 3
    d = decompose("0", "x^17")
    t = tempered_alpha(parse("x^(1/2)*(2 + cos(sqrt(log(x))))"))
    assert select_order(d, "case2", t) == 18


def test_select_order_case1():
    d = decompose("x*log(x)", "x^2")
    assert select_order(d, "case1") == 3
    assert select_order(d, "hardy") == 3


def test_case2_collision_bumps_K():
    # (K^2+K)/(2K+1) = 2/3 at K = 1
    d = decompose("0", "1")
    t = tempered_alpha(parse("x^(2/3)*log(x)"))
    assert abs(t.alpha - 2 / 3) < 1e-3
    assert select_order(d, "case2", t) == 2


def test_x_log_x_family(h1):
    _, fam = h1
    assert fam.coeffs[0] == parse("pi*x + x*log(x)")
    assert fam.coeffs[1] == parse("pi + 1 + log(x)")
    assert fam.coeffs[2] == parse("1/(2*x)")
    assert fam.window == parse("x^(7/12)")
    assert fam.leading_is_aN


def test_log_squared_family(h2):
    _, fam = h2
    assert fam.coeffs[3] == parse("(2*log(x) - 3)/(3*x^3)")
    assert fam.coeffs[2] == parse("sqrt(2) + (1 - log(x))/x^2")
    assert fam.coeffs[1] == parse("2*sqrt(2)*x + 2*log(x)/x")
    prof = growth_profile(fam.window)
    assert prof.p == pytest.approx(1, abs=1e-6)
    assert prof.q == pytest.approx(-7 / 24, abs=1e-3)


def test_coefficient_strings_use_N(h1):
    assert h1[1].coeff_strings()[1] == "1 + pi + log(N)"


def test_pure_polynomial_family_is_exact():
    d = decompose("0", "3*x^3 - x + 2")
    fam = taylor_family(d, None, 3, parse("sqrt(x)"))
    assert not fam.leading_is_aN
    for N in (10, 1000):
        assert window_error(d.total, fam, N, 50) < 1e-30  # zero up to working precision


def test_window_error_bound_h1(h1):
    d, fam = h1
    err = window_error(d.total, fam, 10 ** 4, 2000)
    assert err <= 10 ** (-1) / 6 + 1e-12  # N^(-1/4)/6 at N = 10^4


def test_window_error_h2_below_lagrange_bound(h2):
    d, fam = h2
    N = 10 ** 6
    err = window_error(d.total, fam, N, 2000)
    with mpmath.workprec(200):
        s4 = abs((22 - 12 * mpmath.log(N)) / mpmath.mpf(N) ** 4)
        L = fam.window(N, 100)
        bound = s4 * L ** 4 / 24
    assert err <= bound < 1


@pytest.mark.parametrize("which", ["h1", "h2"])
def test_uniform_boundedness(which, request):
    d, fam = request.getfixturevalue(which)
    errs = [window_error(d.total, fam, 10 ** k, 1000) for k in range(3, 7)]
    assert all(e < 1 for e in errs)
    assert all(b <= a for a, b in zip(errs, errs[1:])), errs


def test_select_window_case2_examples():
    t = tempered_alpha(parse("x^0.7"))
    L = select_window(t.expr, 1, "case2", t.alpha)
    assert L == parse("0.7*x^(-0.3)") ** Fraction(-3, 2)
    assert growth_profile(L).p == pytest.approx(0.45, abs=1e-9)
    t2 = tempered_alpha(parse("x^(1/2)*(2 + cos(sqrt(log(x))))"))
    L2 = select_window(t2.expr, 1, "case2", t2.alpha)
    assert is_fejer(L2)


def test_select_window_rejects_polynomial_core():
    with pytest.raises(SandwichViolated):
        select_window(parse("x^2"), 2, "hardy")


def test_change_of_variables_x_log_x(h1):
    _, fam = h1
    cov = change_of_variables(fam, 10 ** 10)
    assert cov.D_inv == parse("sqrt(2*x)")
    assert cov.new_window == parse("x^(1/12)/sqrt(2)")
    assert abs(cov.new_window_value * math.sqrt(2) / 10 ** (10 / 12) - 1) < 0.05
    assert cov.Q == math.isqrt(2 * 10 ** 10)


def test_cross_terms_x_log_x(h1):
    # k-linear coefficient 2 a_N Q s + (pi + 1 + log N) Q; constant a_N s^2 + c_1 s + c_0
    _, fam = h1
    N = 10 ** 4
    cov = change_of_variables(fam, N)
    with mpmath.workprec(200):
        aN = mpmath.mpf(1) / (2 * N)
        c1 = mpmath.pi + 1 + mpmath.log(N)
        c0 = mpmath.pi * N + N * mpmath.log(N)
        for s in (0, 1, 7, cov.Q - 1):
            p = cov.residue_poly(s)
            assert abs(p[1] - (2 * aN * cov.Q * s + c1 * cov.Q)) < 1e-40
            assert abs(p[0] - (aN * s * s + c1 * s + c0)) < 1e-40


@pytest.mark.parametrize("N", [10 ** 3, 10 ** 4, 10 ** 5])
def test_substitution_identity(h1, N):
    _, fam = h1
    cov = change_of_variables(fam, N)
    kmax = max(1, int(cov.new_window_value))
    for s in range(0, cov.Q, max(1, cov.Q // 17)):
        for k in range(0, kmax + 1):
            n = k * cov.Q + s
            gap = abs(cov.full_poly(n) - cov.substituted(k, s))
            assert gap <= cov.leading_error_bound + 2


def test_change_of_variables_degenerate_guard():
    d = GrowthDecomposition(parse("x^2/2"), (), None, 2, None, True, False)
    fam = taylor_family(d, None, 2, parse("sqrt(x)"))
    with pytest.raises(HypothesisViolated):
        change_of_variables(fam, 10 ** 4)


def test_change_of_variables_needs_leading_aN():
    d = decompose("0", "x^2")
    fam = taylor_family(d, None, 2, parse("sqrt(x)"))
    with pytest.raises(HypothesisViolated):
        change_of_variables(fam, 10 ** 4)
