"""Reproduce the two worked Hardy-field examples symbolically.

    python3 demos/worked_examples.py
"""
from jointerg.fn import decompose, growth_profile
from jointerg.window import change_of_variables, select_order, select_window, taylor_family

for s, p in (("x*log(x)", "pi*x"), ("log(x)^2", "sqrt(2)*x^2")):
    d = decompose(s, p)
    K = select_order(d, "hardy")
    L = select_window(d.s_part, K, "hardy")
    fam = taylor_family(d, None, K, L)
    prof = growth_profile(L)
    print(f"a(x) = {p} + {s}")
    print(f"  K = {K},  L(N) = {L.to_str('N')}")
    print(f"  L(N) ~ N^{prof.p:.4f} (log N)^{prof.q:.4f}")
    for j, c in enumerate(fam.coeff_strings()):
        print(f"  r^{j}: {c}")

# change of variables n = kQ + s for the first example
d = decompose("x*log(x)", "pi*x")
fam = taylor_family(d, None, 2, select_window(d.s_part, 2, "hardy"))
for N in (10 ** 4, 10 ** 10):
    cov = change_of_variables(fam, N)
    print(f"N = {N:.0e}: D_N^-1 = {cov.D_inv.to_str('N')}, Q = {cov.Q},"
          f" new window {cov.new_window_value:.4f} (proxy {cov.new_window.to_str('N')})")
