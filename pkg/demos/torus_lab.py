"""Conditions (i)/(ii) and the multiple average for [n log n] on two rotations.

    python3 demos/torus_lab.py
"""
from jointerg.fn import parse
from jointerg.torus import TorusSystem, TrigPoly, condition_check, host_kra, iterate_sequence

values = iterate_sequence(parse("x*log(x)"), 10 ** 5)
e1 = TrigPoly.character((1,))

for table in ([["sqrt(2)"], ["sqrt(3)"]], [["1/2"], ["1/2"]]):
    system = TorusSystem.from_table(table)
    rep = condition_check(system, values, 5, 5, [10 ** 3, 10 ** 4, 10 ** 5],
                          test_functions=[e1, e1])
    print(table)
    print("  cond (i): ", [f"{v:.2e}" for v in rep.cond_i_max])
    print("  cond (ii):", [f"{v:.2e}" for v in rep.cond_ii])
    print("  average:  ", [f"{v:.2e}" for v in rep.average_deviation])
    print("  verdict:  ", rep.verdict)

# Host-Kra seminorm of e(x) + e(2x) along (1), (1): fourth power is 2
root2 = TorusSystem.from_table([["sqrt(2)"]])
f = TrigPoly(1, {(1,): 1, (2,): 1})
print("|||f|||^4 =", host_kra(root2, f, [(1,), (1,)]) ** 4)
