"""Walk a small tuple through the van der Corput steps, checking levels as we go.

    python3 demos/pet_walkthrough.py
"""
from jointerg.pet import group_inclusion, level_check, linear_coeffs, make_tuple, reduce, seminorm_spec

A = make_tuple(2, 2, 2, {1: {1: ["1/2", "logN"]}}, generators=("logN",))
print("input:", A)
trace, final = reduce(A)
for k, (t, B) in enumerate(trace, 1):
    rec = B.trace[-1]
    print(f"step {k}: t={t}, inherited={rec.inherited}, groups={rec.groups},"
          f" {B.ell} iterates of degree {B.degree}, levels ok={level_check(B).ok}")

print("inclusion:", group_inclusion(final).ok)
for m, c in enumerate(linear_coeffs(final), 1):
    print(f"  c_{m}(h) = {c}")
print(seminorm_spec(final))

# degree 3 in two directions grows fast; the iterate cap stops it early
try:
    reduce(make_tuple(2, 2, 3), max_iterates=512)
except Exception as exc:  # Nontermination
    print(type(exc).__name__, exc)
