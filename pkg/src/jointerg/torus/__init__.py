"""Exact verification lab on commuting torus rotations."""
from .ergodic import (DEFAULT_THRESHOLD, ErgodicityReport, cond_expect_invariant, condition_check,
                      direct_average, multiple_average, product_ergodic, sequence_ergodic)
from .exact import ExactReal
from .hostkra import host_kra, host_kra_bruteforce, host_kra_power, iterated_average_gg
from .system import TorusSystem, TrigPoly, dot
from .weyl import iterate_sequence, weyl_average, weyl_curve, weyl_sum

__all__ = [
    "ExactReal", "TorusSystem", "TrigPoly", "dot", "iterate_sequence", "weyl_average",
    "weyl_sum", "weyl_curve", "sequence_ergodic", "product_ergodic", "multiple_average",
    "direct_average", "ErgodicityReport", "condition_check", "cond_expect_invariant",
    "DEFAULT_THRESHOLD", "host_kra", "host_kra_power", "host_kra_bruteforce",
    "iterated_average_gg",
]
