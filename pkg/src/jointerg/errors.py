"""Exception hierarchy shared by every subpackage.

The CLI maps these onto exit codes, so each class carries a ``kind`` tag:
``hypothesis`` (exit 2), ``config`` (exit 3) or ``inconclusive`` (exit 4).
"""
from __future__ import annotations


class JointErgError(Exception):
    kind = "hypothesis"

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.context = context


# fn-algebra
class DomainError(JointErgError, ValueError):
    pass


class ParseError(JointErgError, ValueError):
    kind = "config"


class PrecisionExhausted(JointErgError):
    kind = "inconclusive"


class Inconclusive(JointErgError):
    kind = "inconclusive"


class NotTempered(JointErgError):
    pass


# poly-window
class SandwichViolated(JointErgError):
    pass


class HypothesisViolated(JointErgError):
    pass


# pet-engine
class Degenerate(JointErgError):
    pass


class DegenerateInput(JointErgError):
    pass


class StrategyFailed(JointErgError):
    pass


class Nontermination(JointErgError):
    kind = "inconclusive"


class LevelViolation(JointErgError):
    """Base for (P1)-(P4) failures; ``level`` names the offending (b; a) index."""

    prop = ""

    def __init__(self, message: str = "", level=None, **context):
        super().__init__(message, level=level, **context)
        self.level = level


class P1Violation(LevelViolation):
    prop = "P1"


class P2Violation(LevelViolation):
    prop = "P2"


class P3Violation(LevelViolation):
    prop = "P3"


class P4Violation(LevelViolation):
    prop = "P4"


class ClaimViolated(JointErgError):
    pass


# torus-lab
class CombinatorialBlowup(JointErgError):
    kind = "inconclusive"


class UndecidableFrequency(JointErgError):
    kind = "inconclusive"


class CapExceeded(JointErgError):
    kind = "inconclusive"


class FloorAmbiguous(JointErgError):
    kind = "inconclusive"


# runner
class ConfigError(JointErgError, ValueError):
    kind = "config"


class StageError(JointErgError):
    """Wraps a stage failure with the stage tag; ``kind`` follows the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
        self.kind = getattr(cause, "kind", "hypothesis")
