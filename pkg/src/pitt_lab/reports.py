"""Structured verdict reports shared by the condition checkers."""

from dataclasses import dataclass, field
import json
import math

__all__ = ["ConditionReport", "VERDICT_HOLDS", "VERDICT_FAILS", "VERDICT_INCONCLUSIVE"]

VERDICT_HOLDS = "holds"
VERDICT_FAILS = "fails"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a single weight-condition check.

    `value` is the computed supremum/integral (may be +inf), `witness`
    the parameter achieving or approaching it, and `equation_tag` the
    identifier of the inequality variant that was checked.
    """

    condition: str
    verdict: str
    value: float
    witness: object = None
    equation_tag: str = ""
    tolerances: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (VERDICT_HOLDS, VERDICT_FAILS, VERDICT_INCONCLUSIVE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == VERDICT_FAILS and self.witness is None:
            raise ValueError("a failing report must carry a witness")

    @property
    def holds(self):
        return self.verdict == VERDICT_HOLDS

    def as_dict(self):
        value = self.value
        if value is not None and not math.isfinite(value):
            value = "inf" if value > 0 else "-inf"
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "value": value,
            "witness": self.witness,
            "equation_tag": self.equation_tag,
            "tolerances": self.tolerances,
            "diagnostics": self.diagnostics,
        }

    def to_json(self, indent=2):
        return json.dumps(self.as_dict(), indent=indent, sort_keys=True)
