"""Exception hierarchy. Everything derives from ValueError so callers that
only guard against bad input keep working."""

from typing import Optional


class FuchsError(ValueError):
    pass


class InvalidPoint(FuchsError):
    pass


class InvalidIsometry(FuchsError):
    pass


class InvalidGroup(FuchsError):
    pass


class OverlappingDisks(FuchsError):
    pass


class BudgetExceeded(FuchsError):
    pass


class EmptyOrbit(BudgetExceeded):
    pass


class UncertifiedGroup(FuchsError):
    pass


class DegenerateMass(FuchsError):
    pass


class NotConverged(FuchsError):
    pass


class PreconditionViolated(FuchsError):
    def __init__(self, hypothesis: str, msg: Optional[str] = None):
        self.hypothesis = hypothesis
        super().__init__(msg if msg is not None else f"Hypothesis failed: {hypothesis}")


class MalformedSpec(FuchsError):
    def __init__(self, field: str, msg: Optional[str] = None):
        self.field = field
        super().__init__(msg if msg is not None else f"Malformed field: {field}")


class TheoremViolation(FuchsError):
    """A numerical result crossed a proven bound by more than the slack."""
