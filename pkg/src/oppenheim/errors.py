"""Exception hierarchy shared by every module.

``Violation`` subclasses signal a broken precondition and map to CLI exit
status 1.  ``Undecided`` is not a violation: it reports that the requested
precision was not enough to reach a verdict.
"""


class Violation(Exception):
    """A precondition or hypothesis of an operation does not hold."""


class NonDegenerateViolation(Violation):
    pass


class PrimitivityViolation(Violation):
    pass


class PreconditionViolation(Violation):
    pass


class IsotropyViolation(Violation):
    pass


class HypothesisViolation(Violation):
    pass


class KindViolation(Violation):
    pass


class ConditioningError(Violation):
    def __init__(self, message, t=None):
        super().__init__(message if t is None else f"{message} (t={t})")
        self.t = t


class Undecided(Exception):
    """Raised when a search or test ran out of precision without a verdict."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
