"""Exception hierarchy shared by all modules."""


class RotcylError(Exception):
    """Base class for package errors."""


class NumericalFailure(RotcylError):
    """A numerical procedure did not produce a usable answer."""


class NoSignChange(NumericalFailure):
    """The supplied bracket does not straddle a root."""


class NoConvergence(NumericalFailure):
    """An iteration hit its cap or its residual target was not met."""


class IntegrationError(NumericalFailure):
    """The arc integration escaped, ran out of length, or underflowed its step."""


class BracketError(NumericalFailure):
    """No sign change of the oracle eigenvalue could be bracketed."""

    def __init__(self, message, scanned=()):
        super().__init__(message)
        self.scanned = list(scanned)


class InvariantViolation(RotcylError):
    """A named invariant failed validation."""

    def __init__(self, name, measured, required):
        self.name = name
        self.measured = measured
        self.required = required
        super().__init__(f"invariant '{name}' violated: measured {measured!r}, required {required}")


class NotApplicable(RotcylError):
    """A closed-form bound was requested outside its hypotheses."""
