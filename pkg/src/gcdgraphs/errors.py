"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's stated precondition."""


class ContractViolation(ValueError):
    """A multiplicative-function table breaks its declared divisor bound."""


class ComplianceError(AssertionError):
    """An inequality that is unconditional under full-size constants failed.

    Raised only in ``paper`` constants mode; toy-constants runs record the
    violation instead of raising.
    """


class ValidationError(ValueError):
    """Structured input (edge set, graph JSON, trace file) is inadmissible."""


class AmbiguousComparison(ArithmeticError):
    """A transcendental comparison stayed undecided at maximum precision."""
