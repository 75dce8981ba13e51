"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI echoes
in its error records.
"""


class ThetaZetaError(Exception):
    code = "error"
    exit_code = 2


class DomainError(ThetaZetaError, ValueError):
    code = "domain"


class PoleError(DomainError):
    code = "pole_guard"


class EnvelopeError(DomainError):
    code = "envelope"


class GateError(ThetaZetaError):
    """A precondition gate (positivity, self-duality, weight) was not met."""

    code = "gate"


class ConvergenceError(ThetaZetaError, ArithmeticError):
    code = "non_convergence"
    exit_code = 3
