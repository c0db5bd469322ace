"""Exception hierarchy shared by every module.

The CLI maps these classes onto process exit codes, so library code raises
them instead of bare ``ValueError``/``RuntimeError``.
"""


class LogGasError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidInputError(LogGasError, ValueError):
    code = "invalid-input"


class DomainError(LogGasError, ValueError):
    """A point falls outside a function's domain (pole, edge, coincidence)."""

    code = "domain"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedFormError(InvalidInputError):
    code = "unsupported-form"


class DegenerateError(DomainError):
    code = "degenerate"


class EvaluationError(LogGasError, ArithmeticError):
    """Non-finite value produced at a specific evaluation node."""

    code = "evaluation"

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class IntegrationError(LogGasError, RuntimeError):
    code = "integration"

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConvergenceError(LogGasError, RuntimeError):
    code = "convergence"
