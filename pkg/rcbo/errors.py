"""Error types and formatting utilities for consistent user-facing messages.

Error Style Guide:
- User-facing errors use 'Error: ' prefix
- Field errors use structured format: '<entity> field <field> <issue>'
- Use present tense: 'must be', 'is required'
- Include actionable hints where helpful

Numerical failures raised by the engine derive from ``NumericalError`` so the
CLI can map them to exit status 2, separate from configuration mistakes.
"""


class RcboError(Exception):
    """Base class for errors raised by rcbo."""


class DimensionMismatch(RcboError, ValueError):
    """Raised when a point's dimension does not match the domain or objective."""


class DomainError(RcboError, ValueError):
    """Raised when an argument lies outside a function's domain of definition."""


class NumericalError(RcboError):
    """Base class for failures of the numerical engine."""


class NonFiniteError(NumericalError):
    """Raised when a particle coordinate becomes NaN or infinite."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite particle state at step {step}")


class NonConvergenceError(NumericalError):
    """Raised when a boundary projection fails to converge."""


class RejectionBudgetExceeded(NumericalError):
    """Raised when rejection sampling accepts too few proposals."""


class DegenerateGradientError(NumericalError):
    """Raised when a level-set gradient vanishes at a boundary point."""


class OracleNonConvergence(NumericalError):
    """Raised when the invariant-density fixed point does not converge."""


class InsufficientReplicas(NumericalError):
    """Raised when a fitted rate is too noisy to be reported."""


class DecayBoundViolation(NumericalError):
    """Raised when the ensemble variance exceeds its exponential bound.

    The offending report is attached so callers can still emit the curve.
    """

    def __init__(self, message: str, report: object = None):
        self.report = report
        super().__init__(message)


def format_error(message: str) -> str:
    """Format a general error message with consistent prefix.

    Args:
        message: The error message to format

    Returns:
        Formatted error message with 'Error: ' prefix

    Example:
        >>> format_error("objective not found")
        'Error: objective not found'
    """
    return f"Error: {message}"


def format_field_error(entity: str, field: str, issue: str) -> str:
    """Format a field validation error in structured format.

    Example:
        >>> format_field_error("Domain 'ball'", "radius", "must be positive")
        "Domain 'ball' field 'radius' must be positive"
    """
    return f"{entity} field '{field}' {issue}"


__all__ = [
    "RcboError",
    "DimensionMismatch",
    "DomainError",
    "NumericalError",
    "NonFiniteError",
    "NonConvergenceError",
    "RejectionBudgetExceeded",
    "DegenerateGradientError",
    "OracleNonConvergence",
    "InsufficientReplicas",
    "DecayBoundViolation",
    "format_error",
    "format_field_error",
]
