"""
Exception hierarchy with helpful error messages and recovery suggestions.

All exceptions inherit from CharBetaError and include:
- A clear error message
- An actionable suggestion
- Numerical context (shapes, condition numbers, offending rows) for debugging
"""

from typing import Any, Optional, Sequence


class CharBetaError(Exception):
    """
    Base exception for charbeta.

    Provides error messages with suggestions and context.
    """

    def __init__(
        self,
        message: str,
        suggestion: Optional[str] = None,
        context: Optional[dict[str, Any]] = None,
    ):
        """
        Initialize the exception.

        Args:
            message: Clear description of what went wrong
            suggestion: Actionable suggestion for fixing the issue
            context: Additional context information for debugging
        """
        self.message = message
        self.suggestion = suggestion
        self.context = context or {}
        super().__init__(self.formatted_message())

    def formatted_message(self) -> str:
        """Format error message with suggestion and context."""
        msg = f"❌ {self.message}"

        if self.suggestion:
            msg += f"\n\n💡 Suggestion: {self.suggestion}"

        if self.context:
            msg += "\n\n📋 Context:"
            for key, value in self.context.items():
                msg += f"\n   - {key}: {value}"

        return msg


class ConfigurationError(CharBetaError):
    """
    Raised when a configuration is invalid or infeasible.

    Examples:
        - Unknown gamma strength token in an experiment file
        - K > k_n or J > p (rate-condition report attached)
        - Unsupported config file suffix
    """

    def __init__(
        self,
        message: str,
        config_field: Optional[str] = None,
        provided_value: Optional[Any] = None,
        expected: Optional[str] = None,
        report: Optional[Sequence[str]] = None,
    ):
        suggestion = (
            "Check the experiment or plan file against the documented fields. "
            "Dimension limits: K <= k_n, J <= p, and J^2 should not exceed p."
        )

        context: dict[str, Any] = {}
        if config_field:
            context["field"] = config_field
        if provided_value is not None:
            context["provided_value"] = provided_value
        if expected:
            context["expected"] = expected
        if report:
            context["rate_conditions"] = "; ".join(report)

        super().__init__(message, suggestion, context)
        self.config_field = config_field


class DataError(CharBetaError):
    """
    Raised when panel data cannot be used.

    Examples:
        - CSV schema violation (missing or extra columns)
        - NaN or infinite value in a row
        - Non-monotone interval index for an asset
    """

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
        line: Optional[int] = None,
        path: Optional[str] = None,
    ):
        suggestion = (
            "Inspect the reported row and column. Pass drop_incomplete=True to "
            "drop assets with missing intervals instead of failing."
        )

        context: dict[str, Any] = {}
        if path:
            context["path"] = path
        if line is not None:
            context["line"] = line
        if row is not None:
            context["row"] = row
        if column:
            context["column"] = column

        super().__init__(message, suggestion, context)
        self.row = row
        self.column = column
        self.line = line


class DimensionError(CharBetaError, ValueError):
    """Raised when array shapes do not agree."""

    def __init__(
        self,
        message: str,
        expected: Optional[Any] = None,
        received: Optional[Any] = None,
    ):
        context: dict[str, Any] = {}
        if expected is not None:
            context["expected_shape"] = expected
        if received is not None:
            context["received_shape"] = received
        super().__init__(
            message,
            "Panels are assets x intervals, factors are K x intervals.",
            context,
        )


class SingularMatrixError(CharBetaError):
    """
    Raised when a matrix that must be inverted is numerically singular.

    Examples:
        - Factor Gram sum dF dF' over a window (k_n < K or flat factors)
        - GMM normal matrix grad' W grad
        - c_FF block of an idiosyncratic-variance moment
    """

    def __init__(
        self,
        message: str,
        matrix_name: Optional[str] = None,
        condition_number: Optional[float] = None,
        asset: Optional[int] = None,
    ):
        suggestion = (
            "Use a longer window (k_n), fewer factors, or check that the "
            "factor increments are not constant over the window."
        )
        context: dict[str, Any] = {}
        if matrix_name:
            context["matrix"] = matrix_name
        if condition_number is not None:
            context["condition_number"] = f"{condition_number:.3e}"
        if asset is not None:
            context["asset"] = asset
        super().__init__(message, suggestion, context)
        self.condition_number = condition_number


class SingularBasisError(CharBetaError):
    """Raised when the sieve basis matrix is rank deficient."""

    def __init__(
        self,
        message: str,
        offending_columns: Optional[Sequence[int]] = None,
        condition_number: Optional[float] = None,
        rank: Optional[int] = None,
    ):
        suggestion = (
            "Drop collinear characteristics, reduce the number of knots or the "
            "polynomial order, or raise the condition cap."
        )
        context: dict[str, Any] = {}
        if offending_columns is not None:
            context["offending_columns"] = list(offending_columns)
        if condition_number is not None:
            context["condition_number"] = f"{condition_number:.3e}"
        if rank is not None:
            context["rank"] = rank
        super().__init__(message, suggestion, context)
        self.offending_columns = list(offending_columns or [])
        self.condition_number = condition_number


class ResampleExhaustedError(CharBetaError):
    """Raised when every bootstrap redraw produced a singular basis."""

    def __init__(self, message: str, replication: int, attempts: int):
        super().__init__(
            message,
            "The cross-section is too small or too clustered for the basis "
            "dimension. Lower J or raise max_retries.",
            {"replication": replication, "attempts": attempts},
        )
        self.replication = replication
        self.attempts = attempts
