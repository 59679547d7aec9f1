"""
Custom exceptions for charbeta.

This package contains the exceptions raised by the estimators, the bootstrap
engine and the experiment harness.
"""

from .enhanced_exceptions import (
    CharBetaError,
    ConfigurationError,
    DataError,
    DimensionError,
    ResampleExhaustedError,
    SingularBasisError,
    SingularMatrixError,
)

__all__ = [
    # Base
    "CharBetaError",
    # Input and configuration
    "ConfigurationError",
    "DataError",
    "DimensionError",
    # Numerical
    "SingularMatrixError",
    "SingularBasisError",
    "ResampleExhaustedError",
]
