"""
Input Validation Framework

Exception hierarchy shared by every module, plus validators for the
delimiter-separated input tables (area records, speed-test samples).

Features:
- Custom exception hierarchy mapped onto the CLI exit-code contract
- Table validation (required header columns, row counts)
- Positive/finite number checks used by the domain types
"""

import math
import pandas as pd
from typing import Iterable, Optional
import logging

from src.constants import (
    EXIT_INPUT_ERROR, EXIT_OK, EXIT_SIMULATION_FAILURE, EXIT_UNSTABLE_LOAD,
)

logger = logging.getLogger(__name__)


class AccessModelError(Exception):
    """Base exception for all model, simulation and planning errors."""
    pass


class InvalidClassError(AccessModelError):
    """Raised when a user class or channel has nonpositive or inconsistent parameters."""
    pass


class UnstableLoadError(AccessModelError):
    """Raised when the computed utilization is at or above 1."""

    def __init__(self, rho: float, message: Optional[str] = None):
        self.rho = rho
        super().__init__(message or f"Unstable load: rho = {rho:.6g} (must be < 1)")


class InconsistentMeasurementError(AccessModelError):
    """Raised when a measured speed exceeds the reference channel rate."""
    pass


class EmptySystemError(AccessModelError):
    """Raised when a quantity is undefined because no flow is active."""
    pass


class ConfigError(AccessModelError):
    """Raised when a configuration document or simulation config is invalid."""
    pass


class ProbeStarvedError(AccessModelError):
    """Raised when a speed-test probe does not complete within the horizon."""
    pass


class UnknownMcsError(AccessModelError):
    """Raised when an MCS index is missing from the rate table."""

    def __init__(self, mcs_index: int):
        self.mcs_index = mcs_index
        super().__init__(f"MCS index {mcs_index} not present in rate table")


class EmptyInputError(AccessModelError):
    """Raised when an operation receives no samples or rows."""
    pass


class MalformedRecordError(AccessModelError):
    """Raised when an input row cannot be used; carries the 1-based file line when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class SimulationError(AccessModelError):
    """Raised when the simulator reaches an internally inconsistent state."""
    pass


def require_positive(value: float, name: str, error: type = InvalidClassError) -> float:
    """
    Check a parameter is a finite number strictly greater than zero.

    Returns:
        The value as float

    Raises:
        error: (InvalidClassError by default) if the check fails
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise error(f"{name} must be numeric, got {value!r}")
    if not math.isfinite(number) or number <= 0:
        raise error(f"{name} must be a positive finite number, got {value!r}")
    return number


def require_nonnegative(value: float, name: str, error: type = InvalidClassError) -> float:
    """Check a parameter is a finite number greater than or equal to zero."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise error(f"{name} must be numeric, got {value!r}")
    if not math.isfinite(number) or number < 0:
        raise error(f"{name} must be a nonnegative finite number, got {value!r}")
    return number


def validate_table(
    df: pd.DataFrame,
    required_columns: Iterable[str],
    min_rows: int = 0,
    name: str = "table"
) -> pd.DataFrame:
    """
    Validate an input table has the required header columns.

    Args:
        df: DataFrame read from a delimiter-separated file
        required_columns: Column names that must be present in the header
        min_rows: Minimum number of data rows
        name: Name for error messages

    Returns:
        Validated dataframe (unchanged if valid)

    Raises:
        MalformedRecordError: If the header or row count is wrong
    """
    if not isinstance(df, pd.DataFrame):
        raise MalformedRecordError(f"{name} must be a pandas DataFrame, got {type(df)}")

    missing_cols = set(required_columns) - set(df.columns)
    if missing_cols:
        raise MalformedRecordError(
            f"{name} missing required columns: {sorted(missing_cols)}. "
            f"Available columns: {list(df.columns)}"
        )

    if len(df) < min_rows:
        raise MalformedRecordError(
            f"{name} has {len(df)} rows, minimum required is {min_rows}"
        )

    return df


def exit_code_for(error: Optional[BaseException]) -> int:
    """CLI exit code for an error raised by a command (0 when there is none)."""
    if error is None:
        return EXIT_OK
    if isinstance(error, UnstableLoadError):
        return EXIT_UNSTABLE_LOAD
    if isinstance(error, (SimulationError, ProbeStarvedError)):
        return EXIT_SIMULATION_FAILURE
    if isinstance(error, (AccessModelError, OSError, ValueError)):
        return EXIT_INPUT_ERROR
    return EXIT_SIMULATION_FAILURE
