"""Retry logic for training rounds."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional, TypeVar

from utils import get_logger
from utils.errors import (
    ClientDropoutError,
    ContractViolationError,
    DegenerateDistanceError,
    DivergenceError,
    IncentiveError,
    LedgerRejectionError,
    MissingClassError,
    RoundAbortedError,
)


T = TypeVar('T')


class ErrorType(Enum):
    """Classification of error types for retry decisions."""

    # Permanent errors - should not retry
    DIVERGENCE = "divergence"
    MISSING_CLASS = "missing_class"
    DEGENERATE_DISTANCE = "degenerate_distance"
    CONTRACT_VIOLATION = "contract_violation"
    UNKNOWN = "unknown"

    # Temporary errors - safe to retry
    CLIENT_DROPOUT = "client_dropout"
    LEDGER_REJECTED = "ledger_rejected"

    @property
    def is_permanent(self) -> bool:
        return self not in (ErrorType.CLIENT_DROPOUT, ErrorType.LEDGER_REJECTED)


@dataclass
class RetryResult:
    """Result of a retried operation."""
    success: bool
    attempts: int
    value: Any = None
    error: Optional[Exception] = None
    error_type: Optional[ErrorType] = None

    @property
    def is_permanent(self) -> bool:
        return self.error_type is not None and self.error_type.is_permanent


class RetryHandler:
    """
    Retries a round after temporary failures.

    Each attempt gets its attempt number so the caller can draw a fresh
    client selection. There is no backoff: rounds run on a logical clock.
    """

    # Checked in order; subclasses before their bases
    ERROR_CLASSES = [
        (ClientDropoutError, ErrorType.CLIENT_DROPOUT),
        (LedgerRejectionError, ErrorType.LEDGER_REJECTED),
        (IncentiveError, ErrorType.LEDGER_REJECTED),
        (DivergenceError, ErrorType.DIVERGENCE),
        (MissingClassError, ErrorType.MISSING_CLASS),
        (DegenerateDistanceError, ErrorType.DEGENERATE_DISTANCE),
        (ContractViolationError, ErrorType.CONTRACT_VIOLATION),
    ]

    def __init__(self, max_attempts: int = 3):
        """
        Initialize retry handler.

        Args:
            max_attempts: Attempts per round, including the first
        """
        if max_attempts < 1:
            raise ContractViolationError("max_attempts must be at least 1")
        self.max_attempts = max_attempts
        self.logger = get_logger("retry_handler")

    def classify_error(self, error: Exception) -> ErrorType:
        """
        Classify an error to determine retry strategy.

        Args:
            error: Exception to classify; an aborted round is classified by its cause

        Returns:
            ErrorType classification
        """
        if isinstance(error, RoundAbortedError):
            error = error.cause
        for error_class, error_type in self.ERROR_CLASSES:
            if isinstance(error, error_class):
                return error_type
        return ErrorType.UNKNOWN

    def should_retry(self, error: Exception, attempt: int) -> bool:
        """
        Determine if an operation should be retried.

        Args:
            error: Exception that occurred
            attempt: Current attempt number (1-indexed)

        Returns:
            True if operation should be retried
        """
        error_type = self.classify_error(error)
        if error_type.is_permanent:
            self.logger.info(f"Permanent error ({error_type.value}): not retrying")
            return False

        if attempt >= self.max_attempts:
            self.logger.warning(f"Max retry attempts ({self.max_attempts}) reached")
            return False

        self.logger.debug(f"Temporary error ({error_type.value}): will retry")
        return True

    def run(self, func: Callable[[int], T]) -> RetryResult:
        """
        Call ``func(attempt)`` with attempt = 0, 1, ... until it succeeds or must stop.

        Args:
            func: Operation taking the zero-based attempt number

        Returns:
            RetryResult with the value on success, or the last error
        """
        for attempt in range(1, self.max_attempts + 1):
            try:
                value = func(attempt - 1)
                if attempt > 1:
                    self.logger.info(f"Success on attempt {attempt}")
                return RetryResult(success=True, attempts=attempt, value=value)

            except Exception as e:
                self.logger.warning(f"Attempt {attempt} failed: {e}")
                if not self.should_retry(e, attempt):
                    return RetryResult(
                        success=False,
                        attempts=attempt,
                        error=e,
                        error_type=self.classify_error(e),
                    )

        raise AssertionError("unreachable: the last attempt never retries")
