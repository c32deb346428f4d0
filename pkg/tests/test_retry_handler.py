"""Round retry policy."""

import pytest

from utils.errors import (
    ClientDropoutError,
    ContractViolationError,
    DivergenceError,
    LedgerRejectionError,
    RoundAbortedError,
)
from federation import ErrorType, RetryHandler


def test_classifies_aborted_rounds_by_cause():
    handler = RetryHandler()
    dropout = RoundAbortedError(4, ClientDropoutError("client-2", 4))
    assert handler.classify_error(dropout) is ErrorType.CLIENT_DROPOUT
    assert handler.classify_error(RoundAbortedError(4, LedgerRejectionError("no"))) is ErrorType.LEDGER_REJECTED
    assert handler.classify_error(DivergenceError(1)) is ErrorType.DIVERGENCE
    assert handler.classify_error(ValueError("?")) is ErrorType.UNKNOWN


def test_retries_temporary_failures_with_attempt_numbers():
    attempts = []

    def flaky(attempt):
        attempts.append(attempt)
        if attempt < 2:
            raise RoundAbortedError(1, ClientDropoutError("client-1", 1))
        return "done"

    result = RetryHandler(max_attempts=3).run(flaky)
    assert result.success
    assert result.value == "done"
    assert result.attempts == 3
    assert attempts == [0, 1, 2]


def test_gives_up_after_max_attempts():
    def always_drops(attempt):
        raise RoundAbortedError(1, ClientDropoutError("client-1", 1))

    result = RetryHandler(max_attempts=2).run(always_drops)
    assert not result.success
    assert result.attempts == 2
    assert not result.is_permanent


def test_permanent_errors_stop_at_once():
    calls = []

    def diverges(attempt):
        calls.append(attempt)
        raise DivergenceError(3)

    result = RetryHandler(max_attempts=5).run(diverges)
    assert calls == [0]
    assert result.is_permanent
    assert isinstance(result.error, DivergenceError)


def test_rejects_zero_attempts():
    with pytest.raises(ContractViolationError):
        RetryHandler(max_attempts=0)
