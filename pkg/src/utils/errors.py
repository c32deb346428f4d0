"""Exception hierarchy shared by every simulator package."""

from typing import Optional


class FedChainError(Exception):
    """Base class for all simulator errors."""


class ConfigError(FedChainError):
    """Invalid experiment configuration; the message names the field."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class ContractViolationError(FedChainError):
    """A precondition or type invariant was broken by the caller."""


class LayoutMismatchError(ContractViolationError):
    """Parameter vectors with different layouts were combined."""


class DecodeError(FedChainError):
    """Serialized bytes do not describe a valid parameter vector."""


class DivergenceError(FedChainError):
    """Local training produced a non-finite loss."""

    def __init__(self, epoch: int, round_no: Optional[int] = None):
        self.epoch = epoch
        self.round_no = round_no
        where = f"epoch {epoch}" if round_no is None else f"round {round_no}, epoch {epoch}"
        super().__init__(f"Training diverged (non-finite loss) at {where}")

    def in_round(self, round_no: int) -> "DivergenceError":
        return DivergenceError(self.epoch, round_no)


class MissingClassError(FedChainError):
    """A dataset lacks one of the two classes."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"Dataset has no {label} records")


class DegenerateDistanceError(FedChainError):
    """A centroid distance of zero (or less) cannot be inverted."""


class ClientDropoutError(FedChainError):
    """A selected client failed to return an update."""

    def __init__(self, client_id: str, round_no: int):
        self.client_id = client_id
        self.round_no = round_no
        super().__init__(f"Client {client_id} dropped out of round {round_no}")


class RoundAbortedError(FedChainError):
    """A round was abandoned before aggregation; nothing was committed."""

    def __init__(self, round_no: int, cause: Exception):
        self.round_no = round_no
        self.cause = cause
        super().__init__(f"Round {round_no} aborted: {cause}")


class LedgerRejectionError(FedChainError):
    """The ledger or one of its contracts refused a transaction."""


class NotFoundError(FedChainError):
    """A registry lookup found no entry for the key."""


class DatasetParseError(FedChainError):
    """A dataset file could not be parsed."""

    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}, line {line}: {reason}")


class DatasetSpecError(FedChainError):
    """A generator spec cannot produce a usable dataset."""


class IncentiveError(FedChainError):
    """No payout is possible for the requested contribution."""


class SnapshotError(FedChainError):
    """A chain snapshot file is unreadable."""

    def __init__(self, message: str, height: Optional[int] = None):
        super().__init__(message)
        self.height = height


class IncomparableConfigsError(FedChainError):
    """Experiment configs differ in more than their mode."""
