"""Per-round contribution records and token payouts, all through ledger transactions."""

import math
from dataclasses import dataclass
from typing import List, Sequence

from utils import get_logger
from utils.errors import ContractViolationError, IncentiveError, LedgerRejectionError, NotFoundError
from ledger import (
    IncentivePayout,
    Ledger,
    RoundSelection,
    TxReceipt,
    UpdateStatus,
    payout_amount,
)
from .report import TokenReport


logger = get_logger("incentive")

DEFAULT_CONSTANT = 100.0


@dataclass(frozen=True)
class IncentiveConfig:
    """C, the distance-to-token multiplier; fixed for a run."""
    constant: float = DEFAULT_CONSTANT

    def __post_init__(self):
        if not (math.isfinite(self.constant) and self.constant >= 0.0):
            raise ContractViolationError("Incentive constant C must be finite and non-negative")


@dataclass(frozen=True)
class TokenEvent:
    """One payout, as it also appears in the round report."""
    client_id: str
    round_no: int
    data_size: int
    distance: float
    tokens: float


@dataclass(frozen=True)
class WorkReport:
    """What a finished client reports for a round."""
    client_id: str
    data_size: int
    distance: float


class IncentiveRegistry:
    """Client of the incentive registry contract."""

    def __init__(self, ledger: Ledger, config: IncentiveConfig = IncentiveConfig()):
        if ledger.incentive_constant != config.constant:
            raise ContractViolationError(
                f"Ledger was built with C={ledger.incentive_constant}, config says {config.constant}"
            )
        self.ledger = ledger
        self.config = config

    def record_selection(self, round_no: int, clients: Sequence[str]) -> TxReceipt:
        """Post the round's Clist from the coordinator."""
        return self.ledger.submit_payload(self.ledger.coordinator, RoundSelection(round_no, tuple(clients)))

    def upd_status(self, address: str, round_no: int, data_size: int, distance: float) -> TxReceipt:
        """UpdStaSC: mark the client's training for the round as finished."""
        return self.ledger.submit_payload(address, UpdateStatus(round_no, data_size, distance))

    def cal_incentive(self, address: str, round_no: int) -> float:
        """
        CalIncentiveSC: credit data_size + distance * C for a finished contribution.

        Returns:
            Tokens awarded by this call

        Raises:
            IncentiveError: no finished contribution for (address, round)
            LedgerRejectionError: the contract refused the payout (e.g. already paid)
        """
        try:
            work = self.ledger.query_contri(address, round_no, include_pending=True)
        except NotFoundError:
            raise IncentiveError(f"No contribution from {address} for round {round_no}")
        if not work.finished:
            raise IncentiveError(f"Contribution from {address} for round {round_no} is unfinished")

        tokens = payout_amount(work.data_size, work.distance, self.config.constant)
        self.ledger.submit_payload(address, IncentivePayout(address, round_no, tokens))
        return tokens

    def settle_round(
        self,
        round_no: int,
        selected: Sequence[str],
        reports: Sequence[WorkReport],
    ) -> List[TokenEvent]:
        """
        Record a completed round atomically: selection, statuses, payouts, one block.

        Payouts go in address order. On any rejection the pending pool is
        rolled back so nothing of the round reaches the chain.

        Raises:
            LedgerRejectionError: any transaction of the round was refused
            IncentiveError: a payout found no finished contribution
        """
        try:
            self.record_selection(round_no, selected)
            for report in reports:
                self.upd_status(report.client_id, round_no, report.data_size, report.distance)
            events = []
            for report in sorted(reports, key=lambda r: r.client_id):
                tokens = self.cal_incentive(report.client_id, round_no)
                events.append(TokenEvent(report.client_id, round_no, report.data_size, report.distance, tokens))
        except (LedgerRejectionError, IncentiveError):
            self.ledger.rollback_pending()
            raise

        self.ledger.seal_block()
        logger.debug(f"Round {round_no}: settled {len(events)} payouts")
        return events

    def balance(self, address: str) -> float:
        return self.ledger.query_tokens(address)

    def token_report(self) -> TokenReport:
        """Balances and the payout table as sealed on the ledger."""
        return TokenReport.from_state(self.ledger.state)
