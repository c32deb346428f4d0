"""Periodic root anchoring and the dispute resolver."""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from utils import get_logger
from utils.errors import ContractViolationError
from datagen.records import Record
from ledger import AnchorRoot, Ledger, TxReceipt
from .merkle import merkle_root


logger = get_logger("anchoring")


@dataclass(frozen=True)
class AnchorPeriod:
    """
    One anchoring period of one client.

    Periods are numbered from 1 and cover ``period_length`` logical time
    units each, so consecutive periods are contiguous and never overlap.
    """
    period_id: int
    start: int
    end: int
    client_id: str
    record_count: int

    def __post_init__(self):
        if self.period_id < 1:
            raise ContractViolationError("period_id must be positive")
        if not 0 <= self.start <= self.end:
            raise ContractViolationError("period bounds must satisfy 0 <= start <= end")
        if self.record_count < 0:
            raise ContractViolationError("record_count must be non-negative")

    @property
    def period_time(self) -> int:
        """The timestamp anchored on-chain: the period's end."""
        return self.end

    @classmethod
    def numbered(cls, period_id: int, period_length: int, client_id: str, record_count: int) -> "AnchorPeriod":
        if period_length < 1:
            raise ContractViolationError("period_length must be at least 1")
        return cls(
            period_id=period_id,
            start=(period_id - 1) * period_length + 1,
            end=period_id * period_length,
            client_id=client_id,
            record_count=record_count,
        )


@dataclass(frozen=True)
class DisputeResult:
    """Verified when the recomputed root equals the anchored one."""
    anchored_root: bytes
    recomputed_root: Optional[bytes]

    @property
    def verified(self) -> bool:
        return self.recomputed_root == self.anchored_root

    @property
    def status(self) -> str:
        return "Verified" if self.verified else "Mismatch"


def period_records(records: Sequence[Record], period_id: int, n_periods: int) -> List[Record]:
    """Contiguous slice of ``records`` belonging to a period, in collection order."""
    if not 1 <= period_id <= n_periods:
        raise ContractViolationError(f"period_id {period_id} outside 1..{n_periods}")
    bounds = np.array_split(np.arange(len(records)), n_periods)[period_id - 1]
    if bounds.size == 0:
        return []
    return list(records[int(bounds[0]):int(bounds[-1]) + 1])


class AnchoringService:
    """Anchors period roots through the ledger and resolves disputes against them."""

    def __init__(self, ledger: Ledger):
        self.ledger = ledger

    def anchor_period(
        self,
        client_id: str,
        period: AnchorPeriod,
        records: Sequence[Record],
    ) -> Optional[TxReceipt]:
        """
        Build the period's tree, anchor (period end, root) and seal.

        Returns:
            The receipt, or None when the period holds no records

        Raises:
            ContractViolationError: records do not belong to the period
            LedgerRejectionError: the ledger refused the anchor (e.g. a duplicate)
        """
        if period.client_id != client_id:
            raise ContractViolationError(f"Period belongs to {period.client_id}, not {client_id}")
        if len(records) != period.record_count:
            raise ContractViolationError(
                f"Period {period.period_id} declares {period.record_count} records, got {len(records)}"
            )
        if not records:
            logger.info(f"Skipping anchor for {client_id} period {period.period_id}: no records")
            return None

        root = merkle_root(records)
        receipt = self.ledger.submit_payload(client_id, AnchorRoot(period.period_time, root))
        self.ledger.seal_block()
        logger.debug(f"Anchored {client_id} period {period.period_id} root {root.hex()[:16]}")
        return receipt

    def resolve_dispute(
        self,
        client_id: str,
        period: AnchorPeriod,
        claimed_records: Sequence[Record],
    ) -> DisputeResult:
        """
        Recompute the root from the claimed records and compare with the chain.

        Raises:
            NotFoundError: nothing anchored for (client, period)
        """
        anchored = self.ledger.query_root(client_id, period.period_time)
        recomputed = merkle_root(claimed_records) if claimed_records else None
        result = DisputeResult(anchored_root=anchored, recomputed_root=recomputed)
        if not result.verified:
            logger.warning(f"Dispute for {client_id} period {period.period_id}: root mismatch")
        return result
