"""Anchoring and auditing period record files against a chain snapshot."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

from utils import get_logger
from utils.errors import SnapshotError
from datagen.csv_io import read_records
from datagen.records import Record
from ledger import ChainVerification, Ledger, TxReceipt, load_snapshot, save_snapshot
from anchoring import AnchorPeriod, AnchoringService, DisputeResult, period_records


logger = get_logger("audit")

PathLike = Union[str, Path]


@dataclass(frozen=True)
class PeriodSelection:
    """Which records of a CSV form the period.

    With ``n_periods`` unset the whole file is the period; otherwise the file
    is the client's full record stream split into contiguous periods.
    """
    client_id: str
    period_id: int
    period_length: int = 1
    n_periods: Optional[int] = None

    def records(self, csv_path: PathLike) -> List[Record]:
        records = read_records(csv_path)
        if self.n_periods is None:
            return records
        return period_records(records, self.period_id, self.n_periods)

    def period(self, record_count: int) -> AnchorPeriod:
        return AnchorPeriod.numbered(self.period_id, self.period_length, self.client_id, record_count)


def load_verified(snapshot_path: PathLike) -> Ledger:
    """
    Load a snapshot and replay it; a chain that fails verification is refused.

    Raises:
        SnapshotError: unreadable snapshot, or a chain that does not verify
    """
    ledger = load_snapshot(snapshot_path)
    verification = ledger.verify_chain()
    if not verification.ok:
        raise SnapshotError(
            f"{snapshot_path} failed verification: {verification.reason}",
            height=verification.first_invalid_height,
        )
    return ledger


def anchor_csv(
    snapshot_path: PathLike,
    selection: PeriodSelection,
    csv_path: PathLike,
    coordinator: str = "central",
    organizations: Optional[Sequence[str]] = None,
) -> Optional[TxReceipt]:
    """
    Anchor a period's records, extending the snapshot (created when missing).

    Args:
        organizations: addresses registered when a new snapshot is created;
            the anchoring client is always included

    Raises:
        LedgerRejectionError: the period is already anchored, or the client is not registered
        SnapshotError: the existing snapshot is unreadable or does not verify
    """
    snapshot_path = Path(snapshot_path)
    if snapshot_path.exists():
        ledger = load_verified(snapshot_path)
    else:
        members = list(organizations or [])
        if selection.client_id not in members:
            members.append(selection.client_id)
        logger.info(f"No snapshot at {snapshot_path}; starting a new chain for {', '.join(members)}")
        ledger = Ledger(members, coordinator=coordinator)

    records = selection.records(csv_path)
    receipt = AnchoringService(ledger).anchor_period(
        selection.client_id, selection.period(len(records)), records
    )
    save_snapshot(ledger, snapshot_path)
    return receipt


def audit_csv(snapshot_path: PathLike, selection: PeriodSelection, csv_path: PathLike) -> DisputeResult:
    """
    Recompute the period root from the claimed records and compare with the verified chain.

    Raises:
        NotFoundError: no anchor for (client, period)
        SnapshotError: the snapshot is unreadable or does not verify
    """
    ledger = load_verified(snapshot_path)
    records = selection.records(csv_path)
    return AnchoringService(ledger).resolve_dispute(
        selection.client_id, selection.period(len(records)), records
    )


def verify_snapshot(snapshot_path: PathLike) -> ChainVerification:
    """
    Re-validate a snapshot; unreadable blocks count as the first invalid height.

    Raises:
        SnapshotError: the file is unreadable before any block can be located
    """
    try:
        ledger = load_snapshot(snapshot_path)
    except SnapshotError as e:
        if e.height is None:
            raise
        return ChainVerification(False, e.height, str(e))
    return ledger.verify_chain()
