"""Simulated replicated ledger with the root and incentive registry contracts."""

from .transactions import (
    AnchorRoot,
    RoundSelection,
    UpdateStatus,
    IncentivePayout,
    Transaction,
    Payload,
)
from .contracts import Contribution, ContractState, Payout, payout_amount
from .pow import DEFAULT_DIFFICULTY, pow_target, meets_target, mine
from .chain import Block, Ledger, TxReceipt, ChainVerification, ZERO_HASH
from .snapshot import save_snapshot, load_snapshot, snapshot_dict

__all__ = [
    "AnchorRoot",
    "RoundSelection",
    "UpdateStatus",
    "IncentivePayout",
    "Transaction",
    "Payload",
    "Contribution",
    "ContractState",
    "Payout",
    "payout_amount",
    "DEFAULT_DIFFICULTY",
    "pow_target",
    "meets_target",
    "mine",
    "Block",
    "Ledger",
    "TxReceipt",
    "ChainVerification",
    "ZERO_HASH",
    "save_snapshot",
    "load_snapshot",
    "snapshot_dict",
]
