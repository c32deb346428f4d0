"""Replicated append-only chain with a single deterministic sealer."""

import threading
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from utils import get_logger
from utils.errors import LedgerRejectionError, NotFoundError
from .contracts import Contribution, ContractState
from .pow import meets_target, mine, nonce_bytes
from .transactions import (
    HASH_BYTES,
    Payload,
    Transaction,
    encode_bytes,
    encode_int,
    encode_uint,
    sha256,
)


logger = get_logger("ledger")

ZERO_HASH = bytes(HASH_BYTES)


def encode_tx_list(transactions: Sequence[Transaction]) -> bytes:
    return encode_int(len(transactions)) + b"".join(encode_bytes(tx.encode()) for tx in transactions)


def header_prefix(height: int, prev_hash: bytes, transactions: Sequence[Transaction]) -> bytes:
    """Everything the block hash covers except the nonce."""
    return encode_uint(height) + encode_bytes(prev_hash) + encode_tx_list(transactions)


@dataclass(frozen=True)
class Block:
    """A sealed block; ``nonce`` stays 0 when PoW is off."""
    height: int
    prev_hash: bytes
    transactions: Tuple[Transaction, ...]
    nonce: int
    block_hash: bytes

    def compute_hash(self) -> bytes:
        return sha256(header_prefix(self.height, self.prev_hash, self.transactions) + nonce_bytes(self.nonce))

    @classmethod
    def seal(
        cls,
        height: int,
        prev_hash: bytes,
        transactions: Sequence[Transaction],
        pow_difficulty: Optional[int] = None,
    ) -> "Block":
        transactions = tuple(transactions)
        prefix = header_prefix(height, prev_hash, transactions)
        if pow_difficulty is None:
            nonce, digest = 0, sha256(prefix + nonce_bytes(0))
        else:
            nonce, digest = mine(prefix, pow_difficulty)
        return cls(height, prev_hash, transactions, nonce, digest)

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "prev_hash": self.prev_hash.hex(),
            "block_hash": self.block_hash.hex(),
            "nonce": self.nonce,
            "transactions": [tx.to_json() for tx in self.transactions],
        }


@dataclass(frozen=True)
class TxReceipt:
    """Where a submitted transaction will land once the next block is sealed."""
    tx_id: bytes
    height: int
    index: int


@dataclass(frozen=True)
class ChainVerification:
    ok: bool
    first_invalid_height: Optional[int] = None
    reason: Optional[str] = None


class Ledger:
    """
    In-process stand-in for the permissioned chain.

    Every organization holds a replica of the block list. Submissions are
    checked against the pending state (sealed state plus queued transactions)
    and included FIFO by ``seal_block``; reads observe the last sealed state.
    """

    def __init__(
        self,
        organizations: Iterable[str],
        coordinator: str = "central",
        incentive_constant: float = 100.0,
        pow_difficulty: Optional[int] = None,
        _genesis: bool = True,
    ):
        orgs = list(dict.fromkeys(organizations))
        if coordinator not in orgs:
            orgs.insert(0, coordinator)
        self.organizations: Tuple[str, ...] = tuple(orgs)
        self.coordinator = coordinator
        self.incentive_constant = float(incentive_constant)
        self.pow_difficulty = pow_difficulty

        self._lock = threading.RLock()
        self._replicas: Dict[str, List[Block]] = {org: [] for org in self.organizations}
        self._state = ContractState(self.organizations, coordinator, self.incentive_constant)
        self._pending: List[Transaction] = []
        self._pending_state = self._state.copy()
        self._tx_ids: Set[bytes] = set()
        self._clock = 0

        if _genesis:
            self._append(Block.seal(0, ZERO_HASH, (), pow_difficulty))

    @classmethod
    def restore(
        cls,
        blocks: Sequence[Block],
        organizations: Iterable[str],
        coordinator: str,
        incentive_constant: float,
        pow_difficulty: Optional[int],
        cached_state: ContractState,
    ) -> "Ledger":
        """Rebuild a ledger from stored blocks without validating them; see ``verify_chain``."""
        ledger = cls(organizations, coordinator, incentive_constant, pow_difficulty, _genesis=False)
        for block in blocks:
            ledger._append(block)
        ledger._state = cached_state.copy()
        ledger._pending_state = cached_state.copy()
        ledger._clock = max((tx.timestamp for b in blocks for tx in b.transactions), default=0)
        return ledger

    def _append(self, block: Block) -> None:
        for replica in self._replicas.values():
            replica.append(block)
        self._tx_ids.update(tx.tx_id for tx in block.transactions)

    @property
    def blocks(self) -> Tuple[Block, ...]:
        return tuple(self._replicas[self.coordinator])

    def replica(self, organization: str) -> Tuple[Block, ...]:
        if organization not in self._replicas:
            raise NotFoundError(f"No replica for organization {organization!r}")
        return tuple(self._replicas[organization])

    @property
    def height(self) -> int:
        return len(self._replicas[self.coordinator]) - 1

    @property
    def tip(self) -> Block:
        return self._replicas[self.coordinator][-1]

    @property
    def state(self) -> ContractState:
        """Copy of the sealed contract state."""
        with self._lock:
            return self._state.copy()

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def make_transaction(self, sender: str, payload: Payload) -> Transaction:
        """Stamp a payload with the next logical time."""
        with self._lock:
            self._clock += 1
            return Transaction(sender, payload, self._clock)

    def submit(self, tx: Transaction) -> TxReceipt:
        """
        Queue a transaction for the next block.

        Raises:
            LedgerRejectionError: unregistered sender, duplicate tx_id or a contract rule
        """
        with self._lock:
            tx_id = tx.tx_id
            if tx_id in self._tx_ids or any(p.tx_id == tx_id for p in self._pending):
                raise self._reject(tx, f"duplicate transaction {tx_id.hex()[:16]}")
            try:
                # apply() validates fully before it mutates
                self._pending_state.apply(tx)
            except LedgerRejectionError as e:
                raise self._reject(tx, str(e))
            self._pending.append(tx)
            return TxReceipt(tx_id, self.height + 1, len(self._pending) - 1)

    def _reject(self, tx: Transaction, reason: str) -> LedgerRejectionError:
        logger.warning(f"Rejected {tx.payload.KIND} from {tx.sender}: {reason}")
        return LedgerRejectionError(reason)

    def submit_payload(self, sender: str, payload: Payload) -> TxReceipt:
        return self.submit(self.make_transaction(sender, payload))

    def seal_block(self) -> Block:
        """Seal all pending transactions (possibly none) into a block on every replica."""
        with self._lock:
            block = Block.seal(self.height + 1, self.tip.block_hash, self._pending, self.pow_difficulty)
            self._append(block)
            self._state = self._pending_state
            self._pending_state = self._state.copy()
            self._pending = []
            logger.debug(f"Sealed block {block.height} with {len(block.transactions)} transactions")
            return block

    def rollback_pending(self) -> int:
        """Discard the pending pool; returns how many transactions were dropped."""
        with self._lock:
            dropped = len(self._pending)
            self._pending = []
            self._pending_state = self._state.copy()
            if dropped:
                logger.info(f"Rolled back {dropped} pending transactions")
            return dropped

    def verify_chain(self) -> ChainVerification:
        """Recheck hashes, links, PoW, replica agreement and the replayed contract state."""
        with self._lock:
            blocks = self._replicas[self.coordinator]
            if not blocks:
                return ChainVerification(False, 0, "chain has no genesis block")

            for org, replica in self._replicas.items():
                if len(replica) != len(blocks):
                    height = min(len(replica), len(blocks))
                    return ChainVerification(False, height, f"replica {org} has {len(replica)} blocks")
                for a, b in zip(replica, blocks):
                    if a != b:
                        return ChainVerification(False, a.height, f"replica {org} diverges")

            replay = ContractState(self.organizations, self.coordinator, self.incentive_constant)
            seen: Set[bytes] = set()
            prev_hash = ZERO_HASH
            for height, block in enumerate(blocks):
                if block.height != height:
                    return ChainVerification(False, height, "height out of sequence")
                if block.prev_hash != prev_hash:
                    return ChainVerification(False, height, "prev_hash does not link")
                if block.compute_hash() != block.block_hash:
                    return ChainVerification(False, height, "block hash mismatch")
                if self.pow_difficulty is not None and not meets_target(block.block_hash, self.pow_difficulty):
                    return ChainVerification(False, height, "block hash above PoW target")
                for tx in block.transactions:
                    if tx.tx_id in seen:
                        return ChainVerification(False, height, "duplicate transaction")
                    seen.add(tx.tx_id)
                    try:
                        replay.apply(tx)
                    except LedgerRejectionError as e:
                        return ChainVerification(False, height, f"invalid transaction: {e}")
                prev_hash = block.block_hash

            if replay != self._state:
                return ChainVerification(False, len(blocks) - 1, "cached contract state differs from replay")
            return ChainVerification(True)

    def query_root(self, address: str, period_time: int) -> bytes:
        """
        Merkle root anchored by ``address`` for a period, from sealed state.

        Raises:
            NotFoundError: nothing anchored for (address, period_time)
        """
        with self._lock:
            root = self._state.root_registry.get((address, period_time))
        if root is None:
            raise NotFoundError(f"No root anchored by {address} for period time {period_time}")
        return root

    def query_tokens(self, address: str) -> float:
        """
        Token balance of a registered address; 0.0 before any payout.

        Raises:
            NotFoundError: unregistered address
        """
        with self._lock:
            if not self._state.is_registered(address):
                raise NotFoundError(f"Unknown address {address!r}")
            return self._state.token.get(address, 0.0)

    def query_contri(self, address: str, round_no: int, include_pending: bool = False) -> Contribution:
        """
        Contribution record of a client for a round.

        Args:
            include_pending: also see transactions queued for the next block

        Raises:
            NotFoundError: no status update for (address, round_no)
        """
        with self._lock:
            state = self._pending_state if include_pending else self._state
            work = state.contri.get((address, round_no))
        if work is None:
            raise NotFoundError(f"No contribution from {address} for round {round_no}")
        return work

    def query_selection(self, round_no: int, include_pending: bool = False) -> Tuple[str, ...]:
        """Selected client list of a round (see ``query_contri`` for ``include_pending``)."""
        with self._lock:
            state = self._pending_state if include_pending else self._state
            clients = state.selections.get(round_no)
        if clients is None:
            raise NotFoundError(f"No selection list for round {round_no}")
        return clients

