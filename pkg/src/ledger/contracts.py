"""Root registry and incentive registry contract state.

The state is a pure fold over transactions: ``apply`` either mutates it
according to the contract rules or raises ``LedgerRejectionError`` and
leaves it untouched.
"""

import copy
from dataclasses import dataclass, field
from typing import Any, Dict, List, Set, Tuple

from utils.errors import LedgerRejectionError, SnapshotError
from .transactions import (
    AnchorRoot,
    IncentivePayout,
    RoundSelection,
    Transaction,
    UpdateStatus,
    is_valid_distance,
)


@dataclass(frozen=True)
class Contribution:
    """contri[addr][rNo]: one client's finished training work."""
    finished: bool
    data_size: int
    distance: float


@dataclass(frozen=True)
class Payout:
    client: str
    round_no: int
    tokens: float


def payout_amount(data_size: int, distance: float, constant: float) -> float:
    """token += dataSize + distance * C"""
    return data_size + distance * constant


@dataclass
class ContractState:
    """Everything the two contracts store, keyed the way queries read it."""
    organizations: Tuple[str, ...]
    coordinator: str
    incentive_constant: float
    root_registry: Dict[Tuple[str, int], bytes] = field(default_factory=dict)
    selections: Dict[int, Tuple[str, ...]] = field(default_factory=dict)
    contri: Dict[Tuple[str, int], Contribution] = field(default_factory=dict)
    token: Dict[str, float] = field(default_factory=dict)
    payouts: List[Payout] = field(default_factory=list)

    def __post_init__(self):
        self.organizations = tuple(self.organizations)
        self._paid: Set[Tuple[str, int]] = {(p.client, p.round_no) for p in self.payouts}

    def copy(self) -> "ContractState":
        return copy.deepcopy(self)

    def __eq__(self, other):
        if not isinstance(other, ContractState):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def is_registered(self, address: str) -> bool:
        return address in self.organizations

    def apply(self, tx: Transaction) -> None:
        """
        Validate a transaction against the contract rules and apply it.

        Raises:
            LedgerRejectionError: the transaction breaks a rule
        """
        if not self.is_registered(tx.sender):
            raise LedgerRejectionError(f"Sender {tx.sender!r} is not a registered organization")

        payload = tx.payload
        if isinstance(payload, AnchorRoot):
            self._apply_anchor(tx.sender, payload)
        elif isinstance(payload, RoundSelection):
            self._apply_selection(tx.sender, payload)
        elif isinstance(payload, UpdateStatus):
            self._apply_status(tx.sender, payload)
        elif isinstance(payload, IncentivePayout):
            self._apply_payout(tx.sender, payload)
        else:
            raise LedgerRejectionError(f"Unsupported payload {type(payload).__name__}")

    def _apply_anchor(self, sender: str, payload: AnchorRoot) -> None:
        key = (sender, payload.period_time)
        if key in self.root_registry:
            raise LedgerRejectionError(
                f"{sender} already anchored a root for period time {payload.period_time}"
            )
        self.root_registry[key] = payload.root_hash

    def _apply_selection(self, sender: str, payload: RoundSelection) -> None:
        if sender != self.coordinator:
            raise LedgerRejectionError(f"Only {self.coordinator} may post a selection list")
        if payload.round_no < 1:
            raise LedgerRejectionError("Selection round_no must be positive")
        if payload.round_no in self.selections:
            raise LedgerRejectionError(f"Round {payload.round_no} already has a selection list")
        if not payload.clients or len(set(payload.clients)) != len(payload.clients):
            raise LedgerRejectionError("Selection list must be non-empty and distinct")
        unknown = [c for c in payload.clients if not self.is_registered(c)]
        if unknown:
            raise LedgerRejectionError(f"Selection names unregistered clients: {unknown}")
        self.selections[payload.round_no] = payload.clients

    def _apply_status(self, sender: str, payload: UpdateStatus) -> None:
        key = (sender, payload.round_no)
        if sender not in self.selections.get(payload.round_no, ()):
            raise LedgerRejectionError(f"{sender} is not in the selection list of round {payload.round_no}")
        if key in self.contri:
            raise LedgerRejectionError(f"{sender} already reported status for round {payload.round_no}")
        if payload.data_size < 1:
            raise LedgerRejectionError("data_size must be at least 1")
        if not is_valid_distance(payload.distance):
            raise LedgerRejectionError("distance must be finite and positive")
        self.contri[key] = Contribution(True, payload.data_size, payload.distance)

    def _apply_payout(self, sender: str, payload: IncentivePayout) -> None:
        key = (payload.client, payload.round_no)
        if sender != payload.client:
            raise LedgerRejectionError("A payout must be claimed by the client it credits")
        if payload.client not in self.selections.get(payload.round_no, ()):
            raise LedgerRejectionError(
                f"{payload.client} is not in the selection list of round {payload.round_no}"
            )
        work = self.contri.get(key)
        if work is None or not work.finished:
            raise LedgerRejectionError(
                f"{payload.client} has no finished contribution for round {payload.round_no}"
            )
        if key in self._paid:
            raise LedgerRejectionError(f"{payload.client} was already paid for round {payload.round_no}")
        expected = payout_amount(work.data_size, work.distance, self.incentive_constant)
        if payload.tokens != expected:
            raise LedgerRejectionError(f"Payout of {payload.tokens} does not match {expected}")

        self.token[payload.client] = self.token.get(payload.client, 0.0) + payload.tokens
        self.payouts.append(Payout(payload.client, payload.round_no, payload.tokens))
        self._paid.add(key)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form with deterministic ordering."""
        return {
            "organizations": list(self.organizations),
            "coordinator": self.coordinator,
            "incentive_constant": self.incentive_constant,
            "root_registry": [
                {"address": addr, "period_time": t, "root_hash": root.hex()}
                for (addr, t), root in sorted(self.root_registry.items())
            ],
            "selections": [
                {"round_no": r, "clients": list(clients)}
                for r, clients in sorted(self.selections.items())
            ],
            "contri": [
                {"address": addr, "round_no": r, "finished": c.finished,
                 "data_size": c.data_size, "distance": c.distance}
                for (addr, r), c in sorted(self.contri.items())
            ],
            "token": {addr: self.token[addr] for addr in sorted(self.token)},
            "payouts": [
                {"client": p.client, "round_no": p.round_no, "tokens": p.tokens}
                for p in self.payouts
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ContractState":
        try:
            return cls(
                organizations=tuple(data["organizations"]),
                coordinator=str(data["coordinator"]),
                incentive_constant=float(data["incentive_constant"]),
                root_registry={
                    (e["address"], int(e["period_time"])): bytes.fromhex(e["root_hash"])
                    for e in data["root_registry"]
                },
                selections={int(e["round_no"]): tuple(e["clients"]) for e in data["selections"]},
                contri={
                    (e["address"], int(e["round_no"])): Contribution(
                        bool(e["finished"]), int(e["data_size"]), float(e["distance"])
                    )
                    for e in data["contri"]
                },
                token={addr: float(v) for addr, v in data["token"].items()},
                payouts=[
                    Payout(str(p["client"]), int(p["round_no"]), float(p["tokens"]))
                    for p in data["payouts"]
                ],
            )
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise SnapshotError(f"Malformed contract state: {e}")
