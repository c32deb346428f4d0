"""Transactions and their canonical byte encoding.

Every field is length-prefixed (4-byte big-endian length) and written in
declared order: integers as 8-byte big-endian, floats as their IEEE-754 bit
pattern, strings as UTF-8. The same bytes feed tx ids and block hashes.
"""

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Tuple, Type, Union

from utils.errors import ContractViolationError, SnapshotError


HASH_BYTES = 32


def _field(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


def encode_int(value: int) -> bytes:
    return _field(struct.pack(">q", value))


def encode_uint(value: int) -> bytes:
    return _field(struct.pack(">Q", value))


def encode_float(value: float) -> bytes:
    return _field(struct.pack(">d", value))


def encode_str(value: str) -> bytes:
    return _field(value.encode("utf-8"))


def encode_bytes(value: bytes) -> bytes:
    return _field(value)


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


@dataclass(frozen=True)
class AnchorRoot:
    """UpdRootSC: Merkle root of one client's records for a period."""
    KIND: ClassVar[str] = "AnchorRoot"
    period_time: int
    root_hash: bytes

    def __post_init__(self):
        if len(self.root_hash) != HASH_BYTES:
            raise ContractViolationError("root_hash must be a 32-byte digest")

    def encode(self) -> bytes:
        return encode_str(self.KIND) + encode_int(self.period_time) + encode_bytes(self.root_hash)

    def to_json(self) -> Dict[str, Any]:
        return {"period_time": self.period_time, "root_hash": self.root_hash.hex()}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "AnchorRoot":
        return cls(int(data["period_time"]), bytes.fromhex(data["root_hash"]))


@dataclass(frozen=True)
class RoundSelection:
    """Clist: the addresses selected for a round, posted by the coordinator."""
    KIND: ClassVar[str] = "RoundSelection"
    round_no: int
    clients: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "clients", tuple(self.clients))

    def encode(self) -> bytes:
        body = encode_int(self.round_no) + encode_int(len(self.clients))
        return encode_str(self.KIND) + body + b"".join(encode_str(c) for c in self.clients)

    def to_json(self) -> Dict[str, Any]:
        return {"round_no": self.round_no, "clients": list(self.clients)}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "RoundSelection":
        return cls(int(data["round_no"]), tuple(str(c) for c in data["clients"]))


@dataclass(frozen=True)
class UpdateStatus:
    """UpdStaSC: a finished training contribution."""
    KIND: ClassVar[str] = "UpdateStatus"
    round_no: int
    data_size: int
    distance: float

    def encode(self) -> bytes:
        return (encode_str(self.KIND) + encode_int(self.round_no)
                + encode_int(self.data_size) + encode_float(self.distance))

    def to_json(self) -> Dict[str, Any]:
        return {"round_no": self.round_no, "data_size": self.data_size, "distance": self.distance}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "UpdateStatus":
        return cls(int(data["round_no"]), int(data["data_size"]), float(data["distance"]))


@dataclass(frozen=True)
class IncentivePayout:
    """CalIncentiveSC: tokens credited to a client for one round."""
    KIND: ClassVar[str] = "IncentivePayout"
    client: str
    round_no: int
    tokens: float

    def encode(self) -> bytes:
        return (encode_str(self.KIND) + encode_str(self.client)
                + encode_int(self.round_no) + encode_float(self.tokens))

    def to_json(self) -> Dict[str, Any]:
        return {"client": self.client, "round_no": self.round_no, "tokens": self.tokens}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "IncentivePayout":
        return cls(str(data["client"]), int(data["round_no"]), float(data["tokens"]))


Payload = Union[AnchorRoot, RoundSelection, UpdateStatus, IncentivePayout]

PAYLOAD_TYPES: Dict[str, Type] = {
    cls.KIND: cls for cls in (AnchorRoot, RoundSelection, UpdateStatus, IncentivePayout)
}


@dataclass(frozen=True)
class Transaction:
    """A payload sent by a registered organization at a logical time."""
    sender: str
    payload: Payload
    timestamp: int

    @property
    def tx_id(self) -> bytes:
        """SHA-256 of (sender, payload); the timestamp is not part of the identity."""
        return sha256(encode_str(self.sender) + self.payload.encode())

    def encode(self) -> bytes:
        return encode_str(self.sender) + encode_int(self.timestamp) + self.payload.encode()

    def to_json(self) -> Dict[str, Any]:
        return {
            "tx_id": self.tx_id.hex(),
            "sender": self.sender,
            "timestamp": self.timestamp,
            "kind": self.payload.KIND,
            "payload": self.payload.to_json(),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Transaction":
        payload_type = PAYLOAD_TYPES.get(data.get("kind"))
        if payload_type is None:
            raise SnapshotError(f"Unknown transaction kind: {data.get('kind')!r}")
        tx = cls(str(data["sender"]), payload_type.from_json(data["payload"]), int(data["timestamp"]))
        if tx.tx_id.hex() != data.get("tx_id"):
            raise SnapshotError(f"Recorded tx_id {data.get('tx_id')} does not match its content")
        return tx


def is_valid_distance(value: float) -> bool:
    return math.isfinite(value) and value > 0.0
