"""
Binary Merkle tree over a period's raw records.

Leaves are SHA-256 of each record's canonical string, in collection order.
A parent is SHA-256 of the two raw 32-byte child digests concatenated; an
odd node at the end of a level is paired with itself.
"""

import hashlib
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from utils.errors import ContractViolationError
from datagen.records import Record, render_float


def canonicalize(record: Record) -> str:
    """Comma-separated shortest round-trip features, then the label; no whitespace."""
    return ",".join([render_float(v) for v in record.features] + [str(record.label)])


def _sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def leaf_hash(record: Record) -> bytes:
    return _sha256(canonicalize(record).encode("utf-8"))


def hash_pair(left: bytes, right: bytes) -> bytes:
    return _sha256(left + right)


@dataclass(frozen=True)
class MerkleTree:
    leaves: Tuple[bytes, ...]
    levels: Tuple[Tuple[bytes, ...], ...]
    root: bytes


def _next_level(nodes: Sequence[bytes]) -> List[bytes]:
    parents = []
    for i in range(0, len(nodes), 2):
        left = nodes[i]
        right = nodes[i + 1] if i + 1 < len(nodes) else left
        parents.append(hash_pair(left, right))
    return parents


def build_merkle(records: Sequence[Record]) -> MerkleTree:
    """
    Build the tree for an ordered, non-empty record list.

    Raises:
        ContractViolationError: no records
    """
    if not records:
        raise ContractViolationError("Cannot build a Merkle tree over zero records")

    level = [leaf_hash(r) for r in records]
    levels = [tuple(level)]
    while len(level) > 1:
        level = _next_level(level)
        levels.append(tuple(level))
    return MerkleTree(leaves=levels[0], levels=tuple(levels), root=level[0])


def merkle_root(records: Sequence[Record]) -> bytes:
    return build_merkle(records).root
