"""Toy proof-of-work: find a nonce whose block hash falls below the target."""

import hashlib
import struct
from typing import Tuple

from utils.errors import ContractViolationError


DEFAULT_DIFFICULTY = 0x4000
MAX_NONCE = 2 ** 64


def pow_target(difficulty: int) -> int:
    """target = 2^256 / difficulty"""
    if difficulty < 1:
        raise ContractViolationError("PoW difficulty must be at least 1")
    return 2 ** 256 // difficulty


def hash_to_int(digest: bytes) -> int:
    return int.from_bytes(digest, "big")


def meets_target(digest: bytes, difficulty: int) -> bool:
    return hash_to_int(digest) < pow_target(difficulty)


def nonce_bytes(nonce: int) -> bytes:
    return struct.pack(">Q", nonce)


def mine(prefix: bytes, difficulty: int) -> Tuple[int, bytes]:
    """
    Search nonces from 0 upward.

    Returns:
        (nonce, digest) with sha256(prefix + nonce) below the target
    """
    target = pow_target(difficulty)
    base = hashlib.sha256(prefix)
    for nonce in range(MAX_NONCE):
        h = base.copy()
        h.update(nonce_bytes(nonce))
        digest = h.digest()
        if hash_to_int(digest) < target:
            return nonce, digest
    raise ContractViolationError("Nonce space exhausted")
