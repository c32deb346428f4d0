"""Merkle anchoring of raw records and dispute resolution."""

from .merkle import MerkleTree, canonicalize, leaf_hash, hash_pair, build_merkle, merkle_root
from .protocol import AnchorPeriod, AnchoringService, DisputeResult, period_records

__all__ = [
    "MerkleTree",
    "canonicalize",
    "leaf_hash",
    "hash_pair",
    "build_merkle",
    "merkle_root",
    "AnchorPeriod",
    "AnchoringService",
    "DisputeResult",
    "period_records",
]
