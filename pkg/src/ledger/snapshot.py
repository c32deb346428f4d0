"""Chain snapshot files: blocks, decoded payloads and the derived contract state."""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

from utils.errors import SnapshotError
from .chain import Block, Ledger
from .contracts import ContractState
from .transactions import Transaction, encode_float, encode_int, encode_str, encode_uint, sha256


SNAPSHOT_FORMAT = "fedchain-snapshot/1"


def header_digest(
    coordinator: str,
    organizations: Sequence[str],
    incentive_constant: float,
    pow_difficulty: Optional[int],
    height: int,
) -> bytes:
    """SHA-256 over the network settings that live outside the blocks."""
    parts = [encode_str(coordinator), encode_uint(len(organizations))]
    parts.extend(encode_str(org) for org in organizations)
    parts.append(encode_float(incentive_constant))
    parts.append(encode_int(-1 if pow_difficulty is None else pow_difficulty))
    parts.append(encode_uint(height))
    return sha256(b"".join(parts))


def snapshot_dict(ledger: Ledger) -> Dict[str, Any]:
    return {
        "format": SNAPSHOT_FORMAT,
        "coordinator": ledger.coordinator,
        "organizations": list(ledger.organizations),
        "incentive_constant": ledger.incentive_constant,
        "pow_difficulty": ledger.pow_difficulty,
        "height": ledger.height,
        "header_digest": header_digest(
            ledger.coordinator, ledger.organizations, ledger.incentive_constant,
            ledger.pow_difficulty, ledger.height,
        ).hex(),
        "blocks": [block.to_json() for block in ledger.blocks],
        "state": ledger.state.to_dict(),
    }


def save_snapshot(ledger: Ledger, path: Union[str, Path]) -> Path:
    """Write the snapshot as sorted, indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(snapshot_dict(ledger), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _block_from_json(data: Dict[str, Any], position: int) -> Block:
    try:
        transactions = tuple(Transaction.from_json(tx) for tx in data["transactions"])
        return Block(
            height=int(data["height"]),
            prev_hash=bytes.fromhex(data["prev_hash"]),
            transactions=transactions,
            nonce=int(data["nonce"]),
            block_hash=bytes.fromhex(data["block_hash"]),
        )
    except SnapshotError as e:
        raise SnapshotError(str(e), height=position)
    except Exception as e:
        raise SnapshotError(f"Malformed block: {e}", height=position)


def load_snapshot(path: Union[str, Path]) -> Ledger:
    """
    Rebuild a ledger from a snapshot file; call ``verify_chain`` to validate it.

    Raises:
        FileNotFoundError: no file at path
        SnapshotError: unreadable file, malformed content or edited header
            (with the block height when known)
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Snapshot not found: {path}")
    except (OSError, ValueError) as e:
        raise SnapshotError(f"Cannot read snapshot {path}: {e}")

    if not isinstance(data, dict) or data.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotError(f"{path} is not a {SNAPSHOT_FORMAT} file")

    try:
        raw_blocks = list(data["blocks"])
        coordinator = str(data["coordinator"])
        organizations = [str(o) for o in data["organizations"]]
        constant = float(data["incentive_constant"])
        difficulty = data["pow_difficulty"]
        difficulty = None if difficulty is None else int(difficulty)
        height = int(data["height"])
        digest = bytes.fromhex(data["header_digest"])
    except (KeyError, TypeError, ValueError) as e:
        raise SnapshotError(f"Malformed snapshot header: {e}")

    # header fields are not covered by block hashes; report them at genesis
    if height != len(raw_blocks) - 1:
        raise SnapshotError(f"Header height {height} but {len(raw_blocks)} blocks", height=0)
    if digest != header_digest(coordinator, organizations, constant, difficulty, height):
        raise SnapshotError("Header digest does not match the network settings", height=0)

    blocks = [_block_from_json(b, position) for position, b in enumerate(raw_blocks)]
    state = ContractState.from_dict(data.get("state", {}))
    return Ledger.restore(blocks, organizations, coordinator, constant, difficulty, state)
