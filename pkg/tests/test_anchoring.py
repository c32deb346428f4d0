"""Merkle roots over period records, anchoring and dispute resolution."""

import hashlib

import numpy as np
import pytest

from conftest import make_record, random_records
from utils.errors import ContractViolationError, LedgerRejectionError, NotFoundError
from datagen import Record, render_float
from anchoring import (
    AnchorPeriod,
    AnchoringService,
    build_merkle,
    canonicalize,
    leaf_hash,
    merkle_root,
    period_records,
)
from ledger import Ledger


def sha(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def period(period_id, client_id, records, length=1):
    return AnchorPeriod.numbered(period_id, length, client_id, len(records))


def test_canonical_zero_record():
    assert canonicalize(make_record([], 0)) == ",".join(["0"] * 19)


def test_canonical_text_round_trips(rng):
    for value in list(rng.standard_normal(500) * 10.0 ** rng.integers(-300, 300, size=500)) + [0.1, 1 / 3]:
        assert float(render_float(value)) == value


def test_single_leaf_root():
    record = make_record([1.5], 1)
    assert merkle_root([record]) == sha(canonicalize(record).encode())


def test_two_and_three_leaf_roots():
    a, b, c = make_record([1.0], 1), make_record([2.0], 0), make_record([3.0], 1)
    h1, h2, h3 = leaf_hash(a), leaf_hash(b), leaf_hash(c)
    assert merkle_root([a, b]) == sha(h1 + h2)
    assert merkle_root([a, b, c]) == sha(sha(h1 + h2) + sha(h3 + h3))


def test_level_sizes_halve(rng):
    for n in (1, 2, 3, 5, 8, 13):
        tree = build_merkle(random_records(rng, n))
        sizes = [len(level) for level in tree.levels]
        assert sizes[0] == n
        assert sizes[-1] == 1
        assert all(later == -(-earlier // 2) for earlier, later in zip(sizes, sizes[1:]))


def test_empty_tree_rejected():
    with pytest.raises(ContractViolationError):
        build_merkle([])


def test_root_depends_on_order():
    a, b = make_record([1.0], 1), make_record([2.0], 0)
    assert merkle_root([a, b]) != merkle_root([b, a])


def mutate(rng, records):
    """One random single-record edit: nudge, delete, insert or swap."""
    records = list(records)
    kinds = ["nudge", "delete", "insert", "relabel"] + (["swap"] if len(records) > 1 else [])
    kind = kinds[int(rng.integers(len(kinds)))]
    i = int(rng.integers(len(records)))
    if kind == "nudge":
        features = list(records[i].features)
        j = int(rng.integers(len(features)))
        features[j] = float(np.nextafter(features[j], np.inf))
        records[i] = Record(tuple(features), records[i].label)
    elif kind == "delete":
        del records[i]
    elif kind == "insert":
        records.insert(i, random_records(rng, 1)[0])
    elif kind == "relabel":
        records[i] = Record(records[i].features, 1 - records[i].label)
    else:
        j = (i + 1 + int(rng.integers(len(records) - 1))) % len(records)
        records[i], records[j] = records[j], records[i]
    return records


def test_tamper_suite(rng):
    ledger = Ledger(["client-1"])
    service = AnchoringService(ledger)
    for trial in range(1, 501):
        records = random_records(rng, int(rng.integers(1, 65)))
        p = period(trial, "client-1", records)
        service.anchor_period("client-1", p, records)

        assert service.resolve_dispute("client-1", p, records).status == "Verified"
        tampered = service.resolve_dispute("client-1", p, mutate(rng, records))
        assert tampered.status == "Mismatch"
        assert not tampered.verified


def test_anchor_then_query(rng):
    ledger = Ledger(["client-1", "client-2"])
    service = AnchoringService(ledger)
    records = random_records(rng, 5)
    receipt = service.anchor_period("client-1", period(1, "client-1", records), records)
    assert receipt.height == ledger.height
    assert ledger.query_root("client-1", 1) == merkle_root(records)

    others = random_records(rng, 3)
    service.anchor_period("client-2", period(1, "client-2", others), others)
    assert ledger.query_root("client-2", 1) == merkle_root(others)
    assert ledger.query_root("client-1", 1) == merkle_root(records)


def test_reanchoring_a_period_is_rejected(rng):
    ledger = Ledger(["client-1"])
    service = AnchoringService(ledger)
    records = random_records(rng, 4)
    service.anchor_period("client-1", period(1, "client-1", records), records)
    with pytest.raises(LedgerRejectionError):
        service.anchor_period("client-1", period(1, "client-1", records[:2]), records[:2])


def test_empty_period_is_skipped():
    ledger = Ledger(["client-1"])
    assert AnchoringService(ledger).anchor_period("client-1", period(1, "client-1", []), []) is None
    assert ledger.height == 0


def test_dispute_without_anchor(rng):
    records = random_records(rng, 2)
    with pytest.raises(NotFoundError):
        AnchoringService(Ledger(["client-1"])).resolve_dispute("client-1", period(1, "client-1", records), records)


def test_period_bounds():
    p = AnchorPeriod.numbered(3, 5, "client-1", 7)
    assert (p.start, p.end, p.period_time) == (11, 15, 15)
    with pytest.raises(ContractViolationError):
        AnchorPeriod.numbered(0, 5, "client-1", 7)


def test_periods_partition_the_stream(rng):
    records = random_records(rng, 23)
    parts = [period_records(records, p, 4) for p in range(1, 5)]
    assert [r for part in parts for r in part] == records
    assert [len(part) for part in parts] == [6, 6, 6, 5]
    assert period_records(records[:2], 3, 3) == []
