"""Contribution records, token payouts and the token report."""

import pytest

from utils.errors import ContractViolationError, IncentiveError, LedgerRejectionError, NotFoundError
from federation import AggregationMode, ClientRegistry, FederatedCoordinator
from incentive import IncentiveConfig, IncentiveRegistry, TokenReport, WorkReport
from ledger import ContractState, Ledger
from learning import ModelKind, SgdConfig, zeros
from datagen import generate, four_client_scenario


def registry_for(clients, constant):
    ledger = Ledger(clients, incentive_constant=constant)
    return ledger, IncentiveRegistry(ledger, IncentiveConfig(constant))


def test_payout_formula():
    ledger, incentive = registry_for(["client-1"], 10.0)
    events = incentive.settle_round(1, ["client-1"], [WorkReport("client-1", 1000, 2.5)])
    assert events[0].tokens == 1025.0
    assert incentive.balance("client-1") == 1025.0
    work = ledger.query_contri("client-1", 1)
    assert (work.finished, work.data_size, work.distance) == (True, 1000, 2.5)


def test_zero_constant_pays_data_size():
    _, incentive = registry_for(["client-1"], 0.0)
    incentive.settle_round(1, ["client-1"], [WorkReport("client-1", 1, 1e-9)])
    assert incentive.balance("client-1") == 1.0


def test_balances_add_up_over_rounds():
    _, incentive = registry_for(["client-1"], 100.0)
    incentive.settle_round(1, ["client-1"], [WorkReport("client-1", 1000, 2.0)])
    incentive.settle_round(2, ["client-1"], [WorkReport("client-1", 500, 4.0)])
    assert incentive.balance("client-1") == 2100.0


def test_unselected_client_cannot_report():
    ledger, incentive = registry_for(["client-1", "client-2"], 100.0)
    incentive.record_selection(1, ["client-1"])
    with pytest.raises(LedgerRejectionError):
        incentive.upd_status("client-2", 1, 100, 1.0)


def test_duplicate_status_rejected():
    _, incentive = registry_for(["client-1"], 100.0)
    incentive.record_selection(1, ["client-1"])
    incentive.upd_status("client-1", 1, 100, 1.0)
    with pytest.raises(LedgerRejectionError):
        incentive.upd_status("client-1", 1, 100, 1.5)


def test_payout_needs_a_contribution():
    _, incentive = registry_for(["client-1"], 100.0)
    incentive.record_selection(1, ["client-1"])
    with pytest.raises(IncentiveError):
        incentive.cal_incentive("client-1", 1)


def test_failed_settlement_leaves_no_trace():
    ledger, incentive = registry_for(["client-1", "client-2"], 100.0)
    with pytest.raises(LedgerRejectionError):
        incentive.settle_round(1, ["client-1"], [
            WorkReport("client-1", 100, 1.0),
            WorkReport("client-2", 100, 1.0),
        ])
    assert ledger.pending_count == 0
    assert ledger.height == 0
    with pytest.raises(NotFoundError):
        ledger.query_selection(1, include_pending=True)
    # The round can be settled once the reports are right
    incentive.settle_round(1, ["client-1"], [WorkReport("client-1", 100, 1.0)])
    assert incentive.balance("client-1") == 200.0


def test_constant_must_match_the_ledger():
    with pytest.raises(ContractViolationError):
        IncentiveRegistry(Ledger(["client-1"], incentive_constant=100.0), IncentiveConfig(5.0))


def test_report_before_any_round():
    ledger, _ = registry_for(["client-1", "client-2"], 100.0)
    report = TokenReport.from_state(ledger.state)
    assert report.balances == {"client-1": 0.0, "client-2": 0.0}
    assert report.payouts == ()


def test_widest_separation_earns_most():
    datasets = [generate(spec) for spec in four_client_scenario(n_train=60, n_test=10, seed=21)]
    registry = ClientRegistry(datasets)
    ledger, incentive = registry_for(registry.ids, 100.0)
    FederatedCoordinator(
        registry, SgdConfig(batch_size=10, epochs=0), master_seed=21, incentive=incentive
    ).run(zeros(ModelKind.LR), 3, AggregationMode.CDW_FEDAVG)

    report = incentive.token_report()
    assert report.leader() == "client-3"
    assert all(row.rounds_participated == 3 for row in report.rows)


def test_replayed_report_matches_live(tmp_path):
    ledger, incentive = registry_for(["client-1", "client-2"], 100.0)
    incentive.settle_round(1, ["client-1", "client-2"], [
        WorkReport("client-2", 300, 1.5),
        WorkReport("client-1", 200, 2.5),
    ])
    incentive.settle_round(2, ["client-2"], [WorkReport("client-2", 300, 1.5)])

    replay = ContractState(ledger.organizations, ledger.coordinator, ledger.incentive_constant)
    for block in ledger.blocks:
        for tx in block.transactions:
            replay.apply(tx)
    live = TokenReport.from_state(ledger.state)
    assert TokenReport.from_state(replay) == live
    assert [(p.client, p.round_no) for p in live.payouts] == [("client-1", 1), ("client-2", 1), ("client-2", 2)]

    path = live.write_csv(tmp_path / "tokens.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "address,rounds_participated,total_data_size,mean_distance,balance"
    assert lines[1] == "client-1,1,200,2.5,450"
