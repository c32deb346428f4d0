"""End-to-end runs: artifacts, determinism, comparison and the command line."""

import hashlib
import json

import pytest
import yaml

from conftest import make_record, random_records
from utils import IncomparableConfigsError, apply_overrides, build_config
from datagen import RECORD_WIRE_BYTES, write_records
from anchoring import merkle_root
from ledger import load_snapshot
from experiment import artifacts, build_datasets, compare, comparison_rows, expand_modes, run_experiment
from main import main


def sha256_of(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_config(tmp_path, data, name="experiment.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def test_run_writes_every_artifact(tiny_config_data):
    result = run_experiment(build_config(tiny_config_data))
    for name in (
        artifacts.CONFIG_FILE, artifacts.ROUNDS_FILE, artifacts.SUMMARY_FILE, artifacts.CHAIN_FILE,
        artifacts.TOKENS_FILE, artifacts.PAYOUTS_FILE, artifacts.COMM_FILE, artifacts.OVERHEAD_FILE,
        artifacts.TIMINGS_FILE,
    ):
        assert (result.output_dir / name).exists(), name

    summary = json.loads((result.output_dir / artifacts.SUMMARY_FILE).read_text())
    assert summary["comm_total"] == 144 * 4 * 3 * 2
    assert summary["chain_verified"] is True
    assert summary["aborted_rounds"] == []
    assert set(summary["token_balances"]) == {"client-1", "client-2", "client-3", "client-4"}
    # 4 anchors and one settlement block per round
    assert summary["chain_height"] == 3 * 5


def test_rounds_csv_is_reproducible(tiny_config_data, tmp_path):
    first = run_experiment(build_config(tiny_config_data))
    config = apply_overrides(build_config(tiny_config_data), {"experiment.output_dir": str(tmp_path / "again")})
    second = run_experiment(config)
    for name in (artifacts.ROUNDS_FILE, artifacts.SUMMARY_FILE, artifacts.CHAIN_FILE):
        assert sha256_of(first.output_dir / name) == sha256_of(second.output_dir / name)


def test_centralized_comm_is_the_dataset_size(tiny_config_data):
    config = apply_overrides(build_config(tiny_config_data), {"experiment.mode": "centralized"})
    result = run_experiment(config)
    assert result.comm_total == 4 * 40 * RECORD_WIRE_BYTES
    assert result.summary["token_balances"] == {c: 0.0 for c in result.summary["clients"]}


def test_overhead_table(tiny_config_data):
    result = run_experiment(build_config(tiny_config_data))
    lines = (result.output_dir / artifacts.OVERHEAD_FILE).read_text().splitlines()
    assert lines[0] == "scheme,10^3,10^6,10^9,measured"
    assert lines[1] == "Centralized_LR,1000,1000000,1000000000,"
    assert lines[5] == "Fed_LR(4),3456,3456,3456,3456"
    assert artifacts.federated_overhead(144, 3, 100) == 86400


def test_compare_modes(tiny_config_data):
    configs = expand_modes(build_config(tiny_config_data), ["fedavg", "cdw_fedavg", "local"])
    results = compare(configs)
    rows = comparison_rows(results)
    assert len(rows) == 3 * 3 * 4
    assert [r[0] for r in rows[::12]] == ["fedavg", "cdw_fedavg", "local"]
    assert results[2].comm_total == 0


def test_incomparable_configs(tiny_config_data):
    base = build_config(tiny_config_data)
    with pytest.raises(IncomparableConfigsError):
        compare([base, apply_overrides(base, {"training.epochs": 2})])
    with pytest.raises(IncomparableConfigsError):
        compare([base])


def test_learning_reaches_high_accuracy_on_separable_data(tmp_path):
    data = {
        "experiment": {"mode": "fedavg", "rounds": 10, "seed": 8, "output_dir": str(tmp_path / "sane")},
        "training": {"epochs": 5, "batch_size": 32},
        "data": {"n_train": 500, "n_test": 500, "separations": [6.0, 6.0, 6.0, 6.0]},
        "logging": {"level": "WARNING", "file": None},
    }
    fedavg = run_experiment(build_config(data))
    assert all(m["accuracy"] >= 0.95 for m in fedavg.summary["final_metrics"].values())

    cdw = run_experiment(apply_overrides(build_config(data), {
        "experiment.mode": "cdw_fedavg", "experiment.output_dir": str(tmp_path / "sane-cdw"),
    }))
    for a, b in zip(fedavg.run.reports, cdw.run.reports):
        for x, y in zip(a.clients, b.clients):
            assert x.metrics.accuracy == pytest.approx(y.metrics.accuracy, abs=1e-9)


class TestCommandLine:

    def test_run(self, tiny_config_data, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config_data)
        assert main(["run", "--config", str(path), "--rounds", "2", "--mode", "local"]) == 0
        assert "mode=local comm_total=0" in capsys.readouterr().out

    def test_invalid_override_is_a_usage_error(self, tiny_config_data, tmp_path):
        path = write_config(tmp_path, tiny_config_data)
        assert main(["run", "--config", str(path), "--epochs", "-1"]) == 1

    def test_missing_config_is_a_usage_error(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "absent.yaml")]) == 1

    def test_bad_arguments_exit_with_usage_code(self):
        with pytest.raises(SystemExit) as info:
            main(["run", "--rounds", "many"])
        assert info.value.code == 1

    def test_divergence_exit_code(self, tmp_path, capsys):
        records = [make_record([1e200] * 18, 1), make_record([-1e200] * 18, 0)] * 2
        train = write_records(records, tmp_path / "wild.train.csv")
        test = write_records(records[:2], tmp_path / "wild.test.csv")
        path = write_config(tmp_path, {
            "experiment": {"mode": "local", "rounds": 2, "output_dir": str(tmp_path / "out")},
            "training": {"epochs": 2, "batch_size": 2},
            "data": {"clients": [{"id": "wild", "train_csv": str(train), "test_csv": str(test)}]},
            "logging": {"level": "WARNING", "file": None},
        })
        assert main(["run", "--config", str(path)]) == 2
        assert "round 1" in capsys.readouterr().err

    def test_anchor_and_audit(self, tmp_path, rng):
        records = random_records(rng, 9)
        csv_path = write_records(records, tmp_path / "period.csv")
        snapshot = tmp_path / "chain.json"
        flags = ["--snapshot", str(snapshot), "--client", "client-1", "--csv", str(csv_path)]

        assert main(["anchor", "--period", "1"] + flags) == 0
        assert main(["audit", "--period", "1"] + flags) == 0
        assert main(["anchor", "--period", "1"] + flags) == 1
        assert main(["audit", "--period", "2"] + flags) == 4

        tampered = write_records(records[::-1], tmp_path / "tampered.csv")
        audit_tampered = ["audit", "--period", "1", "--snapshot", str(snapshot),
                          "--client", "client-1", "--csv", str(tampered)]
        assert main(audit_tampered) == 3
        assert main(["verify-chain", "--snapshot", str(snapshot)]) == 0

    def test_audit_refuses_a_forged_state_root(self, tmp_path, rng, capsys):
        records = random_records(rng, 6)
        csv_path = write_records(records, tmp_path / "period.csv")
        snapshot = tmp_path / "chain.json"
        flags = ["--snapshot", str(snapshot), "--client", "client-1", "--period", "1"]
        assert main(["anchor", "--csv", str(csv_path)] + flags) == 0

        tampered = records[::-1]
        tampered_csv = write_records(tampered, tmp_path / "tampered.csv")
        data = json.loads(snapshot.read_text())
        data["state"]["root_registry"][0]["root_hash"] = merkle_root(tampered).hex()
        snapshot.write_text(json.dumps(data))

        assert main(["audit", "--csv", str(tampered_csv)] + flags) == 3
        assert "failed verification" in capsys.readouterr().err

        other = write_records(random_records(rng, 3), tmp_path / "other.csv")
        anchor_other = ["anchor", "--snapshot", str(snapshot), "--client", "client-1",
                        "--period", "2", "--csv", str(other)]
        assert main(anchor_other) == 3
        assert json.loads(snapshot.read_text()) == data

    def test_two_clients_anchor_into_one_snapshot(self, tmp_path, rng):
        snapshot = tmp_path / "chain.json"
        first = random_records(rng, 5)
        second = random_records(rng, 4)
        for client, records in (("client-1", first), ("client-2", second)):
            csv_path = write_records(records, tmp_path / f"{client}.csv")
            assert main(["anchor", "--snapshot", str(snapshot), "--client", client, "--period", "1",
                         "--csv", str(csv_path), "--organizations", "client-1", "client-2"]) == 0

        ledger = load_snapshot(snapshot)
        assert ledger.query_root("client-1", 1) == merkle_root(first)
        assert ledger.query_root("client-2", 1) == merkle_root(second)
        assert ledger.verify_chain().ok

    def test_unregistered_client_cannot_join_a_snapshot(self, tmp_path, rng):
        snapshot = tmp_path / "chain.json"
        csv_path = write_records(random_records(rng, 3), tmp_path / "period.csv")
        base = ["anchor", "--snapshot", str(snapshot), "--period", "1", "--csv", str(csv_path)]
        assert main(base + ["--client", "client-1"]) == 0
        assert main(base + ["--client", "client-2"]) == 1

    def test_audit_a_period_of_a_run(self, tiny_config_data, tmp_path):
        config = build_config(tiny_config_data)
        result = run_experiment(config)
        client_2 = next(ds for ds in build_datasets(config) if ds.client_id == "client-2")
        train_csv = write_records(client_2.train, tmp_path / "client-2.train.csv")
        snapshot = str(result.output_dir / artifacts.CHAIN_FILE)
        assert main(["audit", "--snapshot", snapshot, "--client", "client-2", "--period", "2",
                     "--csv", str(train_csv), "--periods", "3"]) == 0

    def test_verify_chain_detects_tampering(self, tiny_config_data, tmp_path, capsys):
        result = run_experiment(build_config(tiny_config_data))
        snapshot = result.output_dir / artifacts.CHAIN_FILE
        data = json.loads(snapshot.read_text())
        data["blocks"][4]["nonce"] = 7
        snapshot.write_text(json.dumps(data))
        assert main(["verify-chain", "--snapshot", str(snapshot)]) == 3
        assert "height 4" in capsys.readouterr().out

    def test_compare(self, tiny_config_data, tmp_path):
        path = write_config(tmp_path, tiny_config_data)
        output = tmp_path / "comparison.csv"
        assert main(["compare", str(path), "--modes", "fedavg", "centralized", "--output", str(output)]) == 0
        lines = output.read_text().splitlines()
        assert lines[0] == "mode,round,client_id,accuracy,precision,recall,f1"
        assert len(lines) == 1 + 2 * 3 * 4

    def test_gen_data(self, tiny_config_data, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config_data)
        out = tmp_path / "data"
        assert main(["gen-data", "--config", str(path), "--output-dir", str(out)]) == 0
        assert (out / "client-3.train.csv").exists()
        assert (out / "client-3.projection.csv").exists()
