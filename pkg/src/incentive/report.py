"""Token report: a read-only projection of the incentive registry state."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple, Union

from datagen.records import render_float
from ledger import ContractState, Payout


TOKEN_CSV_HEADER = ("address", "rounds_participated", "total_data_size", "mean_distance", "balance")


@dataclass(frozen=True)
class TokenRow:
    address: str
    rounds_participated: int
    total_data_size: int
    mean_distance: float
    balance: float


@dataclass(frozen=True)
class TokenReport:
    rows: Tuple[TokenRow, ...]
    payouts: Tuple[Payout, ...]

    @property
    def balances(self) -> Dict[str, float]:
        return {row.address: row.balance for row in self.rows}

    def leader(self) -> str:
        """Address with the largest balance (first in registry order on ties)."""
        if not self.rows:
            raise ValueError("Token report has no clients")
        return max(self.rows, key=lambda row: row.balance).address

    @classmethod
    def from_state(cls, state: ContractState) -> "TokenReport":
        """Every registered client, in registry order; the coordinator is omitted."""
        paid: Dict[str, List[Payout]] = {}
        for payout in state.payouts:
            paid.setdefault(payout.client, []).append(payout)

        rows = []
        for address in state.organizations:
            if address == state.coordinator:
                continue
            payouts = paid.get(address, [])
            work = [state.contri[(address, p.round_no)] for p in payouts]
            mean_distance = sum(w.distance for w in work) / len(work) if work else 0.0
            rows.append(TokenRow(
                address=address,
                rounds_participated=len(payouts),
                total_data_size=sum(w.data_size for w in work),
                mean_distance=mean_distance,
                balance=state.token.get(address, 0.0),
            ))
        return cls(rows=tuple(rows), payouts=tuple(state.payouts))

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TOKEN_CSV_HEADER)
            for row in self.rows:
                writer.writerow([
                    row.address,
                    row.rounds_participated,
                    row.total_data_size,
                    render_float(row.mean_distance),
                    render_float(row.balance),
                ])
        return path

    def write_payouts_csv(self, path: Union[str, Path]) -> Path:
        """Per-round payout table in chain order."""
        path = Path(path)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("round", "address", "tokens"))
            for p in self.payouts:
                writer.writerow([p.round_no, p.client, render_float(p.tokens)])
        return path
