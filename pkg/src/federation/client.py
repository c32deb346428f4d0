"""Federated clients and the ordered registry the coordinator selects from."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from utils.errors import ContractViolationError, MissingClassError, NotFoundError
from datagen.records import ClientDataset
from evaluation.centroid import centroid_distance
from learning.params import ModelParams
from learning.sgd import SgdConfig, sgd_update
from .aggregation import ClientUpdate


@dataclass(frozen=True)
class FederatedClient:
    """A client organization: its id, its data and its place in the registry."""
    client_id: str
    dataset: ClientDataset
    position: int

    @property
    def data_size(self) -> int:
        return len(self.dataset.train)

    def local_update(self, global_params: ModelParams, cfg: SgdConfig) -> ClientUpdate:
        """
        UpdateClient: E epochs of SGD from the global model on local data.

        The centroid distance is measured on the same training split every
        round it is used.
        """
        params = sgd_update(global_params, self.dataset, cfg)
        try:
            distance, missing = centroid_distance(self.dataset), None
        except MissingClassError as e:
            distance, missing = None, e.label
        return ClientUpdate(self.client_id, params, self.data_size, distance, missing)


class ClientRegistry:
    """Clients in a fixed order; the order drives selection and seeding."""

    def __init__(self, datasets: Sequence[ClientDataset]):
        self._clients: List[FederatedClient] = []
        self._by_id: Dict[str, FederatedClient] = {}
        for position, dataset in enumerate(datasets):
            if dataset.client_id in self._by_id:
                raise ContractViolationError(f"Duplicate client id {dataset.client_id}")
            client = FederatedClient(dataset.client_id, dataset, position)
            self._clients.append(client)
            self._by_id[client.client_id] = client
        if not self._clients:
            raise ContractViolationError("Client registry is empty")

    def __len__(self) -> int:
        return len(self._clients)

    def __iter__(self) -> Iterator[FederatedClient]:
        return iter(self._clients)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(c.client_id for c in self._clients)

    def get(self, client_id: str) -> FederatedClient:
        try:
            return self._by_id[client_id]
        except KeyError:
            raise NotFoundError(f"Unknown client {client_id!r}")

    def position(self, client_id: str) -> int:
        return self.get(client_id).position
