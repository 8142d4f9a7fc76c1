"""Drivers for the pre-training and training phases."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..training import ClassifierParams, TrainConfig
from .client import FederatedClient
from .server import FederatedServer
from .wire import InProcessTransport

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    train_loss: float
    val_acc: float
    test_acc: float


def run_hc_pretraining(
    clients: Sequence[FederatedClient], server: FederatedServer, num_layers: int, transport=None
) -> None:
    """Run ``num_layers`` completion rounds; afterwards every client holds X^(N).

    Each round is upload -> aggregate -> broadcast -> apply, with every
    message passed through ``transport``.
    """
    transport = transport or InProcessTransport()
    for layer in range(num_layers):
        for client in clients:
            server.receive_hc(transport.deliver(client.hc_client_round(layer)))
        broadcasts = server.aggregate_hc()
        for client in clients:
            client.hc_client_apply(transport.deliver(broadcasts[client.client_id]))
    log.debug("completion finished after %d rounds", num_layers)


def run_basic_propagation(clients: Sequence[FederatedClient], num_layers: int) -> None:
    for client in clients:
        client.basic_local_propagate(num_layers)


def _collect(clients: Sequence[FederatedClient], round_no: int) -> RoundMetrics:
    stats = [c.metrics() for c in clients]
    total_train = sum(s["train_count"] for s in stats)
    loss = (
        sum(s["train_count"] * s["train_loss"] for s in stats) / total_train
        if total_train
        else float("nan")
    )

    def acc(key):
        correct = sum(s[key][0] for s in stats)
        count = sum(s[key][1] for s in stats)
        return correct / count if count else float("nan")

    return RoundMetrics(round_no, float(loss), acc("val"), acc("test"))


def run_federated_training(
    clients: Sequence[FederatedClient],
    server: FederatedServer,
    config: TrainConfig,
    initial: ClassifierParams,
    transport=None,
) -> list[RoundMetrics]:
    """FedAvg over ``config.rounds`` rounds of ``config.local_iters`` local steps each.

    The server broadcasts ``initial`` first so every client starts from the
    same model. Clients keep their own Adam moments across rounds.
    """
    transport = transport or InProcessTransport()
    start = transport.deliver(server.initial_broadcast(initial))
    for client in clients:
        client.start_training(ClassifierParams([np.array(b) for b in start.param_blocks]), config)

    history = []
    for r in range(1, config.rounds + 1):
        for client in clients:
            server.receive_params(transport.deliver(client.local_update(config.local_iters)))
        update = server.aggregate_params()
        for client in clients:
            client.receive_params(transport.deliver(update))
        history.append(_collect(clients, r))
    return history


def run_isolated_training(
    clients: Sequence[FederatedClient], config: TrainConfig, initial: ClassifierParams
) -> list[RoundMetrics]:
    """Same schedule as federated training but nobody shares parameters."""
    for client in clients:
        client.start_training(initial, config)
    history = []
    for r in range(1, config.rounds + 1):
        for client in clients:
            client.trainer.train(config.local_iters)
        history.append(_collect(clients, r))
    return history
