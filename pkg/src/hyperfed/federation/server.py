"""Server-side aggregation: hyperedge completion and FedAvg."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..errors import CountMismatch, DuplicateUpload, IncompleteRound, ProtocolError, ShapeMismatch
from ..partition import BorderIndex
from ..training import ClassifierParams
from .messages import (
    HcBroadcastEntry,
    HcBroadcastMsg,
    HcUploadMsg,
    ParamBroadcastMsg,
    ParamUploadMsg,
)


def _by_client(uploads: Iterable, expected: Iterable[int] | None):
    staged = {}
    for msg in uploads:
        if msg.client_id in staged:
            raise DuplicateUpload(f"second upload from client {msg.client_id}")
        staged[msg.client_id] = msg
    if expected is not None:
        missing = sorted(set(expected) - set(staged))
        if missing:
            raise IncompleteRound(f"waiting on clients {missing}")
    return dict(sorted(staged.items()))


def hc_server_aggregate(
    uploads: Sequence[HcUploadMsg],
    border_index: BorderIndex,
    expected_clients: Iterable[int] | None = None,
) -> dict[int, HcBroadcastMsg]:
    """Sum partial border-edge embeddings and route them back to their clients.

    Returns one broadcast per uploading client (possibly with no entries).
    Partial sums are accumulated in ascending client id. Per-client member
    counts are only used to check the global edge degree.
    """
    staged = _by_client(uploads, expected_clients)
    layers = {msg.layer for msg in staged.values()}
    if len(layers) > 1:
        raise ProtocolError(f"uploads mix layers {sorted(layers)}")
    layer = layers.pop() if layers else 0

    sums: dict[int, np.ndarray] = {}
    counts: dict[int, int] = {}
    seen: dict[int, list[int]] = {}
    for client_id, msg in staged.items():
        edge_ids = [entry.edge_id for entry in msg.entries]
        if len(set(edge_ids)) != len(edge_ids):
            raise DuplicateUpload(f"client {client_id} repeated a border edge id")
        for entry in msg.entries:
            info = border_index.entries.get(entry.edge_id)
            if info is None or client_id not in info.clients:
                raise ProtocolError(
                    f"client {client_id} uploaded edge {entry.edge_id} it does not border"
                )
            vec = np.asarray(entry.embedding, dtype=np.float64)
            if entry.edge_id in sums:
                sums[entry.edge_id] = sums[entry.edge_id] + vec
            else:
                sums[entry.edge_id] = vec.copy()
            counts[entry.edge_id] = counts.get(entry.edge_id, 0) + int(entry.count)
            seen.setdefault(entry.edge_id, []).append(client_id)

    for edge_id, info in border_index.entries.items():
        reporters = [c for c in info.clients if c in staged]
        if not reporters:
            continue
        if seen.get(edge_id, []) != list(info.clients):
            raise IncompleteRound(
                f"edge {edge_id}: expected uploads from {list(info.clients)}, got {seen.get(edge_id, [])}"
            )
        if counts[edge_id] != info.total:
            raise CountMismatch(
                f"edge {edge_id}: reported member counts sum to {counts[edge_id]}, degree is {info.total}"
            )

    out = {}
    for client_id in staged:
        entries = tuple(
            HcBroadcastEntry(e, sums[e], border_index[e].total, border_index[e].weight)
            for e in sorted(sums)
            if client_id in border_index[e].clients
        )
        out[client_id] = HcBroadcastMsg(layer, entries)
    return out


def fedavg_weights(counts: Sequence[int]) -> list[float]:
    total = sum(int(c) for c in counts)
    if total <= 0:
        raise ProtocolError("FedAvg needs at least one training node across clients")
    return [float(Fraction(int(c), total)) for c in counts]


def fedavg_aggregate(
    uploads: Sequence[ParamUploadMsg], expected_clients: Iterable[int] | None = None
) -> ParamBroadcastMsg:
    """Training-node-count weighted average of every parameter block."""
    staged = _by_client(uploads, expected_clients)
    if not staged:
        raise IncompleteRound("no parameter uploads")
    msgs = list(staged.values())
    shapes = [np.shape(b) for b in msgs[0].param_blocks]
    for msg in msgs[1:]:
        got = [np.shape(b) for b in msg.param_blocks]
        if got != shapes:
            raise ShapeMismatch(f"client {msg.client_id} sent blocks {got}, expected {shapes}")
    weights = fedavg_weights([m.train_node_count for m in msgs])
    blocks = []
    for k, shape in enumerate(shapes):
        acc = np.zeros(shape)
        for w, msg in zip(weights, msgs):
            acc = acc + w * np.asarray(msg.param_blocks[k], dtype=np.float64)
        blocks.append(acc)
    return ParamBroadcastMsg(tuple(blocks))


class FederatedServer:
    """Synchronous aggregator with a full-participation barrier.

    Uploads are staged per HC layer or per training round; aggregation
    refuses to fire until every expected client has reported, and a second
    upload from the same client for the same stage is rejected.
    """

    def __init__(self, border_index: BorderIndex, client_ids: Iterable[int]):
        self.border_index = border_index
        self.client_ids = sorted(client_ids)
        self.hc_layer = 0
        self.round = 0
        self._hc_staged: dict[int, HcUploadMsg] = {}
        self._param_staged: dict[int, ParamUploadMsg] = {}
        self.global_params: ClassifierParams | None = None

    def initial_broadcast(self, params: ClassifierParams) -> ParamBroadcastMsg:
        self.global_params = params.copy()
        return ParamBroadcastMsg(tuple(b.copy() for b in params.blocks))

    def receive_hc(self, msg: HcUploadMsg) -> None:
        if msg.layer != self.hc_layer:
            raise ProtocolError(f"upload for layer {msg.layer} while collecting layer {self.hc_layer}")
        if msg.client_id in self._hc_staged:
            raise DuplicateUpload(f"client {msg.client_id} already uploaded layer {msg.layer}")
        if msg.client_id not in self.client_ids:
            raise ProtocolError(f"unknown client {msg.client_id}")
        self._hc_staged[msg.client_id] = msg

    def aggregate_hc(self) -> dict[int, HcBroadcastMsg]:
        out = hc_server_aggregate(
            list(self._hc_staged.values()), self.border_index, self.client_ids
        )
        self._hc_staged.clear()
        self.hc_layer += 1
        return out

    def receive_params(self, msg: ParamUploadMsg) -> None:
        if msg.client_id in self._param_staged:
            raise DuplicateUpload(f"client {msg.client_id} already uploaded round {self.round}")
        if msg.client_id not in self.client_ids:
            raise ProtocolError(f"unknown client {msg.client_id}")
        self._param_staged[msg.client_id] = msg

    def aggregate_params(self) -> ParamBroadcastMsg:
        out = fedavg_aggregate(list(self._param_staged.values()), self.client_ids)
        self._param_staged.clear()
        self.round += 1
        self.global_params = ClassifierParams([b.copy() for b in out.param_blocks])
        return out
