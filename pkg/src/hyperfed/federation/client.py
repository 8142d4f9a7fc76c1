"""Client-side state: feature propagation (trimmed or completed) and local training."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import IncompleteRound, LayerSkew, MissingLayer, ProtocolError
from ..partition import ClientSubgraph, LocalEdge, trimmed_hypergraph
from ..propagation import inv_sqrt_degree, propagate_combined, propagate_global
from ..training import ClassifierParams, LocalTrainer, TrainConfig
from .messages import HcBroadcastMsg, HcUploadEntry, HcUploadMsg, ParamBroadcastMsg, ParamUploadMsg

BASIC = "basic"
HC = "hc"


def _incidence(num_nodes: int, edges: list[LocalEdge]) -> sp.csr_matrix:
    rows = np.concatenate([e.members for e in edges]) if edges else np.zeros(0, dtype=np.int64)
    cols = np.repeat(np.arange(len(edges)), [e.members.size for e in edges])
    h = sp.csr_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(num_nodes, len(edges))
    )
    h.sort_indices()
    return h


class FederatedClient:
    """One participant holding a :class:`ClientSubgraph`.

    ``layer_embeddings[n]`` holds this client's rows of X^(n). In ``hc``
    mode they grow one layer per completion round; in ``basic`` mode they are
    produced locally over the trimmed subgraph.
    """

    def __init__(self, subgraph: ClientSubgraph, mode: str = HC):
        if mode not in (BASIC, HC):
            raise ValueError(f"unknown client mode {mode!r}")
        self.subgraph = subgraph
        self.mode = mode
        self.layer_embeddings: list[np.ndarray] = [
            np.asarray(subgraph.local_features, dtype=np.float64)
        ]
        self.border_phi: list[np.ndarray] = []
        self.trainer: LocalTrainer | None = None

        n = subgraph.num_nodes
        internal = list(subgraph.internal_edges)
        border = list(subgraph.border_edges)
        self._dv = inv_sqrt_degree(subgraph.node_degree_local)
        self._h_int = _incidence(n, internal)
        self._int_scale = np.array(
            [e.weight / e.members.size for e in internal], dtype=np.float64
        )
        self._h_border = _incidence(n, border)
        self._border_ids = [e.edge_id for e in border]
        self._border_counts = [int(e.members.size) for e in border]

    @property
    def client_id(self) -> int:
        return self.subgraph.client_id

    @property
    def current_layer(self) -> int:
        return len(self.layer_embeddings) - 1

    @property
    def final_features(self) -> np.ndarray:
        return self.layer_embeddings[-1]

    # feature propagation

    def hc_client_round(self, layer: int) -> HcUploadMsg:
        """Partial embeddings of every border hyperedge this client touches."""
        if self.mode != HC:
            raise ProtocolError("hyperedge completion requires an hc-mode client")
        if layer != self.current_layer:
            raise MissingLayer(
                f"client {self.client_id}: layer {layer} requested, holding layer {self.current_layer}"
            )
        x = self.layer_embeddings[layer]
        partial = self._h_border.T @ (self._dv[:, None] * x)
        entries = tuple(
            HcUploadEntry(edge_id, partial[j], count)
            for j, (edge_id, count) in enumerate(zip(self._border_ids, self._border_counts))
        )
        return HcUploadMsg(self.client_id, layer, entries)

    def hc_client_apply(self, msg: HcBroadcastMsg) -> np.ndarray:
        """Build X^(n+1) from local hyperedges plus the completed border hyperedges."""
        if msg.layer != self.current_layer:
            raise LayerSkew(
                f"client {self.client_id}: broadcast for layer {msg.layer}, at layer {self.current_layer}"
            )
        x = self.layer_embeddings[-1]
        scaled = self._dv[:, None] * x
        local_delta = self._h_int.T @ scaled
        local_phi = self._dv[:, None] * (self._h_int @ (self._int_scale[:, None] * local_delta))

        received = {entry.edge_id: entry for entry in msg.entries}
        missing = [e for e in self._border_ids if e not in received]
        if missing:
            raise IncompleteRound(f"client {self.client_id}: no completion for border edges {missing[:5]}")
        dim = x.shape[1]
        border_delta = np.zeros((len(self._border_ids), dim))
        border_scale = np.zeros(len(self._border_ids))
        for j, edge_id in enumerate(self._border_ids):
            entry = received[edge_id]
            border_delta[j] = entry.embedding
            border_scale[j] = entry.weight / entry.degree
        border_phi = self._dv[:, None] * (self._h_border @ (border_scale[:, None] * border_delta))

        nxt = propagate_combined(local_phi, border_phi)
        self.border_phi.append(border_phi)
        self.layer_embeddings.append(nxt)
        return nxt

    def basic_local_propagate(self, num_layers: int) -> np.ndarray:
        """N-step propagation over internal plus trimmed border edges, without communication."""
        if self.mode != BASIC:
            raise ProtocolError("local trimmed propagation requires a basic-mode client")
        hg = trimmed_hypergraph(self.subgraph)
        x = self.layer_embeddings[0]
        for _ in range(num_layers):
            x = propagate_global(hg, x, 1)
            self.layer_embeddings.append(x)
        return x

    # training

    def start_training(self, params: ClassifierParams, config: TrainConfig) -> None:
        sub = self.subgraph
        self.trainer = LocalTrainer(
            features=self.final_features,
            labels=sub.local_labels,
            train_mask=sub.masks.train,
            params=params.copy(),
            config=config,
            stream=self.client_id,
        )

    def local_update(self, iters: int) -> ParamUploadMsg:
        self.trainer.train(iters)
        return ParamUploadMsg(
            self.client_id,
            tuple(b.copy() for b in self.trainer.params.blocks),
            self.trainer.num_train,
        )

    def receive_params(self, msg: ParamBroadcastMsg) -> None:
        self.trainer.set_params(ClassifierParams([np.array(b) for b in msg.param_blocks]))

    def metrics(self) -> dict:
        """Counts needed for size-weighted aggregation across clients."""
        masks = self.subgraph.masks
        t = self.trainer
        return {
            "train_count": t.num_train,
            "train_loss": t.train_loss() if t.num_train else 0.0,
            "val": t.correct(masks.val),
            "test": t.correct(masks.test),
        }
