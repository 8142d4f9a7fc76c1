"""Linearized HGNN propagation.

The whole-graph operator is ``D^-1/2 H W S^-1 H^T D^-1/2`` applied N times
with no activation and no parameters. The same step can be split into an
edge-gather pass (node rows -> hyperedge embeddings) followed by a
node-aggregate pass (hyperedge embeddings -> node rows); that split is what
the hyperedge-completion protocol distributes across clients.

Nodes of zero degree get a zero entry in ``D^-1/2``: they emit nothing and
receive nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, TooLarge
from .hypergraph import Hypergraph, build_incidence, compute_degrees

DENSE_NODE_LIMIT = 1000


@dataclass(frozen=True)
class PropagationConfig:
    num_layers: int = 2

    def __post_init__(self):
        if self.num_layers < 1:
            raise ValueError(f"num_layers must be >= 1, got {self.num_layers}")


def _num_layers(cfg) -> int:
    if isinstance(cfg, PropagationConfig):
        return cfg.num_layers
    return PropagationConfig(int(cfg)).num_layers


def inv_sqrt_degree(node_degree: np.ndarray) -> np.ndarray:
    d = np.asarray(node_degree, dtype=np.float64)
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = 1.0 / np.sqrt(d[pos])
    return out


def _as_embedding(x, rows: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.shape[0] != rows:
        raise DimensionMismatch(f"embedding has {x.shape[0]} rows, hypergraph has {rows} nodes")
    return x


class SpectralOperator:
    """Factored sparse form of the normalized hypergraph operator.

    ``apply(x)`` computes ``G (B (G^T x))`` with ``G = D^-1/2 H`` and
    ``B = W S^-1``; the N x N product is never materialized.
    """

    def __init__(self, incidence: sp.spmatrix, edge_weights, node_degree, edge_degree):
        dv = inv_sqrt_degree(node_degree)
        self.gather = sp.csr_matrix(sp.diags(dv) @ incidence)
        self.gather_t = sp.csr_matrix(self.gather.T)
        s = np.asarray(edge_degree, dtype=np.float64)
        self.edge_scale = np.divide(
            np.asarray(edge_weights, dtype=np.float64), s, out=np.zeros_like(s), where=s > 0
        )

    @classmethod
    def from_hypergraph(cls, hg: Hypergraph) -> "SpectralOperator":
        idx = build_incidence(hg)
        deg = compute_degrees(hg, idx)
        return cls(idx.matrix, hg.edge_weights, deg.node_degree, deg.edge_degree)

    def apply(self, x: np.ndarray) -> np.ndarray:
        delta = self.gather_t @ x
        return self.gather @ (self.edge_scale[:, None] * delta)


def propagate_global(hg: Hypergraph, x, cfg=PropagationConfig()) -> np.ndarray:
    x = _as_embedding(x, hg.num_nodes)
    op = SpectralOperator.from_hypergraph(hg)
    for _ in range(_num_layers(cfg)):
        x = op.apply(x)
    return np.asarray(x)


def dense_reference_propagate(hg: Hypergraph, x, cfg=PropagationConfig()) -> np.ndarray:
    """Dense-matrix evaluation of the propagation, used as a test oracle."""
    n, m = hg.num_nodes, hg.num_edges
    if n > DENSE_NODE_LIMIT:
        raise TooLarge(f"dense propagation refused for {n} nodes (limit {DENSE_NODE_LIMIT})")
    x = _as_embedding(x, n)
    h = np.zeros((n, m))
    for j, members in enumerate(hg.hyperedges):
        for v in members:
            h[v, j] = 1.0
    w = np.diag(hg.edge_weights)
    d = h @ hg.edge_weights
    s = h.sum(axis=0)
    d_inv_sqrt = np.diag([1.0 / np.sqrt(dv) if dv > 0 else 0.0 for dv in d])
    s_inv = np.diag([1.0 / se if se > 0 else 0.0 for se in s])
    op = d_inv_sqrt @ h @ w @ s_inv @ h.T @ d_inv_sqrt
    for _ in range(_num_layers(cfg)):
        x = op @ x
    return x


def edge_gather(edge_members: Sequence[int], x: np.ndarray, node_degree) -> np.ndarray:
    """Hyperedge embedding: sum of member rows scaled by 1/sqrt(d(u)).

    ``x`` and ``node_degree`` are indexed by the ids in ``edge_members``.
    Members with zero degree contribute nothing.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape[1] if x.ndim == 2 else 1)
    for u in sorted(int(u) for u in edge_members):
        d = float(node_degree[u])
        if d > 0:
            out += x[u] / np.sqrt(d)
    return out


def node_aggregate(
    v: int,
    incident_edges: Iterable[tuple[float, float, np.ndarray]],
    node_degree_v: float,
    dim: int | None = None,
) -> np.ndarray:
    """Combine the embeddings of the hyperedges incident to node ``v``.

    Each entry of ``incident_edges`` is ``(weight, edge_degree, embedding)``
    and contributes ``weight / (edge_degree * sqrt(d(v))) * embedding``.
    ``v`` only labels the call; the result depends on the other arguments.
    """
    edges = list(incident_edges)
    if dim is None:
        dim = len(edges[0][2]) if edges else 1
    out = np.zeros(dim)
    if node_degree_v <= 0 or not edges:
        return out
    root = np.sqrt(node_degree_v)
    for weight, degree, delta in edges:
        out += (weight / (degree * root)) * np.asarray(delta, dtype=np.float64)
    return out


def propagate_combined(local_phi, border_phi) -> np.ndarray:
    a = np.asarray(local_phi, dtype=np.float64)
    b = np.asarray(border_phi, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot combine shapes {a.shape} and {b.shape}")
    return a + b
