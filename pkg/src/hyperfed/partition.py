"""Splitting a hypergraph into client subgraphs.

Nodes are assigned to clients label-by-label with Dirichlet proportions.
A hyperedge whose members all land on one client is internal to it; any
other hyperedge is a border hyperedge and every client holding one of its
members sees the local slice of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import rng as rngmod
from .errors import NoLabels, RatioOverflow
from .hypergraph import Hypergraph


@dataclass(frozen=True)
class PartitionSpec:
    num_clients: int
    beta: float = 10000.0
    seed: int = 0

    def __post_init__(self):
        if self.num_clients < 1:
            raise ValueError(f"num_clients must be >= 1, got {self.num_clients}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


class LocalEdge(NamedTuple):
    edge_id: int
    members: np.ndarray  # local node ids, ascending
    weight: float


@dataclass(frozen=True, eq=False)
class Masks:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "Masks":
        return cls(*(np.zeros(n, dtype=bool) for _ in range(3)))


@dataclass(frozen=True, eq=False)
class ClientSubgraph:
    client_id: int
    global_node_ids: np.ndarray
    local_features: np.ndarray
    local_labels: np.ndarray | None
    internal_edges: tuple[LocalEdge, ...]
    border_edges: tuple[LocalEdge, ...]
    border_nodes: np.ndarray
    # d(v) over internal and untrimmed border edges; equals the global degree
    node_degree_local: np.ndarray
    masks: Masks = field(default=None)

    @property
    def num_nodes(self) -> int:
        return self.global_node_ids.size


@dataclass(frozen=True)
class BorderEntry:
    clients: tuple[int, ...]
    counts: tuple[int, ...]
    total: int
    weight: float


@dataclass(frozen=True, eq=False)
class BorderIndex:
    entries: dict[int, BorderEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, edge_id) -> bool:
        return edge_id in self.entries

    def __getitem__(self, edge_id) -> BorderEntry:
        return self.entries[edge_id]

    def edges_of(self, client_id: int) -> list[int]:
        return [e for e, entry in self.entries.items() if client_id in entry.clients]


def apportion(total: int, proportions: Sequence[float]) -> np.ndarray:
    """Largest-remainder rounding of ``total * proportions`` to integers summing to ``total``."""
    p = np.asarray(proportions, dtype=np.float64)
    quotas = total * p / p.sum()
    sizes = np.floor(quotas).astype(np.int64)
    short = total - int(sizes.sum())
    if short > 0:
        order = np.argsort(-(quotas - sizes), kind="stable")
        sizes[order[:short]] += 1
    return sizes


def uniform_partition(num_nodes: int, spec: PartitionSpec) -> np.ndarray:
    rng = rngmod.seeded_rng(spec.seed, rngmod.PARTITION)
    order = rng.permutation(num_nodes)
    sizes = apportion(num_nodes, np.ones(spec.num_clients))
    assignment = np.empty(num_nodes, dtype=np.int64)
    start = 0
    for client, size in enumerate(sizes):
        assignment[order[start : start + size]] = client
        start += size
    return assignment


def dirichlet_partition(
    hg: Hypergraph, spec: PartitionSpec, *, allow_unlabeled: bool = False
) -> np.ndarray:
    """Assign each node to a client using per-class Dirichlet proportions.

    For every class (ascending) the proportions are drawn from
    ``Dirichlet(beta * 1_K)``, the class's nodes are shuffled and cut into
    contiguous blocks whose sizes are the largest-remainder rounding of the
    proportions. A very large ``beta`` approximates an i.i.d. split.

    Set ``allow_unlabeled`` to fall back to a uniform random split when
    some labels are missing; otherwise :class:`NoLabels` is raised.
    """
    if not hg.fully_labeled:
        if allow_unlabeled:
            return uniform_partition(hg.num_nodes, spec)
        raise NoLabels("label-driven partitioning needs a label for every node")

    k = spec.num_clients
    assignment = np.zeros(hg.num_nodes, dtype=np.int64)
    if k == 1:
        return assignment
    rng = rngmod.seeded_rng(spec.seed, rngmod.PARTITION)
    for c in np.unique(hg.labels):
        nodes = rng.permutation(np.flatnonzero(hg.labels == c))
        proportions = rng.dirichlet(np.full(k, spec.beta))
        sizes = apportion(nodes.size, proportions)
        bounds = np.concatenate([[0], np.cumsum(sizes)])
        for client in range(k):
            assignment[nodes[bounds[client] : bounds[client + 1]]] = client
    return assignment


def split_subgraphs(
    hg: Hypergraph, assignment, num_clients: int | None = None
) -> tuple[list[ClientSubgraph], BorderIndex]:
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (hg.num_nodes,):
        raise ValueError("assignment must cover every node exactly once")
    k = int(num_clients if num_clients is not None else assignment.max(initial=-1) + 1)

    node_ids = [np.flatnonzero(assignment == c) for c in range(k)]
    local_of = np.empty(hg.num_nodes, dtype=np.int64)
    for ids in node_ids:
        local_of[ids] = np.arange(ids.size)

    internal: list[list[LocalEdge]] = [[] for _ in range(k)]
    border: list[list[LocalEdge]] = [[] for _ in range(k)]
    entries: dict[int, BorderEntry] = {}
    for e, members in enumerate(hg.hyperedges):
        members = np.asarray(members, dtype=np.int64)
        owners = assignment[members]
        weight = float(hg.edge_weights[e])
        clients, counts = np.unique(owners, return_counts=True)
        if clients.size == 1:
            c = int(clients[0])
            internal[c].append(LocalEdge(e, local_of[members], weight))
            continue
        entries[e] = BorderEntry(
            clients=tuple(int(c) for c in clients),
            counts=tuple(int(n) for n in counts),
            total=int(members.size),
            weight=weight,
        )
        for c in clients:
            border[c].append(LocalEdge(e, local_of[members[owners == c]], weight))

    subs = []
    for c in range(k):
        n = node_ids[c].size
        degree = np.zeros(n)
        # ascending global edge id, the same summation order as the global degree
        for edge in sorted(internal[c] + border[c], key=lambda e: e.edge_id):
            degree[edge.members] += edge.weight
        touched = (
            np.unique(np.concatenate([edge.members for edge in border[c]]))
            if border[c]
            else np.zeros(0, dtype=np.int64)
        )
        subs.append(
            ClientSubgraph(
                client_id=c,
                global_node_ids=node_ids[c],
                local_features=hg.features[node_ids[c]],
                local_labels=None if hg.labels is None else hg.labels[node_ids[c]],
                internal_edges=tuple(internal[c]),
                border_edges=tuple(border[c]),
                border_nodes=touched,
                node_degree_local=degree,
                masks=Masks.empty(n),
            )
        )
    return subs, BorderIndex(entries)


def trim_border(sub: ClientSubgraph) -> list[LocalEdge]:
    """Border edges restricted to this client's members.

    The trimmed edge degree is the local member count, i.e. ``len(members)``;
    an edge with a single local member survives as a self-only edge.
    """
    return [LocalEdge(e.edge_id, e.members.copy(), e.weight) for e in sub.border_edges]


def trimmed_hypergraph(sub: ClientSubgraph) -> Hypergraph:
    """The client's view as a standalone hypergraph over internal + trimmed border edges."""
    edges = list(sub.internal_edges) + trim_border(sub)
    return Hypergraph.create(
        sub.local_features,
        [e.members.tolist() for e in edges],
        labels=sub.local_labels,
        edge_weights=[e.weight for e in edges],
        name=f"client-{sub.client_id}",
    )


def make_masks(
    sub: ClientSubgraph | int,
    train_ratio: float,
    val_ratio: float = 0.2,
    test_ratio: float = 0.4,
    seed: int = 0,
) -> Masks:
    """Draw disjoint train/val/test node masks for one client.

    Counts are ``floor(ratio * n)`` with at least one training node for a
    nonempty client; the remaining nodes are left out of all three masks.
    """
    ratios = (train_ratio, val_ratio, test_ratio)
    if min(ratios) < 0 or sum(ratios) > 1 + 1e-12:
        raise RatioOverflow(f"mask ratios {ratios} must be non-negative and sum to <= 1")
    if isinstance(sub, ClientSubgraph):
        n, client = sub.num_nodes, sub.client_id
    else:
        n, client = int(sub), 0
    masks = Masks.empty(n)
    if n == 0:
        return masks

    n_train = max(1, int(np.floor(train_ratio * n + 1e-9)))
    n_val = min(int(np.floor(val_ratio * n + 1e-9)), n - n_train)
    n_test = min(int(np.floor(test_ratio * n + 1e-9)), n - n_train - n_val)
    order = rngmod.seeded_rng(seed, rngmod.MASKS, client).permutation(n)
    masks.train[order[:n_train]] = True
    masks.val[order[n_train : n_train + n_val]] = True
    masks.test[order[n_train + n_val : n_train + n_val + n_test]] = True
    return masks


def with_masks(
    subs: Sequence[ClientSubgraph], train_ratio: float, val_ratio: float, test_ratio: float, seed: int
) -> list[ClientSubgraph]:
    return [replace(s, masks=make_masks(s, train_ratio, val_ratio, test_ratio, seed)) for s in subs]


def label_tv_distance(labels, assignment, num_clients: int, num_classes: int) -> np.ndarray:
    """Total-variation distance of each client's label histogram from the global one."""
    labels = np.asarray(labels)
    assignment = np.asarray(assignment)
    overall = np.bincount(labels, minlength=num_classes) / labels.size
    out = np.zeros(num_clients)
    for c in range(num_clients):
        mine = labels[assignment == c]
        if mine.size == 0:
            out[c] = 1.0
            continue
        local = np.bincount(mine, minlength=num_classes) / mine.size
        out[c] = 0.5 * np.abs(local - overall).sum()
    return out
