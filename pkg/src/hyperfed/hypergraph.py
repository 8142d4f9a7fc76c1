"""Immutable hypergraph container, incidence indices and degree vectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptyGraph, ValidationError


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """A node-featured, edge-weighted hypergraph.

    Hyperedges are tuples of node ids, sorted and free of duplicates; a
    hyperedge's global id is its position in ``hyperedges``. ``labels`` uses
    ``-1`` for an unlabeled node and is ``None`` when the dataset carries no
    labels at all.
    """

    features: np.ndarray
    hyperedges: tuple[tuple[int, ...], ...]
    edge_weights: np.ndarray
    labels: np.ndarray | None = None
    num_classes: int = 0
    name: str = ""

    @classmethod
    def create(
        cls,
        features,
        hyperedges: Iterable[Iterable[int]],
        labels=None,
        edge_weights=None,
        num_classes: int | None = None,
        name: str = "",
    ) -> "Hypergraph":
        """Normalize raw inputs into a Hypergraph (no validation performed).

        Members of each hyperedge are sorted; duplicate members are kept so
        that ``validate`` can report them.
        """
        x = np.array(features, dtype=np.float64, copy=True)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        edges = tuple(tuple(sorted(int(v) for v in e)) for e in hyperedges)
        if edge_weights is None:
            w = np.ones(len(edges), dtype=np.float64)
        else:
            w = np.array(edge_weights, dtype=np.float64, copy=True).reshape(-1)
        y = None
        if labels is not None:
            y = np.array(labels, dtype=np.int64, copy=True).reshape(-1)
            if num_classes is None:
                num_classes = int(y.max()) + 1 if y.size and y.max() >= 0 else 0
        return cls(
            features=_frozen(x),
            hyperedges=edges,
            edge_weights=_frozen(w),
            labels=None if y is None else _frozen(y),
            num_classes=int(num_classes or 0),
            name=name,
        )

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def num_edges(self) -> int:
        return len(self.hyperedges)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def fully_labeled(self) -> bool:
        return self.labels is not None and bool(np.all(self.labels >= 0))


@dataclass(frozen=True, eq=False)
class IncidenceIndex:
    """Both directions of the node/hyperedge incidence relation.

    ``matrix`` is the sparse N x M 0/1 incidence matrix H in CSR form.
    """

    edge_to_nodes: tuple[np.ndarray, ...]
    node_to_edges: tuple[np.ndarray, ...]
    matrix: sp.csr_matrix = field(repr=False)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True, eq=False)
class DegreeVectors:
    node_degree: np.ndarray
    edge_degree: np.ndarray


def validate(hg: Hypergraph) -> list[str]:
    """Return the list of violated invariants; empty when ``hg`` is valid."""
    problems: list[str] = []
    n = hg.features.shape[0] if hg.features.ndim == 2 else -1
    if hg.features.ndim != 2:
        problems.append(f"features must be a 2-d matrix, got {hg.features.ndim} dims")
    elif not np.all(np.isfinite(hg.features)):
        problems.append("features contain non-finite values")

    if hg.edge_weights.shape != (len(hg.hyperedges),):
        problems.append(
            f"edge_weights has length {hg.edge_weights.size}, expected {len(hg.hyperedges)}"
        )
    else:
        bad = np.flatnonzero(~(hg.edge_weights > 0) | ~np.isfinite(hg.edge_weights))
        for e in bad[:10]:
            problems.append(f"hyperedge {e} has non-positive weight {hg.edge_weights[e]}")

    for e, members in enumerate(hg.hyperedges):
        if not members:
            problems.append(f"hyperedge {e} is empty")
            continue
        if len(set(members)) != len(members):
            problems.append(f"hyperedge {e} has duplicate members")
        if members[0] < 0 or (n >= 0 and members[-1] >= n):
            problems.append(f"hyperedge {e} has out-of-range node id (num_nodes={n})")

    if hg.labels is not None:
        if hg.labels.shape != (n,):
            problems.append(f"labels has length {hg.labels.size}, expected {n}")
        elif hg.labels.size:
            if hg.labels.min() < -1:
                problems.append("labels contain ids below -1")
            if hg.labels.max() >= hg.num_classes:
                problems.append(
                    f"label {hg.labels.max()} out of range for num_classes={hg.num_classes}"
                )
    return problems


def check(hg: Hypergraph) -> Hypergraph:
    problems = validate(hg)
    if problems:
        raise ValidationError(problems)
    return hg


def build_incidence(hg: Hypergraph) -> IncidenceIndex:
    m = hg.num_edges
    sizes = np.fromiter((len(e) for e in hg.hyperedges), dtype=np.int64, count=m)
    cols = np.repeat(np.arange(m, dtype=np.int64), sizes)
    rows = np.fromiter(
        (v for e in hg.hyperedges for v in e), dtype=np.int64, count=int(sizes.sum())
    )
    data = np.ones(rows.size, dtype=np.float64)
    h = sp.csr_matrix((data, (rows, cols)), shape=(hg.num_nodes, m))
    h.sort_indices()
    edge_to_nodes = tuple(_frozen(np.asarray(e, dtype=np.int64)) for e in hg.hyperedges)
    node_to_edges = tuple(
        _frozen(h.indices[h.indptr[v] : h.indptr[v + 1]].astype(np.int64))
        for v in range(hg.num_nodes)
    )
    return IncidenceIndex(edge_to_nodes=edge_to_nodes, node_to_edges=node_to_edges, matrix=h)


def compute_degrees(hg: Hypergraph, idx: IncidenceIndex) -> DegreeVectors:
    # d(v) = sum_e w(e) h(v, e); s(e) = sum_v h(v, e)
    node_degree = np.asarray(idx.matrix @ hg.edge_weights, dtype=np.float64).reshape(-1)
    edge_degree = np.fromiter(
        (len(e) for e in idx.edge_to_nodes), dtype=np.int64, count=len(idx.edge_to_nodes)
    )
    return DegreeVectors(node_degree=_frozen(node_degree), edge_degree=_frozen(edge_degree))


def dedup_hyperedges(
    hyperedges: Sequence[Sequence[int]], weights: Sequence[float] | None = None, *, sum_weights: bool = True
):
    """Drop repeated member sets, keeping first-occurrence order.

    With ``sum_weights`` the weights of merged copies are added together;
    otherwise the first copy's weight is kept. Returns ``(edges, weights)``.
    """
    if weights is None:
        weights = [1.0] * len(hyperedges)
    position: dict[tuple[int, ...], int] = {}
    edges: list[tuple[int, ...]] = []
    merged: list[float] = []
    for members, w in zip(hyperedges, weights):
        key = tuple(sorted(set(int(v) for v in members)))
        at = position.get(key)
        if at is None:
            position[key] = len(edges)
            edges.append(key)
            merged.append(float(w))
        elif sum_weights:
            merged[at] += float(w)
    return edges, merged


def from_simple_graph(
    edges: Iterable[tuple[int, int]],
    features,
    labels=None,
    num_classes: int | None = None,
    name: str = "",
) -> Hypergraph:
    """Build the 1-hop neighborhood hypergraph of a simple graph.

    Every node v contributes the candidate hyperedge {v} U N(v); identical
    candidates collapse to one hyperedge of weight 1.
    """
    x = np.asarray(features, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise EmptyGraph("simple graph has no nodes")
    neighbors: list[set[int]] = [{v} for v in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        neighbors[u].add(v)
        neighbors[v].add(u)
    hyperedges, _ = dedup_hyperedges([sorted(s) for s in neighbors], sum_weights=False)
    return Hypergraph.create(
        x, hyperedges, labels=labels, num_classes=num_classes, name=name
    )
