"""Synthetic hypergraphs for tests, benchmarks and smoke runs."""

from __future__ import annotations

import numpy as np

from . import rng as rngmod
from .hypergraph import Hypergraph, dedup_hyperedges


def random_hypergraph(
    num_nodes: int,
    num_edges: int,
    *,
    feature_dim: int = 4,
    num_classes: int = 3,
    max_edge_size: int = 6,
    weighted: bool = False,
    seed: int = 0,
) -> Hypergraph:
    """Uniformly random hyperedges over labeled nodes with Gaussian features.

    Some nodes may end up in no hyperedge at all.
    """
    rng = rngmod.seeded_rng(seed, rngmod.SYNTHETIC)
    edges = []
    for _ in range(num_edges):
        size = int(rng.integers(1, min(max_edge_size, num_nodes) + 1))
        edges.append(rng.choice(num_nodes, size=size, replace=False).tolist())
    weights = rng.uniform(0.5, 2.0, size=num_edges) if weighted else np.ones(num_edges)
    edges, weights = dedup_hyperedges(edges, weights)
    return Hypergraph.create(
        rng.normal(size=(num_nodes, feature_dim)),
        edges,
        labels=rng.integers(0, num_classes, size=num_nodes),
        edge_weights=weights,
        num_classes=num_classes,
        name=f"random-{num_nodes}-{seed}",
    )


def community_hypergraph(
    num_nodes: int = 1000,
    num_classes: int = 4,
    *,
    feature_dim: int = 128,
    num_edges: int = 400,
    edge_size: tuple[int, int] = (4, 10),
    homophily: float = 0.7,
    signal: float = 0.15,
    noise: float = 1.0,
    seed: int = 0,
) -> Hypergraph:
    """Class-structured hypergraph with weakly informative node features.

    Each hyperedge is seeded by a class and draws each member from that class
    with probability ``homophily`` (otherwise from all nodes). A node's
    features are its class centroid times ``signal`` plus isotropic Gaussian
    noise, so a single node is hard to classify while neighborhood averages
    are much easier.
    """
    rng = rngmod.seeded_rng(seed, rngmod.SYNTHETIC)
    labels = rng.integers(0, num_classes, size=num_nodes)
    by_class = [np.flatnonzero(labels == c) for c in range(num_classes)]
    centroids = rng.normal(size=(num_classes, feature_dim))
    centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
    centroids *= np.sqrt(feature_dim)
    features = signal * centroids[labels] + noise * rng.normal(size=(num_nodes, feature_dim))

    lo, hi = edge_size
    edges = []
    for _ in range(num_edges):
        c = int(rng.integers(num_classes))
        size = int(rng.integers(lo, hi + 1))
        same = rng.random(size) < homophily
        members = np.where(
            same,
            rng.choice(by_class[c], size=size),
            rng.integers(0, num_nodes, size=size),
        )
        edges.append(members.tolist())
    edges, weights = dedup_hyperedges(edges)
    return Hypergraph.create(
        features, edges, labels=labels, edge_weights=weights, num_classes=num_classes,
        name=f"community-{num_nodes}-{seed}",
    )


def labeled_nodes(num_nodes: int, class_sizes=None, *, num_classes: int = 7, seed: int = 0) -> Hypergraph:
    """A hypergraph with labels only (one self-edge per node), for partition checks."""
    rng = rngmod.seeded_rng(seed, rngmod.SYNTHETIC)
    if class_sizes is None:
        labels = rng.integers(0, num_classes, size=num_nodes)
    else:
        labels = rng.permutation(np.repeat(np.arange(len(class_sizes)), class_sizes))
        num_classes = len(class_sizes)
    return Hypergraph.create(
        np.zeros((labels.size, 1)),
        [[v] for v in range(labels.size)],
        labels=labels,
        num_classes=num_classes,
        name="labeled",
    )
