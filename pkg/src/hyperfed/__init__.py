"""Federated hypergraph node classification with hyperedge completion."""

from .hypergraph import (
    DegreeVectors,
    Hypergraph,
    IncidenceIndex,
    build_incidence,
    compute_degrees,
    from_simple_graph,
    validate,
)
from .propagation import (
    PropagationConfig,
    dense_reference_propagate,
    edge_gather,
    node_aggregate,
    propagate_combined,
    propagate_global,
)
from .partition import (
    BorderIndex,
    ClientSubgraph,
    PartitionSpec,
    dirichlet_partition,
    make_masks,
    split_subgraphs,
    trim_border,
)
from .training import ClassifierParams, TrainConfig
from .experiment import ExperimentConfig, MetricsRecord, emit_metrics, run_experiment

__version__ = "0.1.0"
