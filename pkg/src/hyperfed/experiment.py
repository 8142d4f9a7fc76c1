"""Experiment orchestration for the five training modes and metrics output."""

from __future__ import annotations

import csv
import logging
import statistics
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .datasets import load_any, load_dataset, load_simple_graph
from .federation import (
    BASIC,
    HC,
    FederatedClient,
    FederatedServer,
    make_transport,
    run_basic_propagation,
    run_federated_training,
    run_hc_pretraining,
    run_isolated_training,
)
from .hypergraph import Hypergraph
from .partition import Masks, PartitionSpec, dirichlet_partition, split_subgraphs, with_masks
from .propagation import propagate_global
from .training import TrainConfig, init_params

log = logging.getLogger(__name__)

MODES = ("local", "local-hc", "fed", "fed-hc", "global")
CSV_HEADER = ["seed", "round", "train_loss", "val_acc", "test_acc"]
SUMMARY_HEADER = [
    "dataset", "mode", "clients", "beta", "layers", "rounds", "local_iters",
    "num_seeds", "mean_test_acc", "std_test_acc",
]


@dataclass
class ExperimentConfig:
    dataset_path: str | None = None
    dataset_format: str = "auto"  # auto | hypergraph | simple
    mode: str = "fed-hc"
    num_clients: int = 3
    beta: float = 10000.0
    num_layers: int = 2
    hidden_dim: int = 16
    dropout: float = 0.5
    lr: float = 0.01
    rounds: int = 150
    local_iters: int = 3
    train_ratio: float = 0.1
    val_ratio: float = 0.2
    test_ratio: float = 0.4
    seeds: list[int] = field(default_factory=lambda: list(range(42, 47)))
    transport: str = "inproc"
    output_path: str | None = None
    allow_unlabeled: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.transport not in ("inproc", "wire"):
            raise ValueError(f"transport must be inproc or wire, got {self.transport!r}")
        if self.num_clients < 1 or self.num_layers < 1:
            raise ValueError("num_clients and num_layers must be >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.lr,
            dropout_rate=self.dropout,
            hidden_dim=self.hidden_dim,
            rounds=self.rounds,
            local_iters=self.local_iters,
            seed=seed,
        )


@dataclass(frozen=True)
class MetricsRecord:
    seed: int
    round: int
    train_loss: float
    val_acc: float
    test_acc: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[MetricsRecord]
    final_test: dict[int, float]
    dataset_name: str = ""

    @property
    def mean_test_acc(self) -> float:
        return statistics.fmean(self.final_test.values())

    @property
    def std_test_acc(self) -> float:
        values = list(self.final_test.values())
        return statistics.stdev(values) if len(values) > 1 else 0.0

    def summary(self) -> dict:
        c = self.config
        return {
            "dataset": self.dataset_name,
            "mode": c.mode,
            "clients": c.num_clients,
            "beta": c.beta,
            "layers": c.num_layers,
            "rounds": c.rounds,
            "local_iters": c.local_iters,
            "num_seeds": len(self.final_test),
            "mean_test_acc": self.mean_test_acc,
            "std_test_acc": self.std_test_acc,
        }


def load_for(cfg: ExperimentConfig) -> Hypergraph:
    if cfg.dataset_path is None:
        raise ValueError("no dataset_path configured")
    if cfg.dataset_format == "hypergraph":
        return load_dataset(cfg.dataset_path)
    if cfg.dataset_format == "simple":
        return load_simple_graph(cfg.dataset_path)
    return load_any(cfg.dataset_path)


def _global_client(hg: Hypergraph, subs, num_layers: int) -> FederatedClient:
    """One client over the whole graph whose masks are the union of the clients' masks."""
    whole, _ = split_subgraphs(hg, np.zeros(hg.num_nodes, dtype=np.int64), 1)
    union = Masks.empty(hg.num_nodes)
    for s in subs:
        for name in ("train", "val", "test"):
            getattr(union, name)[s.global_node_ids[getattr(s.masks, name)]] = True
    client = FederatedClient(replace(whole[0], masks=union), BASIC)
    client.layer_embeddings.append(propagate_global(hg, hg.features, num_layers))
    return client


def run_seed(hg: Hypergraph, cfg: ExperimentConfig, seed: int):
    """Run one seed; returns ``(history, transport)``."""
    spec = PartitionSpec(cfg.num_clients, cfg.beta, seed)
    assignment = dirichlet_partition(hg, spec, allow_unlabeled=cfg.allow_unlabeled)
    subs, border = split_subgraphs(hg, assignment, cfg.num_clients)
    subs = with_masks(subs, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio, seed)
    log.info(
        "seed %d: %d clients, %d border hyperedges", seed, cfg.num_clients, len(border)
    )
    tcfg = cfg.train_config(seed)
    initial = init_params(hg.feature_dim, cfg.hidden_dim, hg.num_classes, cfg.num_layers, seed)
    transport = make_transport(cfg.transport)

    if cfg.mode == "global":
        client = _global_client(hg, subs, cfg.num_layers)
        return run_isolated_training([client], tcfg, initial), transport

    use_hc = cfg.mode.endswith("-hc")
    clients = [FederatedClient(s, HC if use_hc else BASIC) for s in subs]
    server = FederatedServer(border, [c.client_id for c in clients])
    if use_hc:
        run_hc_pretraining(clients, server, cfg.num_layers, transport)
    else:
        run_basic_propagation(clients, cfg.num_layers)

    if cfg.mode.startswith("fed"):
        history = run_federated_training(clients, server, tcfg, initial, transport)
    else:
        history = run_isolated_training(clients, tcfg, initial)
    return history, transport


def run_experiment(cfg: ExperimentConfig, hg: Hypergraph | None = None) -> ExperimentResult:
    if hg is None:
        hg = load_for(cfg)
    records: list[MetricsRecord] = []
    final: dict[int, float] = {}
    for seed in cfg.seeds:
        history, _ = run_seed(hg, cfg, seed)
        records.extend(
            MetricsRecord(seed, m.round, m.train_loss, m.val_acc, m.test_acc) for m in history
        )
        if history:
            final[seed] = history[-1].test_acc
            log.info("seed %d (%s): final test acc %.4f", seed, cfg.mode, final[seed])
    result = ExperimentResult(cfg, records, final, hg.name)
    if cfg.output_path:
        emit_metrics(records, cfg.output_path, result.summary())
    return result


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def summary_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".summary" + (path.suffix or ".csv"))


def emit_metrics(records, path, summary: dict | None = None) -> None:
    """Write per-round metrics as CSV and, if given, the one-line summary next to it."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    if summary is not None:
        with summary_path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            writer.writerow([_fmt(summary[k]) for k in SUMMARY_HEADER])


def read_metrics(path) -> list[MetricsRecord]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected metrics header {reader.fieldnames}")
        return [
            MetricsRecord(
                int(row["seed"]), int(row["round"]), float(row["train_loss"]),
                float(row["val_acc"]), float(row["test_acc"]),
            )
            for row in reader
        ]


def config_from_mapping(data: dict) -> ExperimentConfig:
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)


def config_to_mapping(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)


__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "MetricsRecord",
    "MODES",
    "emit_metrics",
    "read_metrics",
    "run_experiment",
    "run_seed",
]
