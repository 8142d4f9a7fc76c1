"""Command-line entry point.

    hyperfed run --dataset data.hg --mode fed-hc --clients 3 --seeds 42:5 --output out.csv
    hyperfed synth --out toy.hg --nodes 1000 --classes 4
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import HyperfedError
from .experiment import MODES, ExperimentConfig, config_from_mapping, run_experiment
from .synthetic import community_hypergraph
from .datasets import write_dataset

log = logging.getLogger("hyperfed")

# flag -> ExperimentConfig field
_RUN_FLAGS = {
    "dataset": "dataset_path",
    "format": "dataset_format",
    "mode": "mode",
    "clients": "num_clients",
    "beta": "beta",
    "layers": "num_layers",
    "hidden": "hidden_dim",
    "dropout": "dropout",
    "lr": "lr",
    "rounds": "rounds",
    "local_iters": "local_iters",
    "train_ratio": "train_ratio",
    "val_ratio": "val_ratio",
    "test_ratio": "test_ratio",
    "seeds": "seeds",
    "transport": "transport",
    "output": "output_path",
    "allow_unlabeled": "allow_unlabeled",
}


def parse_seeds(text: str) -> list[int]:
    """``"42:5"`` is five seeds from 42; ``"1,5,9"`` is an explicit list."""
    text = text.strip()
    if ":" in text:
        base, count = text.split(":", 1)
        return list(range(int(base), int(base) + int(count)))
    return [int(s) for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperfed", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train one configuration over several seeds")
    run.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    run.add_argument("--dataset")
    run.add_argument("--format", choices=["auto", "hypergraph", "simple"])
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--clients", type=int)
    run.add_argument("--beta", type=float)
    run.add_argument("--layers", type=int)
    run.add_argument("--hidden", type=int)
    run.add_argument("--dropout", type=float)
    run.add_argument("--lr", type=float)
    run.add_argument("--rounds", type=int)
    run.add_argument("--local-iters", type=int)
    run.add_argument("--train-ratio", type=float)
    run.add_argument("--val-ratio", type=float)
    run.add_argument("--test-ratio", type=float)
    run.add_argument("--seeds", type=parse_seeds, help="BASE:COUNT or a comma list")
    run.add_argument("--transport", choices=["inproc", "wire"])
    run.add_argument("--output", help="metrics CSV path")
    run.add_argument("--allow-unlabeled", action="store_true", default=None,
                     help="fall back to a uniform split when labels are missing")

    synth = sub.add_parser("synth", help="write a synthetic community hypergraph file")
    synth.add_argument("--out", required=True)
    synth.add_argument("--nodes", type=int, default=1000)
    synth.add_argument("--classes", type=int, default=4)
    synth.add_argument("--features", type=int, default=128)
    synth.add_argument("--edges", type=int, default=400)
    synth.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        data.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    for flag, name in _RUN_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            data[name] = value
    return config_from_mapping(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "synth":
            hg = community_hypergraph(
                args.nodes, args.classes, feature_dim=args.features,
                num_edges=args.edges, seed=args.seed,
            )
            write_dataset(hg, args.out)
            print(f"wrote {args.out}: {hg.num_nodes} nodes, {hg.num_edges} hyperedges")
            return 0
        cfg = config_from_args(args)
        result = run_experiment(cfg)
    except (HyperfedError, OSError, ValueError) as exc:
        print(f"hyperfed: error: {exc}", file=sys.stderr)
        return 1
    s = result.summary()
    print(
        f"{s['dataset'] or cfg.dataset_path} mode={cfg.mode} K={cfg.num_clients} "
        f"seeds={s['num_seeds']} test_acc={s['mean_test_acc']:.4f} +/- {s['std_test_acc']:.4f}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
