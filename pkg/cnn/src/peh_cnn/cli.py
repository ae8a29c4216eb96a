"""Command-line interface: `peh-cnn train --manifest ... --out ...`.

Exit code 0 means metrics.json and per-run curves exist under --out; any
failure exits nonzero with a message on stderr (the contract the sweep's
external-classifier hook relies on).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from peh_cnn.data import DataError, load_dataset
from peh_cnn.train import TrainProtocol, train_cnn


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peh-cnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    train = sub.add_parser("train", help="train + evaluate on an image manifest")
    train.add_argument("--manifest", required=True, help="images.jsonl from `peh cwt --manifest`")
    train.add_argument("--out", required=True, help="output directory for metrics and curves")
    train.add_argument("--runs", type=int, default=5)
    train.add_argument("--epochs", type=int, default=50)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--lr", type=float, default=2e-3)
    train.add_argument("--freeze-lower", action="store_true",
                       help="pretrain conv layers on synthetic ridges, then freeze")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dataset = load_dataset(args.manifest)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    protocol = TrainProtocol(
        n_runs=args.runs,
        epochs=args.epochs,
        seed=args.seed,
        learning_rate=args.lr,
        freeze_lower_layers=args.freeze_lower,
    )
    outcome = train_cnn(dataset, protocol)
    outcome.save(Path(args.out))
    print(
        f"{len(dataset)} images ({dataset.image_size[0]}x{dataset.image_size[1]}), "
        f"{protocol.n_runs} runs: accuracy "
        f"{outcome.mean_accuracy:.3f} +/- {outcome.metrics_dict()['std_accuracy']:.3f}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
