"""Command-line entry point for the trainer."""

from __future__ import annotations

import argparse
import json
import sys

from .model import TABLE_SPEC
from .train import DegenerateTraining, TrainConfig, train_and_export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bilstm-train",
        description="Train the recurrent relevance classifier and export "
                    "prediction/metrics artifacts")
    parser.add_argument("--sequences", required=True,
                        help="encoded-sequence CSV (with .meta.json sidecar)")
    parser.add_argument("--labels", required=True, help="record_id,label CSV")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--batch-size", type=int, default=128)
    parser.add_argument("--folds", type=int, default=10)
    parser.add_argument("--patience", type=int, default=4)
    parser.add_argument("--input-length", type=int, default=None,
                        help="override the sequence length taken from the "
                             "export metadata")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                         patience=args.patience, folds=args.folds,
                         seed=args.seed)
    spec = TABLE_SPEC.with_input_length(args.input_length) \
        if args.input_length else None
    try:
        metrics = train_and_export(args.sequences, args.labels, args.out,
                                   spec=spec, config=config)
    except (DegenerateTraining, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(json.dumps({k: metrics[k] for k in ("precision", "recall", "f1")}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
