"""Command line for the training harness: ``skeltrain train`` and
``skeltrain eval``."""

from __future__ import annotations

import argparse
import sys

from .model import ModelSpec
from .tensor_file import TensorFileError, read_tensor_header
from .textio import read_labels, read_manifest_ids
from .training import evaluate, train


def cmd_train(args: argparse.Namespace) -> int:
    ids = read_manifest_ids(args.manifest)
    if not ids:
        print(f"error: {args.manifest}: manifest lists no samples", file=sys.stderr)
        return 1
    if args.in_channels is not None:
        channels = args.in_channels
    else:
        (_, _, channels), _ = read_tensor_header(f"{args.tensors}/{ids[0]}.tensor")
    labels = read_labels(args.labels)
    classes = sorted({labels[sid] for sid in ids if sid in labels})
    spec = ModelSpec(
        in_channels=channels,
        num_classes=len(classes),
        fc_width=args.fc_width,
        dropout=args.dropout,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
    )
    history = train(
        args.manifest, args.tensors, args.labels, spec, args.seed, args.out
    )
    final = history[-1]
    print(
        f"trained {final['epoch']} epochs "
        f"loss {final['loss']:.4f} accuracy {final['accuracy']:.4f}"
    )
    print(f"checkpoint {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    ids, _, _ = evaluate(args.checkpoint, args.manifest, args.tensors, args.out)
    print(f"scored {len(ids)} samples -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skeltrain", description="Tiny CNN harness")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train on a manifest of tensor files")
    tr.add_argument("--manifest", required=True)
    tr.add_argument("--tensors", required=True, help="directory of <sample_id>.tensor files")
    tr.add_argument("--labels", required=True, help="'sample_id label' file")
    tr.add_argument("--out", required=True, help="checkpoint path")
    tr.add_argument("--epochs", type=int, default=200)
    tr.add_argument("--batch-size", type=int, default=1000)
    tr.add_argument("--lr", type=float, default=1e-3)
    tr.add_argument("--dropout", type=float, default=0.5)
    tr.add_argument("--fc-width", type=int, default=256)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--in-channels", type=int, default=None, help="override the inferred channel count")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="score a manifest with a trained checkpoint")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--tensors", required=True)
    ev.add_argument("--out", required=True, help="score file path")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TensorFileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
